"""Symmetric determinantal representations of hypersurfaces.

Works with tuples of symmetric matrices through the polynomial
det(x0 A0 + ... + xr Ar). Tuples are compared up to congruence via reduced
canonical forms, and the dimension of the determinantal locus is certified by
exact Jacobian rank.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .numeric import (  # noqa: F401
    DualScalar,
    Regime,
    ToleranceContext,
    complex_symmetric_eigen,
    exact_rank,
    poly_roots,
    sym_congruence_to_identity,
)
from .pencil import (  # noqa: F401
    GenCharPoly,
    Hypersurface,
    SymTuple,
    congruence,
    eval_pencil,
    gen_char_poly,
    in_U,
    random_tuple,
    same_hypersurface,
    slice_tuple,
)
from .reduction import (  # noqa: F401
    CongruenceWitness,
    HnElement,
    ReducedTuple,
    are_equivalent,
    canonicalize,
    hn_act,
    reduce,
    reduced_orbit,
)
from .recovery import (  # noqa: F401
    RankReport,
    ZPoint,
    coefficient_jacobian,
    expected_sdhyp_dim,
    extract_last_matrix,
    mu_plane,
    trace_reconstruct,
    verify_dimension,
)
