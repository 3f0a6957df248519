from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symdet import numeric as nm
from symdet.errors import InconsistentValues, NotSpanning
from symdet.pencil import GenCharPoly, SymTuple, gen_char_poly, random_tuple
from symdet.recovery import (
    ZPoint,
    coefficient_jacobian,
    expected_sdhyp_dim,
    extract_last_matrix,
    mu_plane,
    random_zpoint,
    restrict_to_line,
    sym_dim,
    trace_pair,
    trace_reconstruct,
    trace_sample,
    verify_dimension,
)


def ex(rows):
    return nm.as_exact(rows)


def test_expected_dim_examples():
    assert expected_sdhyp_dim(2, 2) == 5
    assert expected_sdhyp_dim(3, 2) == 8
    assert expected_sdhyp_dim(2, 3) == 9
    with pytest.raises(ValueError):
        expected_sdhyp_dim(1, 3)


def test_mu_plane_examples():
    assert mu_plane(2) == 2
    assert mu_plane(3) == 6
    assert mu_plane(4) == 72
    assert mu_plane(11) == 2**45 * (2**45 + 1) - 1
    assert mu_plane(13) == 2**66 * (2**66 + 1) - 1
    assert mu_plane(12) == 2**55 * (2**55 + 1)


# --------------------------------------------------------------------------
# Jacobian


def test_jacobian_linear_case():
    z = ZPoint((Fraction(3),), ex([[[5]], [[-2]]]))
    J = coefficient_jacobian(z)
    # P = x0 + 3 x1 + 5 x2 - 2 x3; columns are d/d lambda, d/d b1, d/d b2
    want = ex([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert np.all(J == want)
    assert nm.exact_rank(J) == 3


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(2, 3))
def test_jacobian_matches_central_difference(seed, n, r):
    z = random_zpoint(n, r, np.random.default_rng(seed))
    J = coefficient_jacobian(z)
    h = Fraction(1, 1024)
    for col, coord in enumerate(z.coordinates()):
        up = gen_char_poly(z.moved(coord, h)).coeffs
        down = gen_char_poly(z.moved(coord, -h)).coeffs
        # each coordinate enters the determinant with degree <= 2, so this is exact
        assert list((up - down) / (2 * h)) == list(J[:, col])


def test_tail_columns_vanish_without_their_variable():
    z = random_zpoint(3, 3, np.random.default_rng(4))
    J = coefficient_jacobian(z)
    mons = gen_char_poly(z.to_tuple()).monomials()
    for col, coord in enumerate(z.coordinates()):
        if coord[0] != "tail":
            continue
        var = 2 + coord[1]
        for row, e in enumerate(mons):
            if e[var] == 0:
                assert J[row, col] == 0


@pytest.mark.parametrize("r,n,want", [(2, 2, 5), (3, 2, 8), (3, 3, 15)])
def test_verify_dimension_examples(r, n, want):
    rep = verify_dimension(r, n, 3, 7)
    assert rep.observed_rank == want == rep.expected_rank and rep.passed
    assert rep.observed_rank <= min(rep.domain_dim, rep.ambient_dim)


def test_verify_dimension_proper_subvariety():
    rep = verify_dimension(3, 2, 3, 0)
    assert rep.ambient_dim == 10 and rep.observed_rank == 8
    assert rep.as_dict()["verdict"] == "PASS"


# --------------------------------------------------------------------------
# trace form


def test_trace_reconstruct_examples():
    E11, E22, E12 = ex([[1, 0], [0, 0]]), ex([[0, 0], [0, 1]]), ex([[0, 1], [1, 0]])
    X = trace_reconstruct([E11, E22, E12], [0, 0, 0])
    assert np.all(X == 0)
    a, b, c = Fraction(2, 3), Fraction(-5), Fraction(7, 2)
    X = trace_reconstruct([E11, E22, E12], [a, b, 2 * c])
    assert np.all(X == ex([[a, c], [c, b]]))


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_trace_reconstruct_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    basis = list(random_tuple(n, sym_dim(n) + 1, rng).matrices)
    X = random_tuple(n, 1, rng).matrices[0]
    try:
        Y = trace_reconstruct(basis, [trace_pair(S, X) for S in basis])
    except NotSpanning:
        return
    assert np.all(X == Y)


def test_trace_reconstruct_errors():
    E11, E22, E12 = ex([[1, 0], [0, 0]]), ex([[0, 0], [0, 1]]), ex([[0, 1], [1, 0]])
    with pytest.raises(NotSpanning):
        trace_reconstruct([E11, E22], [1, 2])
    with pytest.raises(InconsistentValues):
        trace_reconstruct([E11, E22, E12, E11 + E22], [1, 2, 3, 4])


def test_restrict_to_line():
    # P = x0^2 - x1^2 - x2^2 at (t, 2t, -1)
    A = SymTuple.from_matrices([ex([[1, 0], [0, 1]]), ex([[1, 0], [0, -1]]), ex([[0, 1], [1, 0]])])
    assert restrict_to_line(gen_char_poly(A), [1, 2]) == [-3, 0, -1]


# --------------------------------------------------------------------------
# recovery of the last matrix


def test_extract_linear_case():
    P = gen_char_poly(SymTuple.from_matrices([ex([[4]]), ex([[Fraction(-3, 2)]])]))
    X = extract_last_matrix(SymTuple.from_matrices([ex([[4]])]), P)
    assert X[0, 0] == Fraction(-3, 2)


def test_extract_n2_example():
    prefix = SymTuple.from_matrices([ex([[1, 0], [0, 1]]), ex([[1, 0], [0, -1]]), ex([[0, 1], [1, 0]])])
    X = ex([[2, 0], [0, 5]])
    P = gen_char_poly(SymTuple(np.concatenate([prefix.matrices, X[None]])))
    assert np.all(extract_last_matrix(prefix, P) == X)


def test_extract_not_spanning():
    prefix = SymTuple.from_matrices([ex([[1, 0], [0, 1]]), ex([[1, 0], [0, 2]])])
    P = gen_char_poly(SymTuple.from_matrices([ex([[1, 0], [0, 1]]), ex([[1, 0], [0, 2]]), ex([[1, 0], [0, 1]])]))
    with pytest.raises(NotSpanning):
        extract_last_matrix(prefix, P)


def test_extract_inconsistent_polynomial():
    prefix = SymTuple.from_matrices([ex([[1, 0], [0, 1]]), ex([[1, 0], [0, -1]]), ex([[0, 1], [1, 0]])])
    P = gen_char_poly(SymTuple(np.concatenate([prefix.matrices, ex([[2, 0], [0, 5]])[None]])))
    coeffs = P.coeffs.copy()
    coeffs[1] += 1  # x0 x1 no longer matches the prefix
    with pytest.raises(InconsistentValues):
        extract_last_matrix(prefix, GenCharPoly(P.n_vars, P.degree, coeffs))


@given(st.integers(0, 10_000), st.integers(2, 3))
def test_extract_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    prefix = random_tuple(n, sym_dim(n) - 1, rng, condition="spanning-prefix")
    X = random_tuple(n, 1, rng).matrices[0]
    P = gen_char_poly(SymTuple(np.concatenate([prefix.matrices, X[None]])))
    assert np.all(extract_last_matrix(prefix, P, seed=seed) == X)


def test_trace_sample_identity():
    rng = np.random.default_rng(3)
    prefix = random_tuple(2, 2, rng, condition="spanning-prefix")
    X = random_tuple(2, 1, rng).matrices[0]
    P = gen_char_poly(SymTuple(np.concatenate([prefix.matrices, X[None]])))
    C = ex([[2, 1], [1, 3]])
    assert trace_sample(prefix, P, C).trace == trace_pair(C, X)
