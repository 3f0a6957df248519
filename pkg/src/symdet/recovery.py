"""Exact-regime geometry: the last matrix of a spanning presentation is
recovered from the hypersurface through trace pairings, and the dimension of
the symmetric determinantal locus is certified by Jacobian rank."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import numeric as nm
from .errors import DegenerateSampling, InconsistentValues, NotSpanning, RegimeMismatch
from .numeric import DualScalar, Regime
from .pencil import GenCharPoly, SymTuple, gen_char_poly, sym_basis_matrix


def sym_dim(n: int) -> int:
    return n * (n + 1) // 2


def expected_sdhyp_dim(r: int, n: int) -> int:
    """(r - 1) n(n+1)/2 + n."""
    if r < 2 or n < 1:
        raise ValueError("need r >= 2 and n >= 1")
    return (r - 1) * sym_dim(n) + n


def mu_plane(n: int) -> int:
    """Number of inequivalent symmetric presentations of a general plane curve of degree n."""
    if n < 2:
        raise ValueError("need n >= 2")
    e = (n - 1) * (n - 2) // 2
    base = 2**e * (2**e + 1)
    return base - 1 if n >= 11 and n % 8 in (3, 5) else base


# --------------------------------------------------------------------------
# points of the reduced-tuple variety and the differential of the coefficient map


@dataclass(frozen=True, eq=False)
class ZPoint:
    """Exact reduced tuple (I, diag(lambdas), tail...)."""

    lambdas: tuple[Fraction, ...]
    tail: np.ndarray  # (r-1, n, n) object array of Fractions

    def __post_init__(self):
        if len(set(self.lambdas)) != len(self.lambdas):
            raise ValueError("lambdas must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def r(self) -> int:
        return self.tail.shape[0] + 1

    @property
    def dim(self) -> int:
        return (self.r - 1) * sym_dim(self.n) + self.n

    def to_tuple(self) -> SymTuple:
        n = self.n
        D = np.full((n, n), Fraction(0), dtype=object)
        for i, v in enumerate(self.lambdas):
            D[i, i] = v
        return SymTuple(np.concatenate([nm.exact_identity(n)[None], D[None], self.tail]))

    def coordinates(self) -> list[tuple]:
        """Coordinate labels: ('lam', i) then ('tail', k, i, j) for the upper triangles."""
        coords: list[tuple] = [("lam", i) for i in range(self.n)]
        for k in range(self.tail.shape[0]):
            for i in range(self.n):
                for j in range(i, self.n):
                    coords.append(("tail", k, i, j))
        return coords

    def moved(self, coord: tuple, step) -> SymTuple:
        """The tuple with one coordinate shifted by ``step`` (both mirrored entries)."""
        mats = self.to_tuple().matrices.copy()
        if coord[0] == "lam":
            i = coord[1]
            mats[1, i, i] = mats[1, i, i] + step
        else:
            _, k, i, j = coord
            mats[2 + k, i, j] = mats[2 + k, i, j] + step
            if i != j:
                mats[2 + k, j, i] = mats[2 + k, j, i] + step
        return SymTuple(mats)


def random_zpoint(n: int, r: int, rng) -> ZPoint:
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    lams = tuple(Fraction(int(v)) for v in rng.choice(np.arange(-9, 10), size=n, replace=False))
    tail = np.empty((r - 1, n, n), dtype=object)
    for k in range(r - 1):
        vals = rng.integers(-9, 10, size=sym_dim(n))
        it = iter(vals)
        for i in range(n):
            for j in range(i, n):
                tail[k, i, j] = tail[k, j, i] = Fraction(int(next(it)))
    return ZPoint(lams, tail)


def coefficient_jacobian(z: ZPoint) -> np.ndarray:
    """Exact Jacobian of the coefficients of P_(I, diag(lambda), B...) in the Z coordinates.

    Rows follow the graded-lex monomial order, columns follow ``z.coordinates()``.
    One forward dual-number pass through the determinant expansion per column.
    """
    base = z.to_tuple().matrices
    cols = []
    for coord in z.coordinates():
        duals = np.empty(base.shape, dtype=object)
        for idx, x in np.ndenumerate(base):
            duals[idx] = DualScalar(x, 0)
        if coord[0] == "lam":
            i = coord[1]
            duals[1, i, i] = DualScalar(base[1, i, i], 1)
        else:
            _, k, i, j = coord
            duals[2 + k, i, j] = DualScalar(base[2 + k, i, j], 1)
            duals[2 + k, j, i] = DualScalar(base[2 + k, j, i], 1)
        coeffs = nm.linear_det_coeffs(duals)
        cols.append([nm.to_fraction(c.tangent) if isinstance(c, DualScalar) else Fraction(0)
                     for c in coeffs])
    return np.array(cols, dtype=object).T


@dataclass
class RankReport:
    r: int
    n: int
    expected_rank: int
    observed_rank: int
    trials: int
    seeds: list
    ambient_dim: int
    domain_dim: int
    ranks: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.observed_rank == self.expected_rank

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "expected_rank": self.expected_rank,
            "observed_rank": self.observed_rank,
            "per_trial_ranks": self.ranks,
            "trials": self.trials,
            "seeds": self.seeds,
            "ambient_dim": self.ambient_dim,
            "projective_ambient_dim": self.ambient_dim - 1,
            "domain_dim": self.domain_dim,
            "verdict": "PASS" if self.passed else "FAIL",
            # a rank at one point bounds the image dimension from below; dim Z bounds it above
            "lower_bound_certified": self.observed_rank,
            "upper_bound_from_domain": self.domain_dim,
        }


def verify_dimension(r: int, n: int, trials: int, seed: int) -> RankReport:
    """Max exact Jacobian rank over ``trials`` random integer points of Z_(r,n)."""
    if r < 2 or n < 2 or trials < 1:
        raise ValueError("need r >= 2, n >= 2, trials >= 1")
    ranks = []
    seeds = []
    for t in range(trials):
        seeds.append([seed, t])
        z = random_zpoint(n, r, np.random.default_rng([seed, t]))
        ranks.append(nm.exact_rank(coefficient_jacobian(z)))
    return RankReport(
        r=r, n=n,
        expected_rank=expected_sdhyp_dim(r, n),
        observed_rank=max(ranks),
        trials=trials,
        seeds=seeds,
        ambient_dim=math.comb(n + r, r),
        domain_dim=(r - 1) * sym_dim(n) + n,
        ranks=ranks,
    )


# --------------------------------------------------------------------------
# trace form reconstruction


def trace_pair(X: np.ndarray, Y: np.ndarray):
    """tr(XY) for symmetric X, Y."""
    return sum(X[i, j] * Y[j, i] for i in range(X.shape[0]) for j in range(X.shape[0]))


def trace_reconstruct(basis: Sequence[np.ndarray], values: Sequence) -> np.ndarray:
    """The symmetric X with tr(basis[i] X) = values[i] for all i (exact)."""
    basis = [nm.as_exact(b) for b in basis]
    values = [nm.to_fraction(v) for v in values]
    if len(basis) != len(values) or not basis:
        raise ValueError("basis and values must be non-empty and equally long")
    n = basis[0].shape[0]
    N = sym_dim(n)
    flat = sym_basis_matrix(basis)
    if len(basis) < N or nm.exact_rank(flat) < N:
        raise NotSpanning("basis does not span the symmetric matrices")
    idx = nm.independent_rows(flat)
    sub = [basis[i] for i in idx]
    gram = np.array([[trace_pair(a, b) for b in sub] for a in sub], dtype=object)
    y = nm.solve_exact(gram, [values[i] for i in idx])
    if y is None:  # pragma: no cover - the trace form is non-degenerate
        raise NotSpanning("singular trace-form Gram matrix")
    X = np.full((n, n), Fraction(0), dtype=object)
    for c, S in zip(y, sub):
        X = X + c * S
    if any(trace_pair(S, X) != v for S, v in zip(basis, values)):
        raise InconsistentValues("values are not the trace pairings of any symmetric matrix")
    return X


# --------------------------------------------------------------------------
# recovery of the last matrix from the hypersurface


def restrict_to_line(P: GenCharPoly, c: Sequence) -> list[Fraction]:
    """p(t) = P(t c_0, ..., t c_m, -1), highest degree first (degree P.degree)."""
    n = P.degree
    out = [Fraction(0)] * (n + 1)
    for e, coef in zip(P.monomials(), P.coeffs):
        if coef == 0:
            continue
        term = coef * (-1) ** e[-1]
        for ci, ei in zip(c, e[:-1]):
            if ei:
                term *= ci**ei
        out[e[-1]] += term  # power of t is n - e[-1]; index from the top is e[-1]
    return out


@dataclass(frozen=True)
class TraceSample:
    C: np.ndarray
    expansion: np.ndarray
    line_poly: list
    trace: Fraction


def trace_sample(prefix: SymTuple, P: GenCharPoly, C: np.ndarray) -> TraceSample:
    """tr(C X) read off the restriction of P to the line through C^-1."""
    n = prefix.n
    Cinv = nm.inverse_exact(C)
    flat = sym_basis_matrix(list(prefix.matrices))
    iu = np.triu_indices(n)
    coeffs = nm.solve_exact(flat.T, list(Cinv[iu]))
    if coeffs is None:
        raise NotSpanning("C^-1 is not in the span of the prefix")
    p = restrict_to_line(P, coeffs)
    # p(t) = det(t C^-1 - X) = det(C^-1) det(tI - CX): the t^(n-1) term is -tr(CX)/det(C)
    tr = -p[1] * nm.det_exact(C)
    return TraceSample(C, coeffs, p, tr)


def extract_last_matrix(prefix: SymTuple, P: GenCharPoly, seed: int = 0,
                        max_rejections: int = 200) -> np.ndarray:
    """The symmetric X with P = gen_char_poly(prefix + (X,)), for a spanning exact prefix."""
    if prefix.regime is not Regime.EXACT or P.regime is not Regime.EXACT:
        raise RegimeMismatch("recovery is exact-regime only")
    n, m1 = prefix.n, prefix.r + 1
    N = sym_dim(n)
    if P.n_vars != m1 + 1 or P.degree != n:
        raise ValueError("P must have one more variable than the prefix has matrices")
    flat = sym_basis_matrix(list(prefix.matrices))
    if m1 < N or nm.exact_rank(flat) < N:
        raise NotSpanning(f"prefix of {m1} matrices does not span Symm_{n}")
    rng = np.random.default_rng([seed, n, m1])
    samples: list[TraceSample] = []
    basis_rank = 0
    rejections = 0
    while basis_rank < N:
        w = rng.integers(-5, 6, size=m1)
        C = sum((Fraction(int(wi)) * A for wi, A in zip(w, prefix.matrices)),
                np.full((n, n), Fraction(0), dtype=object))
        C = nm.as_exact(C)
        if nm.det_exact(C) == 0:
            rejections += 1
            if rejections > max_rejections:
                raise DegenerateSampling("could not sample invertible combinations of the prefix")
            continue
        trial = samples + [trace_sample(prefix, P, C)]
        rank = nm.exact_rank(sym_basis_matrix([s.C for s in trial]))
        if rank > basis_rank:
            samples = trial
            basis_rank = rank
        else:
            rejections += 1
            if rejections > max_rejections:
                raise DegenerateSampling("sampled matrices do not span")
    X = trace_reconstruct([s.C for s in samples], [s.trace for s in samples])
    full = SymTuple(np.concatenate([prefix.matrices, X[None]]))
    if gen_char_poly(full) != P:
        raise InconsistentValues("P is not the characteristic polynomial of any extension of the prefix")
    return X
