"""Symmetric matrix tuples and their generalized characteristic polynomials."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import numeric as nm
from .errors import (
    BadIndexSet,
    RegimeMismatch,
    RejectionCapExceeded,
    SymDetError,
    ZeroPolynomial,
)
from .numeric import DEFAULT_TOL, Regime, ToleranceContext


@dataclass(frozen=True, eq=False)
class SymTuple:
    """An (r+1)-tuple of symmetric n x n matrices, stored as an (r+1, n, n) array."""

    matrices: np.ndarray

    def __post_init__(self):
        m = self.matrices
        if m.ndim != 3 or m.shape[1] != m.shape[2] or m.shape[0] < 1:
            raise ValueError(f"expected shape (r+1, n, n), got {m.shape}")
        if m.dtype == object:
            sym = all(m[k, i, j] == m[k, j, i] for k in range(m.shape[0])
                      for i in range(m.shape[1]) for j in range(i))
        else:
            sym = np.allclose(m, np.swapaxes(m, 1, 2), rtol=0,
                              atol=DEFAULT_TOL.eq_tol(nm.scale_of(m)))
        if not sym:
            raise ValueError("matrices must be symmetric")
        m.setflags(write=False)

    @classmethod
    def from_matrices(cls, mats: Iterable, regime: Regime | str | None = None) -> "SymTuple":
        mats = list(mats)
        arr = np.asarray(mats)
        if regime is None:
            regime = Regime.APPROX if np.issubdtype(arr.dtype, np.inexact) else Regime.EXACT
        regime = Regime(regime)
        if regime is Regime.EXACT:
            arr = nm.as_exact(np.array(mats, dtype=object))
        else:
            arr = nm.as_complex(np.array(mats))
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1, 1)
        return cls(arr)

    @classmethod
    def from_upper(cls, n: int, triangles: Sequence[Sequence], regime: Regime | str) -> "SymTuple":
        regime = Regime(regime)
        dtype = object if regime is Regime.EXACT else np.complex128
        arr = np.zeros((len(triangles), n, n), dtype=dtype)
        iu = np.triu_indices(n)
        for k, tri in enumerate(triangles):
            vals = nm.as_exact(list(tri)) if regime is Regime.EXACT else nm.as_complex(np.asarray(tri))
            arr[k][iu] = vals
            arr[k].T[iu] = vals
        return cls(arr)

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    @property
    def r(self) -> int:
        return self.matrices.shape[0] - 1

    @property
    def regime(self) -> Regime:
        return nm.regime_of(self.matrices)

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def __getitem__(self, i):
        return self.matrices[i]

    def upper(self) -> list[list]:
        iu = np.triu_indices(self.n)
        return [list(m[iu]) for m in self.matrices]

    def to_complex(self) -> "SymTuple":
        return self if self.regime is Regime.APPROX else SymTuple(nm.as_complex(self.matrices))

    def scale(self) -> float:
        return nm.scale_of(self.matrices)

    def fingerprint(self) -> str:
        h = hashlib.sha256(f"{self.regime.value}:{self.n}:{self.r}".encode())
        for x in self.matrices.ravel():
            h.update(repr(x).encode())
        return h.hexdigest()[:16]

    def __repr__(self) -> str:
        return f"SymTuple(n={self.n}, r={self.r}, regime={self.regime.value})"


def congruence(A: SymTuple, g) -> SymTuple:
    """The tuple (g^T A_i g)_i. Exact if both A and g are exact."""
    g = np.asarray(g)
    if A.regime is Regime.EXACT and g.dtype == object:
        mats = np.stack([g.T @ M @ g for M in A.matrices])
        return SymTuple(nm.as_exact(mats))
    gc = nm.as_complex(g)
    mats = np.einsum("ji,kjl,lm->kim", gc, nm.as_complex(A.matrices), gc)
    # restore exact symmetry lost to rounding
    return SymTuple((mats + np.swapaxes(mats, 1, 2)) / 2)


# --------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True, eq=False)
class GenCharPoly:
    """Homogeneous polynomial of degree ``degree`` in ``n_vars`` variables.

    ``coeffs[i]`` multiplies the monomial ``monomials()[i]`` (graded-lex, x0 first).
    """

    n_vars: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != math.comb(self.n_vars + self.degree - 1, self.degree):
            raise ValueError("coefficient vector has the wrong length")

    @property
    def regime(self) -> Regime:
        return nm.regime_of(self.coeffs)

    def monomials(self) -> tuple[tuple[int, ...], ...]:
        return nm.monomials(self.n_vars, self.degree)

    def as_dict(self) -> dict[tuple[int, ...], object]:
        return {e: c for e, c in zip(self.monomials(), self.coeffs) if c != 0}

    def coeff(self, exps: Sequence[int]):
        return self.coeffs[nm.monomial_index(self.n_vars, self.degree)[tuple(exps)]]

    def is_zero(self, tol: ToleranceContext = DEFAULT_TOL) -> bool:
        if self.regime is Regime.EXACT:
            return all(c == 0 for c in self.coeffs)
        return bool(np.abs(self.coeffs).max() <= tol.eps_rank)

    def __call__(self, x: Sequence):
        """Evaluate at a point by summing monomials."""
        if len(x) != self.n_vars:
            raise ValueError("point has the wrong number of coordinates")
        total = 0
        for e, c in zip(self.monomials(), self.coeffs):
            if c == 0:
                continue
            term = c
            for xi, ei in zip(x, e):
                if ei:
                    term = term * xi**ei
            total = total + term
        return total

    def __eq__(self, other):
        if not isinstance(other, GenCharPoly):
            return NotImplemented
        return (self.n_vars == other.n_vars and self.degree == other.degree
                and bool(np.all(self.coeffs == other.coeffs)))

    def __mul__(self, c):
        return GenCharPoly(self.n_vars, self.degree, self.coeffs * c)

    __rmul__ = __mul__

    def substitute_zero(self, keep: Sequence[int]) -> "GenCharPoly":
        """Set every variable outside ``keep`` to zero; remaining variables keep their order."""
        keep = sorted(keep)
        dropped = [i for i in range(self.n_vars) if i not in keep]
        idx = nm.monomial_index(len(keep), self.degree)
        dtype = self.coeffs.dtype
        out = np.full(len(idx), Fraction(0) if dtype == object else 0, dtype=dtype)
        for e, c in zip(self.monomials(), self.coeffs):
            if any(e[i] for i in dropped):
                continue
            out[idx[tuple(e[i] for i in keep)]] = c
        return GenCharPoly(len(keep), self.degree, out)

    def to_text(self) -> str:
        terms = []
        for e, c in zip(self.monomials(), self.coeffs):
            if c == 0:
                continue
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            terms.append((c, mono))
        if not terms:
            return "0"
        out = ""
        for c, mono in terms:
            if isinstance(c, Fraction):
                neg = c < 0
                mag = -c if neg else c
                body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else f"{mag}")
            else:
                neg = False
                body = f"({c})*{mono}" if mono else f"({c})"
            if not out:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """A GenCharPoly scaled so its first nonzero graded-lex coefficient is 1."""

    poly: GenCharPoly

    @classmethod
    def of(cls, P: GenCharPoly, tol: ToleranceContext = DEFAULT_TOL) -> "Hypersurface":
        lead = _first_nonzero(P, tol)
        if lead is None:
            raise ZeroPolynomial("the zero polynomial defines no hypersurface")
        c = P.coeffs[lead]
        return cls(GenCharPoly(P.n_vars, P.degree, P.coeffs / c if P.regime is Regime.APPROX
                               else np.array([x / c for x in P.coeffs], dtype=object)))

    def equals(self, other: "Hypersurface", tol: ToleranceContext = DEFAULT_TOL) -> bool:
        a, b = self.poly, other.poly
        if (a.n_vars, a.degree) != (b.n_vars, b.degree):
            return False
        if a.regime is Regime.EXACT and b.regime is Regime.EXACT:
            return a == b
        return bool(np.abs(nm.as_complex(a.coeffs) - nm.as_complex(b.coeffs)).max() <= tol.eps_eq)


def _first_nonzero(P: GenCharPoly, tol: ToleranceContext) -> int | None:
    if P.regime is Regime.EXACT:
        return next((i for i, c in enumerate(P.coeffs) if c != 0), None)
    mags = np.abs(P.coeffs)
    thresh = tol.eps_eq * max(1.0, float(mags.max(initial=0.0)))
    hits = np.nonzero(mags > thresh)[0]
    return int(hits[0]) if hits.size else None


def gen_char_poly(A: SymTuple) -> GenCharPoly:
    """Coefficients of det(x0 A0 + ... + xr Ar).

    Exact tuples are cleared to a common integer denominator first so the
    expansion runs on Python ints; the result is exact either way.
    """
    mats = A.matrices
    k, n = A.r + 1, A.n
    if A.regime is Regime.EXACT:
        den = 1
        for x in mats.ravel():
            den = math.lcm(den, x.denominator)
        ints = np.empty(mats.shape, dtype=object)
        for idx, x in np.ndenumerate(mats):
            ints[idx] = int(x * den)
        raw = nm.linear_det_coeffs(ints)
        scale = Fraction(1, den**n)
        coeffs = np.array([Fraction(int(c)) * scale for c in raw], dtype=object)
    else:
        coeffs = nm.linear_det_coeffs(mats)
    return GenCharPoly(k, n, coeffs)


def eval_pencil(A: SymTuple, x: Sequence):
    """det(sum x_i A_i) at a point, by elimination."""
    if len(x) != A.r + 1:
        raise ValueError("point has the wrong number of coordinates")
    if A.regime is Regime.EXACT and all(not isinstance(v, (float, complex)) for v in x):
        xs = [nm.to_fraction(v) for v in x]
        M = sum((xi * Ai for xi, Ai in zip(xs, A.matrices)), np.zeros((A.n, A.n), dtype=object))
        return nm.det_exact(nm.as_exact(M))
    M = np.tensordot(nm.as_complex(np.asarray(x, dtype=object) if A.regime is Regime.EXACT else np.asarray(x)),
                     nm.as_complex(A.matrices), axes=1)
    return complex(np.linalg.det(M))


def same_hypersurface(P: GenCharPoly, Q: GenCharPoly, tol: ToleranceContext = DEFAULT_TOL):
    """The scalar c with Q = c*P, or None if the polynomials are not proportional."""
    if (P.n_vars, P.degree) != (Q.n_vars, Q.degree):
        raise ValueError("polynomials live in different spaces")
    ip = _first_nonzero(P, tol)
    iq = _first_nonzero(Q, tol)
    if ip is None or iq is None:
        raise ZeroPolynomial("P_A is identically zero")
    if ip != iq:
        return None
    if P.regime is Regime.EXACT and Q.regime is Regime.EXACT:
        c = Q.coeffs[iq] / P.coeffs[ip]
        return c if all(q == c * p for p, q in zip(P.coeffs, Q.coeffs)) else None
    p, q = nm.as_complex(P.coeffs), nm.as_complex(Q.coeffs)
    c = q[iq] / p[ip]
    scale = max(1.0, float(np.abs(q).max()))
    return complex(c) if np.abs(q - c * p).max() <= tol.eps_eq * scale else None


def pencil_poly(A: SymTuple) -> list:
    """f(t) = det(t A0 - A1), highest degree first."""
    sub = SymTuple(np.stack([A.matrices[0], -A.matrices[1]]))
    P = gen_char_poly(sub)
    # monomials of (x0, x1) in graded-lex order are x0^n, x0^(n-1) x1, ...; x1 = 1
    return list(P.coeffs)


def in_U(A: SymTuple, tol: ToleranceContext = DEFAULT_TOL) -> bool:
    """A0 non-singular and det(t A0 - A1) has n distinct roots."""
    if A.r < 1:
        return False
    if A.regime is Regime.EXACT:
        if nm.det_exact(A.matrices[0]) == 0:
            return False
        return nm.is_squarefree(pencil_poly(A))
    scale = A.scale()
    if abs(np.linalg.det(A.matrices[0])) <= tol.eps_rank * max(1.0, scale) ** A.n:
        return False
    f = np.asarray(pencil_poly(A))
    if A.n == 1:
        return True
    try:
        roots = nm.poly_roots(f, tol=tol)
    except SymDetError:
        return False
    if nm.has_repeated_root(f, roots, tol):
        return False
    d = np.abs(roots[:, None] - roots[None, :])[~np.eye(A.n, dtype=bool)]
    return bool(d.min() > tol.eq_tol(scale))


def slice_tuple(A: SymTuple, keep: Iterable[int]) -> SymTuple:
    """Sub-tuple (A_i) for i in ``keep``, ascending. ``keep`` must contain 0 and 1."""
    keep = sorted(set(keep))
    if len(keep) < 2 or 0 not in keep or 1 not in keep or keep[-1] > A.r or keep[0] < 0:
        raise BadIndexSet(f"bad index set {keep} for r={A.r}")
    return SymTuple(A.matrices[keep].copy())


# --------------------------------------------------------------------------
# random generation

CONDITIONS = ("any", "in_U", "reduced", "spanning-prefix")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_sym(rng: np.random.Generator, n: int, regime: Regime):
    iu = np.triu_indices(n)
    if regime is Regime.EXACT:
        vals = rng.integers(-9, 10, size=len(iu[0]))
        M = np.full((n, n), Fraction(0), dtype=object)
        for (i, j), v in zip(zip(*iu), vals):
            M[i, j] = M[j, i] = Fraction(int(v))
        return M
    vals = rng.standard_normal(len(iu[0]))
    M = np.zeros((n, n), dtype=np.complex128)
    M[iu] = vals
    M.T[iu] = vals
    return M


def sym_basis_matrix(mats) -> np.ndarray:
    """Rows are the upper triangles of the given symmetric matrices."""
    mats = list(mats)
    n = mats[0].shape[0]
    iu = np.triu_indices(n)
    return np.array([m[iu] for m in mats], dtype=mats[0].dtype)


def random_tuple(n: int, r: int, seed, regime: Regime | str = Regime.EXACT,
                 condition: str = "any", max_tries: int = 1000) -> SymTuple:
    """Seeded random symmetric tuple satisfying ``condition``."""
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    regime = Regime(regime)
    rng = _rng(seed)
    if condition == "reduced":
        if regime is Regime.EXACT:
            if n > 19:
                raise RejectionCapExceeded("not enough distinct integers in [-9, 9]")
            lams = [Fraction(int(v)) for v in rng.choice(np.arange(-9, 10), size=n, replace=False)]
            D = np.full((n, n), Fraction(0), dtype=object)
            for i, v in enumerate(lams):
                D[i, i] = v
            mats = [nm.exact_identity(n), D]
        else:
            mats = [np.eye(n, dtype=np.complex128), np.diag(rng.standard_normal(n)).astype(np.complex128)]
        mats += [_random_sym(rng, n, regime) for _ in range(r - 1)]
        return SymTuple(np.stack(mats))
    N = n * (n + 1) // 2
    if condition == "spanning-prefix" and r + 1 < N:
        raise RejectionCapExceeded(f"need r+1 >= {N} matrices to span Symm_{n}")
    for _ in range(max_tries):
        A = SymTuple(np.stack([_random_sym(rng, n, regime) for _ in range(r + 1)]))
        if condition == "any":
            return A
        if not in_U(A):
            continue
        if condition == "spanning-prefix":
            B = sym_basis_matrix(A.matrices[:N])
            if B.dtype != object:
                # rank test is exact; approximate draws are checked on their real parts
                B = nm.as_exact(np.vectorize(lambda z: Fraction(z.real))(B))
            if nm.exact_rank(B) < N:
                continue
        return A
    raise RejectionCapExceeded(f"no {condition} tuple after {max_tries} draws")


def random_invertible(n: int, rng, lo: int = -9, hi: int = 9) -> np.ndarray:
    """Exact random integer matrix with nonzero determinant."""
    rng = _rng(rng)
    for _ in range(1000):
        g = nm.as_exact(rng.integers(lo, hi + 1, size=(n, n)).tolist())
        if nm.det_exact(g) != 0:
            return g
    raise RejectionCapExceeded("no invertible matrix found")


def substitution_matches(A: SymTuple, keep: Sequence[int]) -> bool:
    """gen_char_poly(slice(A, keep)) equals P_A with the other variables zeroed."""
    if A.regime is not Regime.EXACT:
        raise RegimeMismatch("exact regime only")
    return gen_char_poly(slice_tuple(A, keep)) == gen_char_poly(A).substitute_zero(keep)
