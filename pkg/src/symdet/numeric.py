"""Scalar regimes, exact linear algebra, root finding and congruence factorizations.

Two regimes are in play. Exact matrices are numpy ``object`` arrays holding
:class:`fractions.Fraction` (or ``int``) entries; approximate matrices are
``complex128`` arrays. Exact routines never look at a tolerance.
"""
from __future__ import annotations

import cmath
import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    DegeneratePencil,
    IsotropicEigenvector,
    LeadingZero,
    NoConvergence,
    RegimeMismatch,
    SingularInput,
)


class Regime(str, enum.Enum):
    EXACT = "rational"
    APPROX = "complex"


def regime_of(a: np.ndarray) -> Regime:
    if a.dtype == object:
        return Regime.EXACT
    if np.issubdtype(a.dtype, np.number):
        return Regime.APPROX
    raise RegimeMismatch(f"unsupported dtype {a.dtype}")


@dataclass(frozen=True)
class ToleranceContext:
    """Thresholds for approximate decisions; ``scale`` is supplied per call."""

    eps_eq: float = 1e-9
    eps_rank: float = 1e-10

    @classmethod
    def from_env(cls) -> "ToleranceContext":
        return cls(
            eps_eq=float(os.environ.get("SYMDET_EPS_EQ", 1e-9)),
            eps_rank=float(os.environ.get("SYMDET_EPS_RANK", 1e-10)),
        )

    def eq_tol(self, scale: float) -> float:
        return self.eps_eq * max(1.0, scale)

    def close(self, a, b, scale: float) -> bool:
        return bool(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0) <= self.eq_tol(scale))


DEFAULT_TOL = ToleranceContext.from_env()


def scale_of(*arrays) -> float:
    """Max absolute entry over the given arrays (exact entries are converted)."""
    m = 0.0
    for a in arrays:
        a = np.asarray(a)
        if a.size == 0:
            continue
        if a.dtype == object:
            m = max(m, max(abs(float(x)) for x in a.ravel()))
        else:
            m = max(m, float(np.abs(a).max()))
    return m


# --------------------------------------------------------------------------
# conversions


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise RegimeMismatch(f"cannot convert {type(x).__name__} to an exact rational")


def as_exact(a) -> np.ndarray:
    """Object array of Fractions. Floats are rejected to keep exactness honest."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_fraction(x)
    return out


def as_complex(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == object:
        return np.vectorize(complex, otypes=[np.complex128])(arr) if arr.size else arr.astype(np.complex128)
    return arr.astype(np.complex128)


def exact_identity(n: int) -> np.ndarray:
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def _require_exact(M: np.ndarray) -> None:
    if M.dtype != object:
        raise RegimeMismatch("operation requires the exact rational regime")


def _integer_rows(M: np.ndarray) -> tuple[list[list[int]], int]:
    """Scale each row by the lcm of its denominators. Returns rows and the total scale."""
    rows = []
    total = 1
    for row in M:
        fr = [to_fraction(x) for x in row]
        den = reduce(math.lcm, (f.denominator for f in fr), 1)
        rows.append([int(f * den) for f in fr])
        total *= den
    return rows, total


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place. Returns (rank, signed last pivot)."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    prev = 1
    sign = 1
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = next((i for i in range(rank, m) if rows[i][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            sign = -sign
        p = rows[rank][col]
        prow = rows[rank]
        for i in range(rank + 1, m):
            ri = rows[i]
            a = ri[col]
            for j in range(col + 1, n):
                ri[j] = (p * ri[j] - a * prow[j]) // prev
            ri[col] = 0
        prev = p
        rank += 1
    return rank, sign * prev


def exact_rank(M) -> int:
    """Rank over the rationals by Bareiss fraction-free elimination."""
    M = np.asarray(M)
    _require_exact(M)
    if M.size == 0:
        return 0
    rows, _ = _integer_rows(M)
    rank, _ = _bareiss(rows)
    return rank


def det_exact(M) -> Fraction:
    M = np.asarray(M)
    _require_exact(M)
    n = M.shape[0]
    if n == 0:
        return Fraction(1)
    rows, total = _integer_rows(M)
    rank, d = _bareiss(rows)
    if rank < n:
        return Fraction(0)
    return Fraction(d, total)


def solve_exact(M, b) -> np.ndarray | None:
    """One exact solution of ``M x = b`` (free variables set to zero), or None."""
    M = np.asarray(M)
    _require_exact(M)
    m, n = M.shape
    aug = [[to_fraction(x) for x in M[i]] + [to_fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(aug[i][n] != 0 for i in range(r, m)):
        return None
    x = np.full(n, Fraction(0), dtype=object)
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return x


def inverse_exact(M) -> np.ndarray:
    M = as_exact(M)
    n = M.shape[0]
    cols = []
    eye = exact_identity(n)
    for j in range(n):
        x = solve_exact(M, eye[:, j])
        if x is None:
            raise SingularInput("matrix is singular")
        cols.append(x)
    return np.stack(cols, axis=1)


def independent_rows(M) -> list[int]:
    """Indices of a maximal linearly independent subset of rows (greedy, in order)."""
    M = np.asarray(M)
    _require_exact(M)
    chosen: list[int] = []
    for i in range(M.shape[0]):
        if exact_rank(M[chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    return chosen


# --------------------------------------------------------------------------
# exact univariate polynomials (highest degree first, Fractions)


def poly_trim(p: Sequence[Fraction]) -> list[Fraction]:
    p = list(p)
    while len(p) > 1 and p[0] == 0:
        p.pop(0)
    return p


def poly_derivative(p: Sequence[Fraction]) -> list[Fraction]:
    d = len(p) - 1
    if d == 0:
        return [Fraction(0)]
    return [c * (d - i) for i, c in enumerate(p[:-1])]


def poly_rem(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = poly_trim(a)
    b = poly_trim(b)
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    while len(a) >= len(b) and a != [0]:
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
        a = poly_trim(a) if a else [Fraction(0)]
    return a


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = poly_trim([to_fraction(x) for x in a])
    b = poly_trim([to_fraction(x) for x in b])
    while b != [0]:
        a, b = b, poly_rem(a, b)
    return [x / a[0] for x in a] if a != [0] else a


def is_squarefree(p: Sequence[Fraction]) -> bool:
    p = poly_trim([to_fraction(x) for x in p])
    if len(p) <= 2:
        return p != [0]
    return len(poly_gcd(p, poly_derivative(p))) == 1


# --------------------------------------------------------------------------
# roots


def poly_roots(coeffs, *, maxiter: int = 500, tol: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """All complex roots of a polynomial given highest degree first (Aberth iteration)."""
    c = as_complex(np.asarray(coeffs))
    if c.ndim != 1 or c.size < 2:
        raise LeadingZero("need a polynomial of degree >= 1")
    scale = float(np.abs(c).max())
    if abs(c[0]) <= tol.eps_rank * scale:
        raise LeadingZero("leading coefficient vanishes")
    monic = c / c[0]
    n = monic.size - 1
    if not np.isfinite(monic).all():
        raise NoConvergence("non-finite coefficients")
    radius = 1.0 + float(np.abs(monic[1:]).max())
    k = np.arange(n)
    angles = 2.0 * np.pi * k / n + 0.4
    radii = radius * (1.0 + 0.01 * ((k * 7) % 11) / 11.0)
    z0 = radii * np.exp(1j * angles)
    z, _, status = kernels.aberth(monic, z0, maxiter, 4e-16)
    if status == kernels.NAN or not np.isfinite(z).all():
        raise NoConvergence("NaN during root iteration")
    mscale = max(1.0, float(np.abs(monic).max()))
    resid = np.abs(np.poly(z) - monic).max()
    if resid > 1e-8 * mscale:
        # repeated roots only converge to ~eps**(1/k); their centroid is well conditioned
        zc = _collapse_clusters(monic, z)
        rc = np.abs(np.poly(zc) - monic).max()
        if rc < resid:
            z, resid = zc, rc
    if resid > 1e-8 * mscale:
        raise NoConvergence(f"root residual {resid:.3g} after {maxiter} iterations")
    return z


def _collapse_clusters(monic: np.ndarray, z: np.ndarray, rel: float = 1e-2) -> np.ndarray:
    """Replace each cluster of k nearby roots by k copies of a refined centroid.

    The centroid is polished by Newton steps on the (k-1)-th derivative, where
    it is a simple root.
    """
    n = z.size
    tau = rel * max(1.0, float(np.abs(z).max()))
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= tau:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = z.copy()
    for members in groups.values():
        k = len(members)
        if k == 1:
            continue
        c = z[members].mean()
        q = np.polyder(monic, k - 1)
        dq = np.polyder(q)
        for _ in range(20):
            d = np.polyval(dq, c)
            if d == 0:
                break
            step = np.polyval(q, c) / d
            c -= step
            if abs(step) <= 1e-16 * max(1.0, abs(c)):
                break
        out[members] = c
    return out


def has_repeated_root(coeffs, roots, tol: ToleranceContext = DEFAULT_TOL) -> bool:
    """Whether some cluster of computed roots is numerically one multiple root.

    A cluster counts as repeated when collapsing it onto a single refined point
    still reproduces the coefficients within the root-finder residual bound.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(roots, dtype=np.complex128)
    if z.size < 2:
        return False
    monic = c / c[0]
    zc = _collapse_clusters(monic, z)
    if np.unique(zc).size == z.size:
        return False
    mscale = max(1.0, float(np.abs(monic).max()))
    return bool(np.abs(np.poly(zc) - monic).max() <= 1e-8 * mscale)


def principal_sqrt(z: complex) -> complex:
    """Square root with argument in (-pi/2, pi/2]."""
    w = cmath.sqrt(complex(z))
    if w.real < 0 or (w.real == 0 and w.imag < 0):
        w = -w
    return w


def sym_congruence_to_identity(A0, *, tol: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """A complex ``g`` with ``g.T @ A0 @ g = I`` for symmetric non-singular ``A0``."""
    A0 = np.asarray(A0)
    n = A0.shape[0]
    scale = max(scale_of(A0), 1e-300)
    if A0.dtype == object:
        if det_exact(A0) == 0:
            raise SingularInput("A0 is singular")
    S = as_complex(A0)
    d, g, status = kernels.symmetric_elimination(S, tol.eps_rank * scale)
    if status == kernels.SINGULAR or abs(np.prod(d)) <= tol.eps_rank * scale**n:
        raise SingularInput("A0 is numerically singular")
    inv_roots = np.array([1.0 / principal_sqrt(x) for x in d])
    g = g * inv_roots[None, :]
    resid = np.abs(g.T @ S @ g - np.eye(n)).max()
    if not np.isfinite(resid) or resid > 1e-8 * max(1.0, scale):
        raise SingularInput(f"congruence residual {resid:.3g} too large")
    return g


def char_poly_coeffs(S: np.ndarray) -> np.ndarray:
    """Coefficients of det(tI - S), highest degree first."""
    n = S.shape[0]
    mats = np.stack([np.eye(n, dtype=np.complex128), -as_complex(S)])
    coeffs = linear_det_coeffs(mats)
    # monomials x0^(n-k) x1^k in graded-lex order map to t^(n-k)
    return coeffs


def _tie_free(lams: np.ndarray, tol: float) -> bool:
    n = lams.size
    if n < 2:
        return True
    d = np.abs(lams[:, None] - lams[None, :])
    return bool(d[~np.eye(n, dtype=bool)].min() > tol)


def complex_symmetric_eigen(S, *, tol: ToleranceContext = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and a complex-orthogonal eigenbasis of a complex symmetric matrix.

    Requires pairwise distinct eigenvalues. Eigenvectors are normalized with
    the bilinear form ``v.T @ v = 1``.
    """
    S = as_complex(S)
    n = S.shape[0]
    scale = scale_of(S)
    lams = poly_roots(char_poly_coeffs(S), tol=tol)
    if not _tie_free(lams, tol.eq_tol(scale)):
        raise DegeneratePencil("eigenvalues collide within tolerance")
    h = np.empty((n, n), dtype=np.complex128)
    out = np.empty(n, dtype=np.complex128)
    eye = np.eye(n)
    for i, lam in enumerate(lams):
        v = kernels.null_vector(S - lam * eye)
        vv = v @ v
        if abs(vv) <= tol.eq_tol(scale) * (np.abs(v) ** 2).sum():
            raise IsotropicEigenvector(f"eigenvector {i} is isotropic")
        # bilinear Rayleigh quotient sharpens the root from the characteristic polynomial
        lam = (v @ S @ v) / vv
        v = kernels.null_vector(S - lam * eye)
        vv = v @ v
        if abs(vv) <= tol.eq_tol(scale) * (np.abs(v) ** 2).sum():
            raise IsotropicEigenvector(f"eigenvector {i} is isotropic")
        out[i] = (v @ S @ v) / vv
        h[:, i] = v / principal_sqrt(vv)
    if not _tie_free(out, tol.eq_tol(scale)):
        raise DegeneratePencil("eigenvalues collide within tolerance")
    bound = 1e-7 * max(1.0, scale)
    if np.abs(h.T @ h - eye).max() > bound or np.abs(h.T @ S @ h - np.diag(out)).max() > bound:
        raise DegeneratePencil("eigenbasis residual exceeds tolerance")
    return out, h


# --------------------------------------------------------------------------
# determinant of a linear matrix pencil, expanded as a polynomial


@lru_cache(maxsize=None)
def monomials(n_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``degree``, graded-lex with x0 > x1 > ..."""
    if n_vars == 1:
        return ((degree,),)
    out = []
    for e0 in range(degree, -1, -1):
        for rest in monomials(n_vars - 1, degree - e0):
            out.append((e0,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n_vars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(monomials(n_vars, degree))}


@lru_cache(maxsize=None)
def _shift_maps(n_vars: int, degree: int) -> tuple[np.ndarray, ...]:
    """For each variable, the index in degree+1 of (monomial * x_i)."""
    target = monomial_index(n_vars, degree + 1)
    maps = []
    for i in range(n_vars):
        idx = []
        for e in monomials(n_vars, degree):
            f = list(e)
            f[i] += 1
            idx.append(target[tuple(f)])
        maps.append(np.array(idx, dtype=np.intp))
    return tuple(maps)


def _is_zero(x) -> bool:
    if isinstance(x, DualScalar):
        return x.primal == 0 and x.tangent == 0
    return x == 0


def linear_det_coeffs(mats: np.ndarray) -> np.ndarray:
    """Coefficients of det(sum_i x_i mats[i]) over ``monomials(k, n)``.

    Memoized Laplace expansion over subsets of columns: rows are consumed in
    order and each partial minor is a homogeneous polynomial. Works for any
    commutative scalar type numpy can hold (Fractions, ints, complex, duals).
    """
    k, n, _ = mats.shape
    dtype = mats.dtype
    zero = 0 if dtype == object else 0.0
    one = np.ones(1, dtype=dtype)
    layer: dict[int, np.ndarray] = {0: one}
    for row in range(n):
        deg = row
        maps = _shift_maps(k, deg)
        size = len(monomials(k, deg + 1))
        nxt: dict[int, np.ndarray] = {}
        for mask, poly in layer.items():
            for col in range(n):
                bit = 1 << col
                if mask & bit:
                    continue
                form = mats[:, row, col]
                nz = [i for i in range(k) if not _is_zero(form[i])]
                if not nz:
                    continue
                above = bin(mask >> (col + 1)).count("1")
                acc = nxt.get(mask | bit)
                if acc is None:
                    acc = np.full(size, zero, dtype=dtype)
                    nxt[mask | bit] = acc
                for i in nz:
                    term = poly * form[i]
                    if above % 2:
                        acc[maps[i]] -= term
                    else:
                        acc[maps[i]] += term
        layer = nxt
        if not layer:
            return np.full(len(monomials(k, n)), zero, dtype=dtype)
    return layer[(1 << n) - 1]


# --------------------------------------------------------------------------
# forward-mode dual numbers


class DualScalar:
    """``primal + tangent * eps`` with ``eps**2 = 0``."""

    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent=0):
        self.primal = primal
        self.tangent = tangent

    @staticmethod
    def _lift(other):
        if isinstance(other, DualScalar):
            return other
        if isinstance(other, (int, float, complex, Fraction, np.number)):
            return DualScalar(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(self.primal + o.primal, self.tangent + o.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(self.primal - o.primal, self.tangent - o.tangent)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return DualScalar(-self.primal, -self.tangent)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(self.primal * o.primal, self.primal * o.tangent + self.tangent * o.primal)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        q = self.primal / o.primal
        return DualScalar(q, (self.tangent - q * o.tangent) / o.primal)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = DualScalar(1, 0)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.primal == o.primal and self.tangent == o.tangent

    def __hash__(self):
        return hash((self.primal, self.tangent))

    def __repr__(self):
        return f"DualScalar({self.primal!r}, {self.tangent!r})"
