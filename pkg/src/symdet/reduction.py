"""Reduction to (I, diag(lambda), B2, ..., Br), canonical forms under signed
permutations, congruence-equivalence decisions and orbit enumeration."""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import numeric as nm
from .errors import AmbiguousSigns, DegeneratePencil, NotInU, WitnessResidualError
from .numeric import DEFAULT_TOL, ToleranceContext
from .pencil import SymTuple, congruence, in_U

WITNESS_RTOL = 1e-7


@dataclass(frozen=True, eq=False)
class ReducedTuple:
    """A tuple (I, diag(lambdas), tail[0], ..., tail[r-2]) in the complex regime."""

    lambdas: np.ndarray
    tail: np.ndarray

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=np.complex128)
        tail = np.asarray(self.tail, dtype=np.complex128)
        n = lams.shape[0]
        if tail.size == 0:
            tail = tail.reshape(0, n, n)
        if tail.ndim != 3 or tail.shape[1:] != (n, n):
            raise ValueError("tail must have shape (r-1, n, n)")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "tail", tail)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]

    @property
    def r(self) -> int:
        return self.tail.shape[0] + 1

    def scale(self) -> float:
        return nm.scale_of(self.lambdas, self.tail)

    def to_tuple(self) -> SymTuple:
        n = self.n
        mats = np.concatenate([np.eye(n)[None], np.diag(self.lambdas)[None], self.tail])
        return SymTuple(mats.astype(np.complex128))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.lambdas, self.tail.ravel()])

    def close_to(self, other: "ReducedTuple", tol: ToleranceContext = DEFAULT_TOL) -> bool:
        if (self.n, self.r) != (other.n, other.r):
            return False
        scale = max(self.scale(), other.scale())
        return tol.close(self.flat(), other.flat(), scale)

    def check_distinct(self, tol: ToleranceContext = DEFAULT_TOL) -> None:
        if self.n > 1:
            d = np.abs(self.lambdas[:, None] - self.lambdas[None, :])[~np.eye(self.n, dtype=bool)]
            if d.min() <= tol.eq_tol(self.scale()):
                raise DegeneratePencil("eigenvalues of the reduced tuple collide")


@dataclass(frozen=True, eq=False)
class CongruenceWitness:
    """``g.T @ source_i @ g`` reproduces ``target_i`` for every i."""

    g: np.ndarray
    source: str
    target: str
    residual: float = field(default=float("nan"))

    def verify(self, source: SymTuple, target: SymTuple, rtol: float = WITNESS_RTOL) -> float:
        """Recompute the residual from scratch; raise if it exceeds the bound."""
        res = witness_residual(self.g, source, target)
        if res > rtol * max(1.0, source.scale(), target.scale()):
            raise WitnessResidualError(f"witness residual {res:.3g}")
        return res


def witness_residual(g, source: SymTuple, target: SymTuple) -> float:
    moved = congruence(source.to_complex(), g).matrices
    return float(np.abs(moved - nm.as_complex(target.matrices)).max())


# --------------------------------------------------------------------------
# the hyperoctahedral group


@dataclass(frozen=True)
class HnElement:
    """Signed permutation whose matrix has column i equal to signs[i] * e_perm[i]."""

    signs: tuple[int, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.signs) != len(self.perm):
            raise ValueError("not a signed permutation")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def identity(cls, n: int) -> "HnElement":
        return cls((1,) * n, tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def matrix(self, dtype=np.complex128) -> np.ndarray:
        M = np.zeros((self.n, self.n), dtype=dtype)
        for i, (s, p) in enumerate(zip(self.signs, self.perm)):
            M[p, i] = s
        return M

    def compose(self, other: "HnElement") -> "HnElement":
        """``self ∘ other``: acting by the result equals acting by ``other`` then ``self``."""
        perm = tuple(other.perm[p] for p in self.perm)
        signs = tuple(s * other.signs[p] for s, p in zip(self.signs, self.perm))
        return HnElement(signs, perm)

    __matmul__ = compose

    def inverse(self) -> "HnElement":
        n = self.n
        perm = [0] * n
        signs = [1] * n
        for i, p in enumerate(self.perm):
            perm[p] = i
            signs[p] = self.signs[i]
        return HnElement(tuple(signs), tuple(perm))


def hn_elements(n: int):
    """All 2^n n! elements, signs-major lexicographic order starting at the identity."""
    for signs in itertools.product((1, -1), repeat=n):
        for perm in itertools.permutations(range(n)):
            yield HnElement(signs, perm)


def hn_act(h: HnElement, R: ReducedTuple) -> ReducedTuple:
    """Congruence of R by the signed permutation matrix of h."""
    if h.n != R.n:
        raise ValueError("size mismatch")
    p = np.array(h.perm)
    s = np.array(h.signs, dtype=float)
    tail = R.tail[:, p][:, :, p] * np.outer(s, s)[None]
    return ReducedTuple(R.lambdas[p], tail)


# --------------------------------------------------------------------------
# reduction


def reduce(A: SymTuple, tol: ToleranceContext = DEFAULT_TOL) -> tuple[ReducedTuple, CongruenceWitness]:
    """Congruence-reduce a tuple in U_(r,n); returns the reduced tuple and its witness."""
    if not in_U(A, tol):
        raise NotInU("A")
    Ac = A.to_complex()
    g1 = nm.sym_congruence_to_identity(A.matrices[0], tol=tol)
    S = g1.T @ Ac.matrices[1] @ g1
    S = (S + S.T) / 2
    lams, h = nm.complex_symmetric_eigen(S, tol=tol)
    g = g1 @ h
    moved = congruence(Ac, g).matrices
    R = ReducedTuple(lams, moved[2:])
    R.check_distinct(tol)
    target = R.to_tuple()
    res = witness_residual(g, Ac, target)
    if res > WITNESS_RTOL * max(1.0, Ac.scale(), target.scale()):
        raise WitnessResidualError(f"reduction residual {res:.3g}")
    return R, CongruenceWitness(g, A.fingerprint(), target.fingerprint(), res)


def _lam_order(tol_abs: float):
    def cmp(a: complex, b: complex) -> int:
        if abs(a.real - b.real) > tol_abs:
            return -1 if a.real < b.real else 1
        if abs(a.imag - b.imag) > tol_abs:
            return -1 if a.imag < b.imag else 1
        raise DegeneratePencil("tie in eigenvalue order")

    return cmp


def _positive(z: complex, tol_abs: float) -> bool:
    if abs(z.real) > tol_abs:
        return z.real > 0
    return z.imag > 0


def canonicalize(R: ReducedTuple, tol: ToleranceContext = DEFAULT_TOL) -> tuple[ReducedTuple, HnElement]:
    """Orbit representative: eigenvalues ascending by (Re, Im), first scanned tail entry
    of every column in the right half-plane, first sign fixed to +1."""
    n = R.n
    eps = tol.eq_tol(R.scale())
    cmp = _lam_order(eps)
    perm = sorted(range(n), key=functools.cmp_to_key(lambda i, j: cmp(R.lambdas[i], R.lambdas[j])))
    signs = [1] * n
    for i in range(1, n):
        for k in range(R.tail.shape[0]):
            hit = next((j for j in range(i) if abs(R.tail[k, perm[j], perm[i]]) > eps), None)
            if hit is not None:
                z = signs[hit] * complex(R.tail[k, perm[hit], perm[i]])
                signs[i] = 1 if _positive(z, eps) else -1
                break
        else:
            if R.tail.shape[0]:
                raise AmbiguousSigns(f"no tail entry fixes the sign of index {i}")
    h = HnElement(tuple(signs), tuple(perm))
    return hn_act(h, R), h


def are_equivalent(A: SymTuple, B: SymTuple, tol: ToleranceContext = DEFAULT_TOL) -> CongruenceWitness | None:
    """A witness g with g^T A_i g = B_i for all i, or None if A and B are inequivalent."""
    if not in_U(A, tol):
        raise NotInU("A")
    if not in_U(B, tol):
        raise NotInU("B")
    if (A.n, A.r) != (B.n, B.r):
        return None
    RA, wA = reduce(A, tol)
    RB, wB = reduce(B, tol)
    CA, hA = canonicalize(RA, tol)
    CB, hB = canonicalize(RB, tol)
    if not CA.close_to(CB, tol):
        return None
    left = wA.g @ hA.matrix()
    right = wB.g @ hB.matrix()
    g = left @ np.linalg.inv(right)
    w = CongruenceWitness(g, A.fingerprint(), B.fingerprint())
    res = w.verify(A, B)
    return CongruenceWitness(g, w.source, w.target, res)


@dataclass(frozen=True, eq=False)
class OrbitResult:
    """Distinct reduced tuples in one equivalence class."""

    elements: list[ReducedTuple]
    expected: int
    non_generic_collapse: bool

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


MAX_ORBIT_N = 5


def reduced_orbit(A: SymTuple, tol: ToleranceContext = DEFAULT_TOL) -> OrbitResult:
    """Every reduced tuple equivalent to A, deduplicated within tolerance."""
    if A.n > MAX_ORBIT_N:
        raise ValueError(f"orbit enumeration is limited to n <= {MAX_ORBIT_N}")
    R, _ = reduce(A, tol)
    return orbit_of_reduced(R, tol)


def orbit_of_reduced(R: ReducedTuple, tol: ToleranceContext = DEFAULT_TOL) -> OrbitResult:
    n = R.n
    elems = list(hn_elements(n))
    signs = np.array([h.signs for h in elems], dtype=np.float64)
    perms = np.array([h.perm for h in elems], dtype=np.int64)
    images = kernels.orbit_images(R.lambdas, R.tail, signs, perms)
    keep = kernels.dedup_rows(images, tol.eq_tol(R.scale()))
    t = R.tail.shape[0]
    out = [ReducedTuple(images[i, :n], images[i, n:].reshape(t, n, n)) for i in keep]
    expected = 2 ** (n - 1) * math.factorial(n)
    return OrbitResult(out, expected, len(out) < expected)
