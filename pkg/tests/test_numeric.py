from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symdet import numeric as nm
from symdet.errors import (
    DegeneratePencil,
    LeadingZero,
    NoConvergence,
    RegimeMismatch,
    SingularInput,
)
from symdet.numeric import DualScalar


def int_matrix(draw_rows, draw_cols, lo=-6, hi=6):
    return st.lists(
        st.lists(st.integers(lo, hi), min_size=draw_cols, max_size=draw_cols),
        min_size=draw_rows, max_size=draw_rows,
    )


# --------------------------------------------------------------------------
# exact rank


def test_exact_rank_examples():
    assert nm.exact_rank(nm.as_exact(np.zeros((3, 3), dtype=int).tolist())) == 0
    assert nm.exact_rank(nm.exact_identity(4)) == 4
    assert nm.exact_rank(nm.as_exact([[1, 2, 3], [2, 4, 6]])) == 1


def test_exact_rank_rejects_floats():
    with pytest.raises(RegimeMismatch):
        nm.exact_rank(np.eye(3))


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_exact_rank_matches_sympy(m, n, data):
    rows = data.draw(int_matrix(m, n, -3, 3))
    M = nm.as_exact(rows)
    assert nm.exact_rank(M) == sympy.Matrix(rows).rank()


@given(st.integers(1, 4), st.data())
def test_exact_rank_invariant_under_invertible_multiplication(n, data):
    M = nm.as_exact(data.draw(int_matrix(n, n + 1, -4, 4)))
    P = nm.as_exact(data.draw(int_matrix(n, n)))
    Q = nm.as_exact(data.draw(int_matrix(n + 1, n + 1)))
    if nm.det_exact(P) == 0 or nm.det_exact(Q) == 0:
        return
    assert nm.exact_rank(P @ M @ Q) == nm.exact_rank(M)


def test_exact_rank_with_fractions():
    M = nm.as_exact([[Fraction(1, 3), Fraction(2, 3)], [Fraction(1, 2), 1]])
    assert nm.exact_rank(M) == 1


@given(st.integers(1, 5), st.data())
def test_det_exact_matches_sympy(n, data):
    rows = data.draw(int_matrix(n, n))
    assert nm.det_exact(nm.as_exact(rows)) == sympy.Matrix(rows).det()


def test_solve_and_inverse():
    M = nm.as_exact([[2, 1], [1, 3]])
    inv = nm.inverse_exact(M)
    assert np.all(M @ inv == nm.exact_identity(2))
    assert nm.solve_exact(nm.as_exact([[1, 1], [2, 2]]), [1, 3]) is None
    with pytest.raises(SingularInput):
        nm.inverse_exact(nm.as_exact([[1, 1], [1, 1]]))


def test_squarefree():
    assert nm.is_squarefree([1, -3, 2])
    assert not nm.is_squarefree([1, -2, 1])
    assert not nm.is_squarefree([1, -3, 3, -1])


# --------------------------------------------------------------------------
# roots


def _sorted(z):
    return np.array(sorted(np.asarray(z), key=lambda w: (round(w.real, 8), round(w.imag, 8))))


def test_poly_roots_examples(backend):
    np.testing.assert_allclose(_sorted(nm.poly_roots([1, 0, -1])), [-1, 1], atol=1e-12)
    np.testing.assert_allclose(_sorted(nm.poly_roots([1, 0, 1])), [-1j, 1j], atol=1e-12)
    np.testing.assert_allclose(_sorted(nm.poly_roots([1, -6, 11, -6])), [1, 2, 3], atol=1e-10)


def test_poly_roots_leading_zero():
    with pytest.raises(LeadingZero):
        nm.poly_roots([0, 1, 2])
    with pytest.raises(LeadingZero):
        nm.poly_roots([3])


def test_poly_roots_nan_policy():
    with pytest.raises(NoConvergence):
        nm.poly_roots([1, np.nan, 1])


def test_poly_roots_multiple_root_residual(backend):
    z = nm.poly_roots(np.poly([2, 2, 2, -1]))
    assert np.abs(np.poly(z) - np.poly([2, 2, 2, -1])).max() <= 1e-8 * 12


def test_repeated_root_detection():
    c = np.poly([1, 1, 1, 1, -2])
    assert nm.has_repeated_root(c, nm.poly_roots(c))
    c = np.poly([1, 1.001, -2])
    assert not nm.has_repeated_root(c, nm.poly_roots(c))


@given(st.integers(0, 100_000), st.integers(1, 8))
def test_poly_roots_reproduce_monic(seed, n):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    c[0] = 1.0 + abs(c[0])
    z = nm.poly_roots(c)
    monic = c / c[0]
    assert np.abs(np.poly(z) - monic).max() <= 1e-8 * max(1.0, np.abs(monic).max())


# --------------------------------------------------------------------------
# congruence to identity


def test_congruence_to_identity_examples(backend):
    np.testing.assert_allclose(nm.sym_congruence_to_identity(np.eye(3)), np.eye(3))
    g = nm.sym_congruence_to_identity(nm.as_exact([[4, 0], [0, 9]]))
    np.testing.assert_allclose(g, np.diag([0.5, 1 / 3]), atol=1e-15)
    A0 = np.array([[0, 1], [1, 0]], dtype=complex)
    g = nm.sym_congruence_to_identity(A0)
    assert np.abs(g.T @ A0 @ g - np.eye(2)).max() <= 1e-8
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(g, [[s, 1j * s], [s, -1j * s]], atol=1e-14)


def test_congruence_to_identity_singular(backend):
    with pytest.raises(SingularInput):
        nm.sym_congruence_to_identity(nm.as_exact([[1, 1], [1, 1]]))
    with pytest.raises(SingularInput):
        nm.sym_congruence_to_identity(np.array([[1, 1], [1, 1]], dtype=complex))


@given(st.integers(0, 100_000), st.integers(1, 6))
def test_congruence_to_identity_residual(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.integers(-9, 10, size=(n, n))
    A0 = nm.as_exact((M + M.T).tolist())
    if nm.det_exact(A0) == 0:
        return
    g = nm.sym_congruence_to_identity(A0)
    S = nm.as_complex(A0)
    assert np.abs(g.T @ S @ g - np.eye(n)).max() <= 1e-8 * np.abs(S).max()


def test_principal_sqrt_branch():
    assert nm.principal_sqrt(complex(-4, -0.0)) == 2j
    assert nm.principal_sqrt(4) == 2
    w = nm.principal_sqrt(-1 - 1e-300j)
    assert w.real >= 0


# --------------------------------------------------------------------------
# complex symmetric eigen


def test_eigen_examples(backend):
    lams, h = nm.complex_symmetric_eigen(np.diag([1.0, 2.0]))
    order = np.argsort(lams.real)
    np.testing.assert_allclose(lams[order], [1, 2], atol=1e-12)
    np.testing.assert_allclose(np.abs(h[:, order]), np.eye(2), atol=1e-12)

    S = np.array([[0, 1], [1, 0]], dtype=complex)
    lams, h = nm.complex_symmetric_eigen(S)
    order = np.argsort(lams.real)
    np.testing.assert_allclose(lams[order], [-1, 1], atol=1e-12)
    s = 1 / np.sqrt(2)
    v_minus, v_plus = h[:, order[0]], h[:, order[1]]
    assert np.allclose(np.abs(v_plus), [s, s]) and np.isclose(v_plus[0], v_plus[1])
    assert np.allclose(np.abs(v_minus), [s, s]) and np.isclose(v_minus[0], -v_minus[1])

    with pytest.raises(DegeneratePencil):
        nm.complex_symmetric_eigen(np.eye(2))


@given(st.integers(0, 100_000), st.integers(1, 5))
def test_eigen_properties(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = M + M.T
    lams, h = nm.complex_symmetric_eigen(S)
    scale = max(1.0, np.abs(S).max())
    assert np.abs(h.T @ h - np.eye(n)).max() <= 1e-7 * scale
    assert np.abs(h.T @ S @ h - np.diag(lams)).max() <= 1e-7 * scale
    roots = nm.poly_roots(nm.char_poly_coeffs(S))
    for lam in lams:
        assert np.abs(roots - lam).min() <= 1e-7 * scale


# --------------------------------------------------------------------------
# dual numbers


@given(st.fractions(max_denominator=50))
def test_dual_cube_tangent_exact(x):
    d = DualScalar(x, 1) ** 3
    assert d.primal == x**3
    assert d.tangent == 3 * x**2


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_dual_matches_central_difference(x, y):
    def f(t):
        return (t * t + y) * (t - 2.5) / (t * t + 1) - 3 * t

    h = 1e-6
    fd = (f(x + h) - f(x - h)) / (2 * h)
    d = f(DualScalar(x, 1.0)).tangent
    assert abs(d - fd) <= 1e-5 * max(1.0, abs(d))


def test_dual_in_object_arrays():
    a = np.array([DualScalar(Fraction(2), 1), Fraction(3)], dtype=object)
    out = a * DualScalar(Fraction(1), 2)
    assert out[0] == DualScalar(Fraction(2), 5)
    assert out[1] == DualScalar(Fraction(3), 6)


# --------------------------------------------------------------------------
# determinant expansion


def test_monomials_graded_lex():
    assert nm.monomials(3, 2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


def test_linear_det_coeffs_zero_rows():
    mats = nm.as_exact(np.zeros((2, 2, 2), dtype=int).tolist())
    assert all(c == 0 for c in nm.linear_det_coeffs(mats))


def test_tolerance_from_env(monkeypatch):
    monkeypatch.setenv("SYMDET_EPS_EQ", "1e-6")
    tol = nm.ToleranceContext.from_env()
    assert tol.eps_eq == 1e-6 and tol.eps_rank == 1e-10
    assert tol.close(1.0, 1.0 + 5e-7, scale=0.5)
    assert not tol.close(1.0, 1.0 + 5e-6, scale=0.5)
