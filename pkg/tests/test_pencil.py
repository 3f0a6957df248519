from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symdet import numeric as nm
from symdet.errors import BadIndexSet, ZeroPolynomial
from symdet.numeric import Regime
from symdet.pencil import (
    GenCharPoly,
    Hypersurface,
    SymTuple,
    congruence,
    eval_pencil,
    gen_char_poly,
    in_U,
    random_invertible,
    random_tuple,
    same_hypersurface,
    slice_tuple,
    substitution_matches,
)

I2 = [[1, 0], [0, 1]]
SWAP = [[0, 1], [1, 0]]


def T(*mats):
    return SymTuple.from_matrices([nm.as_exact(m) for m in mats])


def sympy_char_poly(A: SymTuple):
    xs = sympy.symbols(f"x0:{A.r + 1}")
    M = sum((xs[k] * sympy.Matrix(A.matrices[k].tolist()) for k in range(A.r + 1)),
            sympy.zeros(A.n, A.n))
    return sympy.Poly(M.det(method="berkowitz"), *xs), xs


def test_gen_char_poly_examples():
    P = gen_char_poly(T([[2]], [[3]]))
    assert P.as_dict() == {(1, 0): 2, (0, 1): 3}
    P = gen_char_poly(T(I2, [[1, 0], [0, 2]]))
    assert P.as_dict() == {(2, 0): 1, (1, 1): 3, (0, 2): 2}
    P = gen_char_poly(T(I2, [[1, 0], [0, -1]], SWAP))
    assert P.to_text() == "x0^2 - x1^2 - x2^2"


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_gen_char_poly_matches_sympy(seed, n, r):
    A = random_tuple(n, r, seed)
    P = gen_char_poly(A)
    Q, _ = sympy_char_poly(A)
    want = {e: Fraction(int(c.p), int(c.q)) for e, c in zip(Q.monoms(), Q.coeffs())}
    got = {e: c for e, c in P.as_dict().items() if c != 0}
    assert got == want


def test_gen_char_poly_fractions():
    A = T([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 3), 1]], [[0, Fraction(2, 5)], [Fraction(2, 5), 0]])
    P = gen_char_poly(A)
    for x in ([1, 0], [0, 1], [3, -2]):
        assert P(x) == eval_pencil(A, x)


def test_homogeneous_degree_n():
    P = gen_char_poly(random_tuple(3, 2, 11))
    assert all(sum(e) == 3 for e in P.monomials())


def test_eval_pencil_examples():
    A = T(I2, [[1, 0], [0, 2]])
    assert eval_pencil(A, [0, 0]) == 0
    assert eval_pencil(A, [1, 1]) == 6
    B = T(I2, [[1, 0], [0, -1]], SWAP)
    assert eval_pencil(B, [0, 0, 1]) == -1


def test_eval_agrees_with_coefficients_on_50_points():
    A = random_tuple(4, 3, 5)
    P = gen_char_poly(A)
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = [Fraction(int(v), int(d)) for v, d in zip(rng.integers(-7, 8, 4), rng.integers(1, 5, 4))]
        assert P(x) == eval_pencil(A, x)


def test_approximate_regime_matches_exact():
    A = random_tuple(3, 2, 8)
    P = gen_char_poly(A)
    Pc = gen_char_poly(A.to_complex())
    assert Pc.regime is Regime.APPROX
    np.testing.assert_allclose(Pc.coeffs.astype(complex), P.coeffs.astype(float), atol=1e-9)


def test_same_hypersurface_examples():
    P = gen_char_poly(random_tuple(2, 2, 3))
    assert same_hypersurface(P, P * 5) == 5
    # add x0^n where that coefficient is 0
    A = T([[1, 0], [0, 0]], [[1, 0], [0, 1]], [[0, 0], [0, 1]])
    P = gen_char_poly(A)
    assert P.coeff((2, 0, 0)) == 0
    coeffs = P.coeffs.copy()
    coeffs[0] += 1
    assert same_hypersurface(P, GenCharPoly(P.n_vars, P.degree, coeffs)) is None


def test_same_hypersurface_det_two():
    A = random_tuple(2, 2, 4)
    g = nm.as_exact([[1, 1], [-1, 1]])
    assert nm.det_exact(g) == 2
    assert same_hypersurface(gen_char_poly(A), gen_char_poly(congruence(A, g))) == 4


def test_zero_polynomial_rejected():
    Z = gen_char_poly(T([[0]], [[0]]))
    with pytest.raises(ZeroPolynomial):
        same_hypersurface(Z, Z)
    with pytest.raises(ZeroPolynomial):
        Hypersurface.of(Z)


def test_hypersurface_normalization():
    P = gen_char_poly(random_tuple(3, 2, 9))
    H = Hypersurface.of(P * Fraction(-7, 3))
    assert H.equals(Hypersurface.of(P))
    again = Hypersurface.of(H.poly)
    assert again.equals(H)


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_det_squared_scaling(seed, n, r):
    rng = np.random.default_rng(seed)
    A = random_tuple(n, r, rng)
    g = random_invertible(n, rng)
    d = nm.det_exact(g)
    assert gen_char_poly(congruence(A, g)) == gen_char_poly(A) * (d * d)


def test_in_U_examples():
    assert in_U(T(I2, [[1, 0], [0, 2]], [[3, 1], [1, 5]]))
    assert not in_U(T([[1, 0], [0, 0]], [[1, 0], [0, 2]]))
    assert not in_U(T(I2, I2, [[3, 1], [1, 5]]))
    assert in_U(T(I2, [[1, 0], [0, 2]]).to_complex())
    assert not in_U(T(I2, I2).to_complex())
    I4 = nm.exact_identity(4)
    assert not in_U(SymTuple.from_matrices([I4, I4]).to_complex())


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_in_U_invariant_under_congruence(seed, n):
    rng = np.random.default_rng(seed)
    A = random_tuple(n, 2, rng)
    g = random_invertible(n, rng)
    assert in_U(A) == in_U(congruence(A, g))


def test_slice_examples():
    A = random_tuple(2, 3, 2)
    assert slice_tuple(A, range(4)) == A or np.all(slice_tuple(A, range(4)).matrices == A.matrices)
    B = T(I2, [[1, 0], [0, -1]], SWAP, [[4, 1], [1, 2]])
    S = slice_tuple(B, [0, 1, 2])
    assert np.all(S.matrices == B.matrices[:3])
    with pytest.raises(BadIndexSet):
        slice_tuple(B, [0, 2])
    with pytest.raises(BadIndexSet):
        slice_tuple(B, [0, 1, 7])


@given(st.integers(0, 10_000), st.sets(st.integers(2, 3)))
def test_slice_commutes_with_substitution(seed, extra):
    A = random_tuple(3, 3, seed)
    assert substitution_matches(A, [0, 1, *sorted(extra)])


def test_random_tuple_conditions():
    a = random_tuple(1, 1, 0)
    assert a.matrices.shape == (2, 1, 1)
    assert in_U(random_tuple(3, 2, 17, condition="in_U"))
    R = random_tuple(3, 2, 17, condition="reduced")
    assert np.all(R.matrices[0] == nm.exact_identity(3))
    assert np.all(R.matrices[1] == np.diag(np.diag(R.matrices[1])))
    c = random_tuple(2, 3, 17, regime="complex", condition="in_U")
    assert c.regime is Regime.APPROX and in_U(c)
    with pytest.raises(ValueError):
        random_tuple(2, 2, 0, condition="bogus")


@given(st.integers(0, 2**63 - 1))
def test_random_tuple_deterministic(seed):
    a = random_tuple(3, 2, seed, condition="in_U")
    b = random_tuple(3, 2, seed, condition="in_U")
    assert a.fingerprint() == b.fingerprint()


def test_symtuple_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymTuple.from_matrices([nm.as_exact([[1, 2], [3, 4]])])


def test_symtuple_upper_round_trip():
    A = random_tuple(3, 2, 21)
    B = SymTuple.from_upper(3, A.upper(), "rational")
    assert np.all(A.matrices == B.matrices)
