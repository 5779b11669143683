from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conezeta import exactlin as el

small = st.integers(-6, 6)
def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_det_small_cases():
    assert el.det(el.mat([[1, 2], [3, 4]])) == -2
    assert el.det(el.mat([["1/2", 0], [0, "2/3"]])) == Fraction(1, 3)
    assert el.det(el.identity(4)) == 1
    assert el.det(el.mat([[1, 2], [2, 4]])) == 0


@settings(max_examples=60, deadline=None)
@given(square(3), square(3))
def test_det_sign_multiplicative(a, b):
    A, B = el.mat(a), el.mat(b)
    assert el.det_sign(el.matmul(A, B)) == el.det_sign(A) * el.det_sign(B)


@settings(max_examples=40, deadline=None)
@given(square(3))
def test_det_matches_sympy(a):
    assert el.det(el.mat(a)) == sympy.Matrix(a).det()


@settings(max_examples=40, deadline=None)
@given(square(3))
def test_inverse_roundtrip(a):
    A = el.mat(a)
    if el.det(A) == 0:
        with pytest.raises(el.SingularMatrixError):
            el.inverse(A)
        return
    assert el.matmul(A, el.inverse(A)) == el.identity(3)


@settings(max_examples=30, deadline=None)
@given(square(3), square(3))
def test_char_poly_conjugation_invariant(a, p):
    A, P = el.mat(a), el.mat(p)
    if el.det(P) == 0:
        return
    conj = el.matmul(el.matmul(P, A), el.inverse(P))
    assert el.char_poly(conj) == el.char_poly(A)


def test_char_poly_against_sympy():
    A = [[0, 1, 0], [0, 0, 1], [1, 2, -1]]
    ours = el.char_poly(el.mat(A)).coeffs
    x = sympy.symbols("x")
    ref = sympy.Poly(sympy.Matrix(A).charpoly(x).as_expr(), x).all_coeffs()[::-1]
    assert list(ours) == [Fraction(int(c)) for c in ref]


@settings(max_examples=30, deadline=None)
@given(square(3))
def test_rank_and_nullspace(a):
    A = el.mat(a)
    ns = el.nullspace(A)
    assert el.rank(A) + len(ns) == 3
    for v in ns:
        assert el.is_zero(el.matvec(A, v))


def test_solve_and_singular():
    A = el.mat([[2, 1], [1, 3]])
    x = el.solve(A, [3, 5])
    assert el.matvec(A, x) == el.vec([3, 5])
    with pytest.raises(el.SingularMatrixError):
        el.solve(el.mat([[1, 1], [1, 1]]), [1, 2])


def test_floats_rejected():
    with pytest.raises(TypeError):
        el.vec([0.5])


def test_primitive_integer():
    assert el.primitive_integer(["1/2", "3/4"]) == (2, 3)
    assert el.primitive_integer([-4, 6]) == (-2, 3)


@pytest.mark.parametrize("coeffs,expected", [
    ((-1, -1, 1), True),
    ((1, 0, 1), True),
    ((-1, 0, 1), False),
    ((-1, -2, 1, 1), True),
    ((-2, 0, 0, 1), True),
    ((2, 0, -3, 0, 1), False),  # (x^2-1)(x^2-2)
    ((1, 1, 1, 1, 1), True),
])
def test_is_irreducible(coeffs, expected):
    assert el.is_irreducible(el.Polynomial(tuple(Fraction(c) for c in coeffs))) is expected


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=3, max_size=4))
def test_irreducible_agrees_with_sympy(c):
    coeffs = tuple(Fraction(v) for v in c) + (Fraction(1),)
    ours = el.is_irreducible(el.Polynomial(coeffs))
    x = sympy.symbols("x")
    ref = sympy.Poly(sum(int(v) * x ** i for i, v in enumerate(coeffs)), x).is_irreducible
    if ours is not None:
        assert ours == ref


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=2, max_size=4))
def test_sturm_count_matches_sympy(c):
    coeffs = tuple(Fraction(v) for v in c) + (Fraction(1),)
    x = sympy.symbols("x")
    p = sympy.Poly(sum(int(v) * x ** i for i, v in enumerate(coeffs)), x)
    if sympy.discriminant(p) == 0:
        return
    assert el.count_real_roots(el.Polynomial(coeffs)) == len(sympy.real_roots(p))


@settings(max_examples=40, deadline=None)
@given(square(2))
def test_parallelepiped_count_is_abs_det(a):
    A = el.mat(a)
    d = el.det(A)
    if d == 0:
        return
    pts = el.parallelepiped_lattice_points(A)
    assert len(pts) == abs(d)
    assert len(set(pts)) == len(pts)
    # each point has barycentric coordinates in [0, 1)
    AT = el.transpose(A)
    for p in pts:
        lam = el.solve(AT, p)
        assert all(0 <= c < 1 for c in lam)


def test_parallelepiped_3d_count():
    A = el.mat([[2, 1, 0], [0, 3, 1], [1, 0, 2]])
    assert len(el.parallelepiped_lattice_points(A)) == abs(el.det(A))


def test_fourier_motzkin_witness():
    rows = [[1, 0], [0, 1], [1, 1]]
    y = el.fourier_motzkin_witness(rows, [1, 1, 1])
    assert y is not None and all(el.dot(r, y) >= 1 for r in el.mat(rows))
    assert el.fourier_motzkin_witness([[1, 0], [-1, 0]], [1, 1]) is None
