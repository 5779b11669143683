from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from conezeta import exactlin as el
from conezeta.nfield import (
    Character, ReducibleError, build_field, build_ideal, component_of, format_sign_key,
    norm_exact, parse_sign_key, random_norm_zero_vectors, sign_character,
)

from conftest import DESK_FIELDS, make_desk


def test_field_signatures():
    f = build_field([-5, 0, 1])
    assert (f.r1, f.r2) == (2, 0)
    roots = sorted(float(f.root(i)) for i in range(2))
    assert roots == pytest.approx([-5 ** 0.5, 5 ** 0.5], rel=1e-14)
    f = build_field([1, 0, 1])
    assert (f.r1, f.r2) == (0, 1)
    assert {complex(f.root(i)) for i in range(2)} == {1j, -1j}
    f = build_field([1, -2, -1, 1])
    assert (f.r1, f.r2) == (3, 0)


def test_reducible_rejected():
    with pytest.raises(ReducibleError):
        build_field([-1, 0, 1])


def test_root_refinement_to_high_precision():
    f = build_field([-5, 0, 1])
    with mpmath.workprec(400):
        r = max(f.root(0, 400), f.root(1, 400), key=lambda z: mpmath.re(z))
        assert abs(r - mpmath.sqrt(5)) < mpmath.mpf(2) ** -390


def test_golden_basis_gives_fibonacci_matrix():
    f = build_field([-5, 0, 1])
    a = build_ideal(f, [[1, 0], ["1/2", "1/2"]], theta_coords=["1/2", "1/2"])
    assert a.Q == el.mat([[0, 1], [1, 1]])


def test_gaussian_rotation_matrix():
    f = build_field([1, 0, 1])
    a = build_ideal(f, el.identity(2), theta_coords=[0, 1])
    assert a.Q == el.mat([[0, -1], [1, 0]])


@pytest.mark.parametrize("name", sorted(DESK_FIELDS))
def test_power_basis_gives_companion(name):
    poly = DESK_FIELDS[name][0]
    g = len(poly) - 1
    rows = [[0] * g for _ in range(g)]
    for j in range(g - 1):
        rows[j + 1][j] = 1
    for i in range(g):
        rows[i][g - 1] = -poly[i]
    _, a, _ = make_desk(name)
    assert a.Q == el.mat(rows)


def test_rho_is_multiplicative(rng):
    fld, a, _ = make_desk("cubic7")
    for _ in range(20):
        x = el.vec(rng.integers(-5, 6, size=3).tolist())
        y = el.vec(rng.integers(-5, 6, size=3).tolist())
        assert el.matmul(a.rho_of(x), a.rho_of(y)) == a.rho_of(fld.mul(x, y))


def test_norm_examples():
    _, a, _ = make_desk("golden")
    assert norm_exact(a, [1, 1]) == 1
    assert norm_exact(a, [1, 0]) == 1
    _, b, _ = make_desk("gauss")
    assert norm_exact(b, [1, 1]) == 2


@pytest.mark.parametrize("name", sorted(DESK_FIELDS))
def test_norm_matches_sympy_resultant(name, rng):
    poly = DESK_FIELDS[name][0]
    fld, a, _ = make_desk(name)
    t = sympy.symbols("t")
    m = sum(c * t ** i for i, c in enumerate(poly))
    for _ in range(10):
        x = [int(v) for v in rng.integers(-7, 8, size=fld.degree)]
        elt = sum(c * t ** i for i, c in enumerate(x))
        ref = sympy.resultant(m, elt, t)
        assert norm_exact(a, x) == Fraction(int(ref))


def test_norm_form_vectorised_matches_exact(rng):
    _, a, _ = make_desk("cubic7")
    pts = rng.integers(-30, 31, size=(50, 3))
    num = a.norm_form.numerators(pts)
    for p, n in zip(pts, num):
        assert Fraction(int(n), a.norm_form.denom) == norm_exact(a, p.tolist())


def test_component_examples():
    _, a, _ = make_desk("golden")
    assert component_of(a, [1, 0]) == (1, 1)
    # phi in the first embedding is positive, its conjugate negative
    assert component_of(a, [0, 1]) == (1, -1)
    assert component_of(a, [1, -1]) == (-1, 1)
    assert component_of(a, [0, 0]) is None


def test_sign_character_examples():
    _, a, _ = make_desk("golden")
    assert sign_character(a, [1, 1], 3) == 1
    assert sign_character(a, [0, 1], 1) == -1
    assert sign_character(a, [0, 1], 2) == 1
    with pytest.raises(ValueError):
        sign_character(a, [0, 0], 1)


@pytest.mark.parametrize("name", sorted(DESK_FIELDS))
def test_detw_squared_is_trace_form_det(name):
    _, a, _ = make_desk(name)
    d = complex(a.detW)
    assert abs(d * d - float(a.trace_form_det())) <= 1e-10 * abs(float(a.trace_form_det()))


def test_detw_values():
    assert complex(make_desk("golden")[1].detW) == pytest.approx(-5 ** 0.5)
    assert complex(make_desk("sqrt2")[1].detW) == pytest.approx(-2 * 2 ** 0.5)
    assert complex(make_desk("gauss")[1].detW) == pytest.approx(-2j)


def test_dual_basis_pairs_to_identity():
    _, a, _ = make_desk("cubic7")
    W = np.array(a.W_numeric.tolist(), dtype=complex)
    D = np.array(a.W_dual_numeric.tolist(), dtype=complex)
    assert np.allclose(W.T @ D, np.eye(3), atol=1e-12)


def test_embedding_vectors_are_eigenvectors():
    _, a, _ = make_desk("golden")
    Q = np.array([[float(c) for c in r] for r in a.Q])
    W = np.array(a.W_numeric.tolist(), dtype=float)
    for i in range(2):
        w = W[:, i]
        lam = (Q.T @ w)[0] / w[0]
        assert np.allclose(Q.T @ w, lam * w, atol=1e-12)


def test_sign_keys_roundtrip():
    assert parse_sign_key("+-") == (1, -1)
    assert format_sign_key((1, -1, 1)) == "+-+"
    chi = Character.from_mapping(2, {"++": 1, "--": -2})
    assert chi((1, 1)) == 1 and chi((-1, -1)) == -2 and chi((1, -1)) == 0
    assert Character.from_mapping(2, chi.to_mapping()) == chi
    with pytest.raises(ValueError):
        Character.from_mapping(2, {"+": 1})


def test_norm_zero_vectors_have_zero_norm(rng):
    _, a, _ = make_desk("sqrt2")
    for v in random_norm_zero_vectors(a, 10, rng):
        assert v.component() is None
        assert not v.is_zero()
