import math

import mpmath
import pytest

from conezeta import exactlin as el
from conezeta.cones import Cone, QClosureTester, q_closure_numeric_oracle
from conezeta.conesum import ConeSumConfig, cone_zeta_sum, enumerate_cone_points, psi_partial_sum

from conftest import make_desk

FIB = el.mat([[0, 1], [1, 1]])


def test_quadrant_depth_one():
    pts = enumerate_cone_points(Cone([[1, 0], [0, 1]]), FIB, 1)
    assert set(pts) == {(1, 0), (0, 1), (1, 1)}


def test_unit_cell_depth_zero_is_empty():
    assert enumerate_cone_points(Cone([[1, 0], [0, 1]]), FIB, 0) == []


def test_enumeration_matches_box_scan_with_numeric_oracle():
    cone = Cone([[1, 0], [1, 1]])
    got = set(enumerate_cone_points(cone, FIB, 2))
    expected = set()
    for a in range(-1, 6):
        for b in range(-1, 6):
            if (a, b) == (0, 0):
                continue
            lam = cone.barycentric([a, b])
            if any(c > 2 for c in lam) or any(c.denominator != 1 for c in lam):
                continue
            if q_closure_numeric_oracle([a, b], cone, FIB) is True:
                expected.add((a, b))
    assert got == expected


def test_enumeration_non_unimodular_cone():
    cone = Cone([[2, 0], [0, 1]])
    pts = enumerate_cone_points(cone, FIB, 3)
    t = QClosureTester(cone, FIB)
    assert all(t.contains(p) for p in pts)
    assert len(pts) == len(set(pts))
    assert (1, 0) in pts


def test_degenerate_cone_sum_is_zero(golden):
    _, a, _ = golden
    r = cone_zeta_sum(a, Cone([[1, 1], [2, 2]]), 1)
    assert r.value == 0 and r.points_used == 0


def test_k_zero_rejected(golden):
    _, a, _ = golden
    with pytest.raises(ValueError, match="series divergence"):
        cone_zeta_sum(a, Cone([[1, 0], [1, 1]]), 0)


def test_sums_increase_with_depth(golden):
    _, a, _ = golden
    cone = Cone([[1, 0], [1, 1]])
    vals = [float(cone_zeta_sum(a, cone, 1, ConeSumConfig(depth=d)).value) for d in (10, 20, 40, 80)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_sum_against_direct_enumeration(golden):
    _, a, _ = golden
    cone = Cone([[1, 0], [1, 1]])
    r = cone_zeta_sum(a, cone, 2, ConeSumConfig(depth=30))
    pts = enumerate_cone_points(cone, a.Q, 30)
    direct = math.fsum(1.0 / float(a.norm_form.exact(p)) ** 3 for p in pts)
    assert float(r.value) == pytest.approx(cone.sign() * direct, rel=1e-14)
    assert r.points_used == len(pts)


def test_high_precision_path_agrees(golden):
    _, a, _ = golden
    cone = Cone([[1, 0], [1, 1]])
    lo = cone_zeta_sum(a, cone, 1, ConeSumConfig(depth=40))
    hi = cone_zeta_sum(a, cone, 1, ConeSumConfig(depth=40, precision=120))
    assert float(lo.value) == pytest.approx(float(hi.value), rel=1e-13)


def test_golden_cone_gives_dedekind_value(golden):
    # totally positive elements modulo phi^2 are in bijection with ideals
    _, a, _ = golden
    cone = Cone([[1, 0], [1, 1]])
    r = cone_zeta_sum(a, cone, 1, ConeSumConfig(depth=200))
    total = float(r.value)
    # Dedekind zeta of Q(sqrt5) at 2 is 2 pi^4 / (75 sqrt 5)
    ref = 2 * math.pi ** 4 / (75 * math.sqrt(5))
    assert total == pytest.approx(ref, rel=2e-4)


def test_psi_homogeneity_small():
    cone = Cone([[1, 0], [0, 1]])
    y = [mpmath.mpf("1.3"), mpmath.mpf("0.7")]
    base = psi_partial_sum(cone, FIB, y, 1, 15)
    lam = mpmath.mpf("2.5")
    scaled = psi_partial_sum(cone, FIB, [lam * c for c in y], 1, 15)
    assert abs(scaled - lam ** -3 * base) <= 1e-12 * abs(scaled)
