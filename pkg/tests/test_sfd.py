import json

import numpy as np
import pytest

from conezeta import exactlin as el
from conezeta.cones import Cone
from conezeta.nfield import Character, all_components, build_field, build_ideal
from conezeta.sfd import (
    SignedConeChain, UnitError, build_sfd, build_sfd_rank0, build_unit_group, chain_is_cycle,
    counting_sides, find_real_quadratic_unit, sample_points, verify_sfd,
)

from conftest import DESK_FIELDS, make_desk


def _all_ones(fld):
    return Character.from_mapping(fld.r1, {"".join("+" if s > 0 else "-" for s in mu): 1
                                           for mu in all_components(fld.r1)})


def test_rejects_non_totally_positive_unit():
    fld = build_field([-1, -1, 1])
    a = build_ideal(fld, el.identity(2))
    with pytest.raises(UnitError):
        build_unit_group(a, [[0, 1]])  # phi has norm -1
    with pytest.raises(UnitError, match="totally positive"):
        build_unit_group(a, [[-1, -1]])  # -phi^2 has norm one but is negative


def test_rejects_non_unit():
    fld = build_field([-2, 0, 1])
    a = build_ideal(fld, el.identity(2))
    with pytest.raises(UnitError):
        build_unit_group(a, [[3, 1]])


def test_rejects_missing_units():
    fld = build_field([-1, -2, 1, 1])
    a = build_ideal(fld, el.identity(3))
    with pytest.raises(UnitError, match="expected 2"):
        build_unit_group(a, [[0, 0, 1]])


def test_rejects_dependent_units():
    fld = build_field([-1, -2, 1, 1])
    a = build_ideal(fld, el.identity(3))
    sq = fld.mul([0, 0, 1], [0, 0, 1])
    with pytest.raises(UnitError, match="dependent"):
        build_unit_group(a, [[0, 0, 1], sq])


def test_torsion_order_checked():
    fld = build_field([1, 0, 1])
    a = build_ideal(fld, el.identity(2))
    assert build_unit_group(a, [], [0, 1]).torsion_order == 4
    with pytest.raises(UnitError):
        build_unit_group(a, [], [0, 1], torsion_order=2)


def test_real_quadratic_unit_finder():
    assert find_real_quadratic_unit(build_field([-2, 0, 1])) == el.vec([3, 2])
    assert find_real_quadratic_unit(build_field([-1, -1, 1])) == el.vec([1, 1])
    fld = build_field([-3, 0, 1])
    assert find_real_quadratic_unit(fld) == el.vec([2, 1])


def test_zero_character_gives_empty_chain(desk):
    _, fld, a, ug = desk
    chi = Character.from_mapping(fld.r1, {})
    assert len(build_sfd(a, ug, chi)) == 0


def test_rank0_inconsistent_order_rejected(gauss):
    _, a, ug = gauss
    with pytest.raises(UnitError):
        build_sfd_rank0(a, ug, Character.constant(0, 1), torsion_order=6)


def test_chain_json_roundtrip(golden):
    fld, a, ug = golden
    chain = build_sfd(a, ug, _all_ones(fld))
    again = SignedConeChain.from_json(chain.to_json())
    assert again == chain
    assert all(isinstance(v, str) for t in json.loads(chain.to_json()) for alpha in t["I"] for v in alpha)


def test_chains_are_cycles(desk):
    _, fld, a, ug = desk
    chi = _all_ones(fld) if fld.r1 else Character.constant(0, 1)
    assert chain_is_cycle(a, build_sfd(a, ug, chi), ug)


@pytest.mark.parametrize("name", sorted(DESK_FIELDS))
def test_counting_identity_small(name, rng):
    fld, a, ug = make_desk(name)
    comps = all_components(fld.r1)
    chi = Character.from_mapping(fld.r1, {
        "".join("+" if s > 0 else "-" for s in mu): int(v)
        for mu, v in zip(comps, rng.integers(-3, 4, size=len(comps)))
    })
    chain = build_sfd(a, ug, chi)
    samples = sample_points(a, 60, 10, rng)
    report = verify_sfd(a, chain, chi, samples, ug)
    assert report.failed == 0 and report.passed == 70


def test_negated_chain_defect(golden, rng):
    fld, a, ug = golden
    chi = _all_ones(fld)
    chain = build_sfd(a, ug, chi).negated()
    for x in sample_points(a, 20, 0, rng):
        lhs, rhs = counting_sides(a, chain, chi, x, ug)
        assert lhs - rhs == -2 * rhs


def test_null_samples_give_zero(rng):
    fld, a, ug = make_desk("sqrt2")
    chi = _all_ones(fld)
    chain = build_sfd(a, ug, chi)
    for x in sample_points(a, 0, 10, rng):
        assert counting_sides(a, chain, chi, x, ug) == (0, 0)


def test_wrong_chain_detected(gauss, rng):
    _, a, ug = gauss
    chi = Character.constant(0, 1)
    # the quadrant and its rotations tile the plane once, so weight 2 is wrong
    bad = SignedConeChain([(2, [[1, 0], [0, 1]])])
    report = verify_sfd(a, bad, chi, sample_points(a, 50, 0, rng), ug)
    assert report.failed > 0


def test_unit_group_exponent_lookup(golden):
    fld, a, ug = golden
    g3 = ug.element((3,))
    assert ug.find_exponent(g3) == (0, (3,))
    assert ug.find_exponent(el.mat([[1, 1], [1, 2]])) is not None
    assert ug.find_exponent(el.mat([[1, 1], [0, 1]])) is None
