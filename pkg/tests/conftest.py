from fractions import Fraction

import numpy as np
import pytest

from conezeta.nfield import build_field, build_ideal
from conezeta import exactlin as el
from conezeta.sfd import build_unit_group

# (min_poly, totally positive units, torsion generator) in power coordinates
DESK_FIELDS = {
    "golden": ([-1, -1, 1], [[1, 1]], None),
    "sqrt2": ([-2, 0, 1], [[3, 2]], None),
    "gauss": ([1, 0, 1], [], [0, 1]),
    "cubic7": ([-1, -2, 1, 1], [[0, 0, 1], [1, 2, 1]], None),
}


def make_desk(name, basis=None, precision=64):
    poly, units, torsion = DESK_FIELDS[name]
    fld = build_field(poly, precision)
    g = fld.degree
    a = build_ideal(fld, basis if basis is not None else el.identity(g))
    ug = build_unit_group(a, units, torsion)
    return fld, a, ug


@pytest.fixture(params=sorted(DESK_FIELDS))
def desk(request):
    return (request.param,) + make_desk(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20260115)


@pytest.fixture
def golden():
    return make_desk("golden")


@pytest.fixture
def gauss():
    return make_desk("gauss")


def F(*xs):
    return tuple(Fraction(x) for x in xs)
