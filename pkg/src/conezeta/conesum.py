"""Lattice sums over Q-closed cones.

Points of C_I^Q in Z^g are written x = x0 + sum n_i alpha_i with x0 in the
half-open parallelepiped spanned by the primitive generators and n_i >= 0.
Truncation keeps 0 <= n_i <= depth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import exactlin as el
from .cones import Cone, QClosureTester
from .nfield import IdealBasis


class NormZeroInConeError(ArithmeticError):
    """A lattice point of a Q-closed cone has vanishing norm."""


@dataclass(frozen=True)
class ConeSumConfig:
    depth: int = 128
    refine: bool = True
    precision: int = 53

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


@dataclass(frozen=True)
class ConeSumResult:
    value: object  # mpmath.mpf
    err_estimate: float
    points_used: int
    half_value: object = None
    exact_partial: Fraction | None = None


def _cell_points(cone: Cone) -> tuple[np.ndarray, np.ndarray]:
    prim = cone.primitive
    base = el.parallelepiped_lattice_points(prim)
    gens = np.array(prim, dtype=np.int64)
    x0 = np.array([[int(c) for c in p] for p in base], dtype=np.int64)
    return gens, x0


def _slab(gens: np.ndarray, x0: np.ndarray, first: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Candidates with n_1 = first, in lexicographic (n, x0-index) order."""
    g = gens.shape[0]
    rest = np.array(list(itertools.product(range(depth + 1), repeat=g - 1)), dtype=np.int64)
    n = np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest.reshape(len(rest), g - 1)])
    pts = (n @ gens)[:, None, :] + x0[None, :, :]
    nmax = np.repeat(n.max(axis=1), len(x0))
    return pts.reshape(-1, g), nmax


def _cone_point_slabs(cone: Cone, Q, depth: int):
    tester = QClosureTester(Cone(cone.primitive), Q)
    gens, x0 = _cell_points(cone)
    for first in range(depth + 1):
        pts, nmax = _slab(gens, x0, first, depth)
        mask = tester.member_mask(pts)
        yield pts[mask], nmax[mask]


def enumerate_cone_points(cone: Cone, Q, depth: int) -> list[tuple[int, ...]]:
    """Nonzero lattice points of C_I^Q with generator coordinates at most ``depth``."""
    if cone.rank != len(Q) or cone.sign() == 0 or depth < 0:
        return []
    out = []
    for pts, _ in _cone_point_slabs(cone, Q, depth):
        out.extend(tuple(int(v) for v in p) for p in pts)
    return out


def _reciprocal_powers(numer: np.ndarray, denom: int, power: int, precision: int) -> list:
    if precision <= 53:
        base = denom / numer.astype(np.float64) if numer.dtype != object else np.array(
            [denom / float(v) for v in numer])
        return list(base ** power)
    with mpmath.workprec(precision):
        return [(mpmath.mpf(denom) / int(v)) ** power for v in numer]


def _accumulate(parts: list, precision: int):
    if precision <= 53:
        return math.fsum(parts)
    with mpmath.workprec(precision):
        return mpmath.fsum(parts)


def cone_zeta_sum(a: IdealBasis, cone: Cone, k: int, cfg: ConeSumConfig = ConeSumConfig()) -> ConeSumResult:
    """sgn(I) * sum of 1/N_w(x)^(k+1) over the truncated lattice points of C_I^Q."""
    if k < 1:
        raise ValueError("k must be >= 1 (series divergence)")
    sgn = cone.sign()
    if sgn == 0:
        return ConeSumResult(mpmath.mpf(0), 0.0, 0, mpmath.mpf(0))
    nf = a.norm_form
    half = cfg.depth // 2
    full_parts, half_parts = [], []
    used = 0
    for pts, nmax in _cone_point_slabs(cone, a.Q, cfg.depth):
        if len(pts) == 0:
            continue
        numer = nf.numerators(pts)
        if np.any(numer == 0):
            bad = pts[np.flatnonzero(numer == 0)[0]]
            raise NormZeroInConeError("norm vanishes at %s inside the cone" % (tuple(int(v) for v in bad),))
        terms = _reciprocal_powers(numer, nf.denom, k + 1, cfg.precision)
        full_parts.append(_accumulate(terms, cfg.precision))
        if cfg.refine:
            sel = np.flatnonzero(nmax <= half)
            half_parts.append(_accumulate([terms[i] for i in sel], cfg.precision))
        used += len(pts)
    value = sgn * mpmath.mpf(_accumulate(full_parts, cfg.precision))
    if cfg.refine:
        half_value = sgn * mpmath.mpf(_accumulate(half_parts, cfg.precision))
        err = float(abs(value - half_value))
    else:
        # without refinement assume a tail of the size of the last shell
        half_value = None
        err = float(abs(full_parts[-1])) * cfg.depth if full_parts else 0.0
    return ConeSumResult(value, err, used, half_value)


def psi_partial_sum(cone: Cone, Q, y: Sequence, d: int, depth: int, precision: int = 120):
    """Truncated sgn(I) * sum over C_I^Q of 1/<x, y>^(g+d) at a complex point y."""
    g = len(Q)
    sgn = cone.sign()
    if sgn == 0:
        return mpmath.mpc(0)
    pts = enumerate_cone_points(cone, Q, depth)
    with mpmath.workprec(precision):
        yv = [mpmath.mpmathify(c) for c in y]
        terms = []
        for x in pts:
            s = mpmath.fsum(xi * yi for xi, yi in zip(x, yv))
            terms.append(s ** (-(g + d)))
        return sgn * mpmath.fsum(terms)
