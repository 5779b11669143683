"""Closed-form simplex integrals and admissibility of cones.

The integral of prod <xi*_i, y>^k_i * omega(y) / <x, y>^(g+|k|) over the
simplex spanned by xi_1..xi_g equals

    k! / (g+|k|-1)! * det(xi) / prod <x, xi_i>^(k_i+1),

which, with xi_i proportional to the embedding vectors w^(i), turns the
cone sums into norm sums.  A numeric quadrature oracle is kept for tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import exactlin as el
from .cones import Cone
from .nfield import MAX_PRECISION, IdealBasis, PrecisionError, norm_exact


class NotAdmissibleError(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


def _det(m: Sequence[Sequence]):
    """Leibniz determinant; works for any ring-like scalar type."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inv % 2 else 1
        for i in range(n):
            term = term * m[i][perm[i]]
        total = total + term
    return total


def _pair(x: Sequence, y: Sequence):
    total = 0
    for a, b in zip(x, y):
        total = total + a * b
    return total


@dataclass(frozen=True)
class EigenSimplex:
    xi: tuple  # g vectors, xi[i] = mu_i * w^(i)
    xi_dual: tuple  # dual vectors w*^(i) / mu_i
    det_xi: object
    mu: tuple


def _column(m, i: int) -> list:
    return [m[j, i] for j in range(m.rows)]


def _vertex_values(a: IdealBasis, cone: Cone, i: int, bits: int | None = None) -> list:
    return [a.embed_vector(alpha, i, bits) for alpha in cone.generators]


def _origin_in_hull_2d(points: Sequence[tuple]) -> bool:
    """Exact test whether (0,0) lies in the closed convex hull of rational points."""
    pts = [tuple(el.vec(p)) for p in points]
    if any(p == (0, 0) for p in pts):
        return True

    def cross(p, q):
        return p[0] * q[1] - p[1] * q[0]

    for p, q in itertools.combinations(pts, 2):
        if cross(p, q) == 0 and p[0] * q[0] + p[1] * q[1] < 0:
            return True
    for p, q, r in itertools.combinations(pts, 3):
        s1, s2, s3 = cross(p, q), cross(q, r), cross(r, p)
        if (s1 > 0 and s2 > 0 and s3 > 0) or (s1 < 0 and s2 < 0 and s3 < 0):
            return True
    return False


def _max_angular_gap(values: Sequence) -> float:
    args = sorted(float(mpmath.arg(z)) for z in values)
    gaps = [b - a for a, b in zip(args, args[1:])]
    gaps.append(args[0] + 2 * math.pi - args[-1])
    return max(gaps)


def is_q_admissible(a: IdealBasis, cone: Cone) -> bool:
    """True iff, for every embedding, 0 is outside the hull of the vertex values."""
    fld = a.field
    if any(norm_exact(a, alpha) == 0 for alpha in cone.generators):
        return False
    for i in range(fld.r1):
        signs = {fld.element_sign(a.element(alpha), i) for alpha in cone.generators}
        if len(signs) != 1:
            return False
    for i in range(fld.r1, fld.degree, 2):
        if fld.degree == 2:
            # tau is an R-linear isomorphism from power coordinates onto C
            if _origin_in_hull_2d([a.element(alpha) for alpha in cone.generators]):
                return False
            continue
        bits = fld.precision
        while True:
            gap = _max_angular_gap(_vertex_values(a, cone, i, bits))
            margin = 2.0 ** (-min(bits, 50) // 2)
            if gap > math.pi + margin:
                break
            if gap < math.pi - margin:
                return False
            bits *= 2
            if bits > MAX_PRECISION:
                raise PrecisionError("admissibility undecided at maximal precision")
    return True


def _direction(values: Sequence):
    """Unit complex number mu with Re(mu*z) > 0 for all z (all z in an open half plane)."""
    args = sorted(float(mpmath.arg(z)) for z in values)
    n = len(args)
    best, start = -1.0, 0
    for j in range(n):
        nxt = args[(j + 1) % n] + (2 * math.pi if j == n - 1 else 0)
        if nxt - args[j] > best:
            best, start = nxt - args[j], (j + 1) % n
    lo = args[start]
    hi = lo + (2 * math.pi - best)
    mid = (lo + hi) / 2
    return mpmath.expj(-mid)


def eigen_simplex(a: IdealBasis, cone: Cone) -> EigenSimplex:
    """Eigenvectors of Q^T inside V_I = {y : Re<alpha_j, y> > 0}."""
    if not is_q_admissible(a, cone):
        raise NotAdmissibleError("cone is not Q-admissible")
    fld = a.field
    g = fld.degree
    mus = []
    with mpmath.workprec(fld.precision):
        for i in range(g):
            vals = _vertex_values(a, cone, i)
            if fld.is_real(i):
                mus.append(mpmath.mpf(1 if mpmath.re(vals[0]) > 0 else -1))
            elif (i - fld.r1) % 2 == 0:
                mus.append(_direction(vals))
            else:
                mus.append(mpmath.conj(mus[-1]))
        xi = tuple(tuple(mus[i] * c for c in _column(a.W_numeric, i)) for i in range(g))
        xi_dual = tuple(tuple(c / mus[i] for c in _column(a.W_dual_numeric, i)) for i in range(g))
        prod = mpmath.mpf(1)
        for m in mus:
            prod *= m
        det_xi = prod * a.detW
    return EigenSimplex(xi, xi_dual, det_xi, tuple(mus))


def _xi_vectors(simplex) -> tuple:
    return simplex.xi if isinstance(simplex, EigenSimplex) else tuple(tuple(v) for v in simplex)


def hurwitz_weight(x: Sequence, simplex, kvec: Sequence[int]):
    """k!/(g+|k|-1)! * det(xi) / prod <x, xi_i>^(k_i+1)."""
    xi = _xi_vectors(simplex)
    g = len(xi)
    kvec = [int(k) for k in kvec]
    if len(kvec) != g or any(k < 0 for k in kvec):
        raise ValueError("kvec must hold g nonnegative integers")
    det_xi = simplex.det_xi if isinstance(simplex, EigenSimplex) else _det([[v[r] for v in xi] for r in range(g)])
    denom = 1
    for v, k in zip(xi, kvec):
        p = _pair(x, v)
        if p == 0:
            raise PoleError("<x, xi_i> vanishes")
        denom = denom * p ** (k + 1)
    kfact = 1
    for k in kvec:
        kfact *= math.factorial(k)
    return Fraction(kfact, math.factorial(g + sum(kvec) - 1)) * det_xi / denom


def simplex_quadrature_oracle(
    f: Callable[[np.ndarray], np.ndarray],
    vertices: Sequence[Sequence],
    rtol: float = 1e-11,
    max_order: int = 1024,
) -> complex:
    """Integral of f*omega over the simplex with the given vertices.

    Pulls back along t -> sum t_i xi_i, giving det(xi) times the integral of
    f(xi t) over the standard simplex in (t_2, ..., t_g), evaluated with
    collapsed-coordinate Gauss-Legendre rules of doubling order.
    """
    xi = np.array([[complex(c) for c in v] for v in vertices])  # row i = vertex i
    g = xi.shape[0]
    det_xi = complex(np.linalg.det(xi.T))
    m = g - 1
    prev = None
    order = 8
    while order <= max_order:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        u = (nodes + 1) / 2
        wu = weights / 2
        grids = np.meshgrid(*([u] * m), indexing="ij")
        wgrids = np.meshgrid(*([wu] * m), indexing="ij")
        us = [gr.ravel() for gr in grids]
        weight = np.prod([wg.ravel() for wg in wgrids], axis=0)
        s = []
        remaining = np.ones_like(us[0])
        jac = np.ones_like(us[0])
        for j in range(m):
            s.append(remaining * us[j])
            jac = jac * (1 - us[j]) ** (m - 1 - j)
            remaining = remaining * (1 - us[j])
        t = np.column_stack([1 - np.sum(s, axis=0)] + s)
        y = t @ xi
        val = det_xi * np.sum(weight * jac * f(y))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return complex(val)
        prev = val
        order *= 2
    raise ArithmeticError("simplex quadrature did not converge")


def intq_factor(a: IdealBasis, k: int):
    """(k!)^g / (g+kg-1)! * detW."""
    g = a.degree
    with mpmath.workprec(a.field.precision):
        return mpmath.mpf(math.factorial(k) ** g) / math.factorial(g + k * g - 1) * a.detW


def intQ_eigenweight(a: IdealBasis, cone: Cone, x: Sequence, k: int):
    """(k!)^g / (g+kg-1)! * detW / N_w(x)^(k+1) for x in the closed cone."""
    if not is_q_admissible(a, cone):
        raise NotAdmissibleError("cone is not Q-admissible")
    n = norm_exact(a, x)
    if n == 0:
        raise PoleError("N_w(x) vanishes")
    with mpmath.workprec(a.field.precision):
        return intq_factor(a, k) / (mpmath.mpf(n.numerator) / n.denominator) ** (k + 1)
