"""Rational open cones and their exponential-perturbation closures.

For an irreducible matrix Q the closure C^Q of an open cone C is the set of
x such that exp(eps*Q) x lies in C for all small eps > 0.  Membership is
decided exactly: expanding <exp(eps*Q) x, v> in eps shows that the sign for
small eps is the sign of the first nonzero pairing <x, (Q^T)^j v>.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import mpmath
import numpy as np

from . import exactlin as el
from .exactlin import Matrix, Vector


class DependentGeneratorsError(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    """Open cone spanned by positive combinations of the generators."""

    generators: tuple

    def __init__(self, generators: Sequence[Sequence]):
        gens = tuple(el.vec(a) for a in generators)
        if any(el.is_zero(a) for a in gens):
            raise ValueError("cone generators must be nonzero")
        object.__setattr__(self, "generators", gens)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return len(self.generators[0]) if self.generators else 0

    @property
    def primitive(self) -> tuple:
        return tuple(el.primitive_integer(a) for a in self.generators)

    def matrix(self) -> Matrix:
        """Generators as columns."""
        return el.transpose(self.generators)

    def sign(self) -> int:
        """sgn det(alpha_1, ..., alpha_g); zero for dependent or non-square tuples."""
        if not self.generators or self.rank != self.dim:
            return 0
        return el.det_sign(self.matrix())

    def is_independent(self) -> bool:
        return el.rank(self.generators) == self.rank if self.generators else True

    def barycentric(self, x: Sequence) -> Vector:
        return el.solve(self.matrix(), el.vec(x))


def dual_decomposition(cone: Cone, dim: int | None = None) -> tuple[list[Vector], list[Vector]]:
    """Dual vectors alpha* inside span(I) and a basis beta* of its orthogonal complement."""
    gens = cone.generators
    g = dim if dim is not None else cone.dim
    if not gens:
        return [], [tuple(Fraction(int(i == j)) for j in range(g)) for i in range(g)]
    if not cone.is_independent():
        raise DependentGeneratorsError("cone generators are linearly dependent")
    a = cone.matrix()  # g x r
    gram = el.matmul(el.transpose(a), a)
    alpha_star = el.transpose(el.matmul(a, el.inverse(gram)))
    beta_star = el.nullspace(el.transpose(a)) if cone.rank < g else []
    return [tuple(v) for v in alpha_star], beta_star


def lex_powers(v: Sequence, Q: Matrix) -> list[Vector]:
    """(v, Q^T v, ..., (Q^T)^(g-1) v)."""
    qt = el.transpose(Q)
    out = [el.vec(v)]
    for _ in range(len(Q) - 1):
        out.append(el.matvec(qt, out[-1]))
    return out


def _lex_from_table(x, table: Sequence[Vector]) -> int:
    if hasattr(x, "dot_sign"):
        for u in table:
            s = x.dot_sign(u)
            if s:
                return s
        if not x.is_zero():
            raise AssertionError("all lex pairings vanish at a nonzero point; Q is not irreducible")
        return 0
    for u in table:
        d = el.dot(x, u)
        if d:
            return 1 if d > 0 else -1
    if not el.is_zero(x):
        raise AssertionError("all lex pairings vanish at a nonzero point; Q is not irreducible")
    return 0


def lex_sign(x, v: Sequence, Q: Matrix) -> int:
    """Sign of the first nonzero value among <x, (Q^T)^j v>, j < g."""
    if el.is_zero(el.vec(v)):
        raise ValueError("lex_sign needs a nonzero direction")
    if not hasattr(x, "dot_sign"):
        x = el.vec(x)
    return _lex_from_table(x, lex_powers(v, Q))


def _integer_rows(rows: Sequence[Vector]) -> list[tuple[int, ...]]:
    out = []
    for r in rows:
        d = lcm(*(c.denominator for c in r))
        out.append(tuple(int(c * d) for c in r))
    return out


class QClosureTester:
    """Precomputed lex tables deciding membership in C_I^Q."""

    def __init__(self, cone: Cone, Q: Matrix):
        self.cone = cone
        self.Q = el.mat(Q)
        g = len(self.Q)
        if cone.generators and cone.dim != g:
            raise ValueError("cone and matrix dimensions differ")
        self.g = g
        self.alpha_star, self.beta_star = dual_decomposition(cone, g)
        self.lex_tables = [lex_powers(v, self.Q) for v in self.alpha_star]
        self.beta_tables = [lex_powers(v, self.Q) for v in self.beta_star]
        self._int_tables = [_integer_rows(t) for t in self.lex_tables]

    @property
    def full(self) -> bool:
        return self.cone.rank == self.g

    def contains(self, x) -> bool:
        if not hasattr(x, "dot_sign"):
            x = el.vec(x)
        if self.cone.rank == 0:
            return x.is_zero() if hasattr(x, "dot_sign") else el.is_zero(x)
        for t in self.lex_tables:
            if _lex_from_table(x, t) != 1:
                return False
        for t in self.beta_tables:
            if _lex_from_table(x, t) != 0:
                return False
        return True

    def member_mask(self, pts: np.ndarray) -> np.ndarray:
        """Vectorised membership for rows of an integer array (full-rank cones)."""
        pts = np.asarray(pts)
        n = len(pts)
        if not self.full:
            return np.zeros(n, dtype=bool)
        ok = np.ones(n, dtype=bool)
        bound = int(np.abs(pts).max()) if n else 0
        for table in self._int_tables:
            t = np.array(table, dtype=object)
            worst = max(sum(abs(c) for c in row) for row in table) * bound
            if worst < 2 ** 62 and pts.dtype != object:
                vals = pts.astype(np.int64) @ t.astype(np.int64).T
            else:
                vals = pts.astype(object) @ t.T
            decided = np.zeros(n, dtype=bool)
            positive = np.zeros(n, dtype=bool)
            for j in range(vals.shape[1]):
                col = vals[:, j]
                nz = (col != 0) & ~decided
                positive |= nz & (col > 0)
                decided |= nz
            ok &= positive
        return ok


def in_q_closure(x, tester: QClosureTester) -> bool:
    return tester.contains(x)


def q_closure_numeric_oracle(
    x: Sequence,
    cone: Cone,
    Q: Matrix,
    eps_schedule: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7),
    dps: int = 60,
) -> bool | None:
    """Membership of exp(eps Q) x in the open cone for a decreasing eps schedule.

    Returns the verdict when the last three schedule entries agree and every
    barycentric coordinate is clearly away from zero, otherwise None.
    """
    if cone.rank != cone.dim:
        raise ValueError("numeric oracle needs a full-dimensional cone")
    Q = el.mat(Q)
    with mpmath.workdps(dps):
        qm = mpmath.matrix([[mpmath.mpf(c.numerator) / c.denominator for c in row] for row in Q])
        am = mpmath.matrix([[mpmath.mpf(c.numerator) / c.denominator for c in row] for row in cone.matrix()])
        xv = mpmath.matrix([mpmath.mpf(c.numerator) / c.denominator for c in el.vec(x)])
        floor = mpmath.mpf(10) ** (-dps // 2)
        verdicts = []
        for eps in eps_schedule:
            y = mpmath.expm(mpmath.mpf(eps) * qm) * xv
            c = mpmath.lu_solve(am, y)
            if any(abs(ci) < floor for ci in c):
                verdicts.append(None)
            else:
                verdicts.append(all(ci > 0 for ci in c))
    tail = verdicts[-3:]
    if None in tail or len(set(tail)) != 1:
        return None
    return tail[0]


def face(J: Sequence, i: int) -> tuple:
    return tuple(v for j, v in enumerate(J) if j != i)


def cocycle_defect(J: Sequence[Sequence], Q: Matrix, x: Sequence) -> int:
    """Alternating sum over the g+1 faces of sgn(face) * [x in face^Q]."""
    J = [el.vec(v) for v in J]
    x = el.vec(x)
    total = 0
    for i in range(len(J)):
        cone = Cone(face(J, i))
        s = cone.sign()
        if s == 0:
            continue
        if QClosureTester(cone, Q).contains(x):
            total += (-1) ** i * s
    return total


def positivity_witness(J: Sequence[Sequence]) -> Vector | None:
    """A rational y with <alpha, y> >= 1 for every alpha in J, if one exists."""
    J = [el.vec(v) for v in J]
    return el.fourier_motzkin_witness(J, [1] * len(J))


def random_irreducible_companion(g: int, rng, coeff_range: int = 5) -> Matrix:
    """Companion matrix of a random monic integer polynomial certified irreducible."""
    while True:
        c = [int(v) for v in rng.integers(-coeff_range, coeff_range + 1, size=g)]
        if c[0] == 0:
            continue
        p = el.Polynomial(tuple(c) + (1,))
        if el.is_irreducible(p) is True:
            rows = [[Fraction(0)] * g for _ in range(g)]
            for j in range(g - 1):
                rows[j + 1][j] = Fraction(1)
            for i in range(g):
                rows[i][g - 1] = Fraction(-c[i])
            return el.mat(rows)


def random_nonzero_vector(g: int, rng, bound: int = 5) -> Vector:
    while True:
        v = [int(c) for c in rng.integers(-bound, bound + 1, size=g)]
        if any(v):
            return el.vec(v)


def cocycle_trial(g: int, rng, points: int = 10) -> tuple[list, Matrix, list[Vector], list[int]]:
    """One random cocycle check: (J, Q, sample points, defects).

    J is redrawn until a positivity witness exists, so the relation applies.
    """
    Q = random_irreducible_companion(g, rng)
    while True:
        J = [random_nonzero_vector(g, rng, 4) for _ in range(g + 1)]
        if positivity_witness(J) is not None:
            break
    faces = []
    for i in range(g + 1):
        cone = Cone(face(J, i))
        s = cone.sign()
        faces.append(((-1) ** i * s, QClosureTester(cone, Q) if s else None))
    xs = [random_nonzero_vector(g, rng, 6) for _ in range(points)]
    defects = [sum(c for c, t in faces if c and t.contains(x)) for x in xs]
    return J, Q, xs, defects
