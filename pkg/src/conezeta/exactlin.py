"""Exact rational linear algebra.

Vectors are tuples of :class:`fractions.Fraction`, matrices are tuples of
row tuples.  Everything here is immutable and exact; nothing rounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


class SingularMatrixError(ValueError):
    pass


def _q(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % v)
    return Fraction(v)


def vec(entries: Iterable) -> Vector:
    return tuple(_q(e) for e in entries)


def mat(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(vec(r) for r in rows)
    if m and len({len(r) for r in m}) != 1:
        raise ValueError("ragged matrix")
    return m


def from_columns(cols: Sequence[Sequence]) -> Matrix:
    return transpose(mat(cols))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def columns(m: Matrix) -> tuple:
    return transpose(m)


def dot(x: Sequence, y: Sequence):
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def matvec(m: Matrix, x: Sequence) -> Vector:
    return tuple(dot(row, x) for row in m)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def matscale(c, a: Matrix) -> Matrix:
    c = _q(c)
    return tuple(tuple(c * x for x in row) for row in a)


def matpow(a: Matrix, n: int) -> Matrix:
    if n < 0:
        a, n = inverse(a), -n
    result = identity(len(a))
    while n:
        if n & 1:
            result = matmul(result, a)
        a = matmul(a, a)
        n >>= 1
    return result


def vadd(x: Sequence, y: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vscale(c, x: Sequence) -> Vector:
    return tuple(c * a for a in x)


def is_zero(x: Sequence) -> bool:
    return all(a == 0 for a in x)


def det(m: Matrix) -> Fraction:
    """Determinant by Gaussian elimination over the rationals."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    a = [list(r) for r in m]
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        p = a[c][c]
        d *= p
        for r in range(c + 1, n):
            f = a[r][c]
            if f:
                f /= p
                row_c = a[c]
                a[r] = [x - f * y for x, y in zip(a[r], row_c)]
    return d


def sign(x) -> int:
    return (x > 0) - (x < 0)


def det_sign(m: Matrix) -> int:
    """Exact sign of the determinant, in {-1, 0, 1}."""
    return sign(det(m))


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Matrix) -> list[Vector]:
    """Basis of {x : m x = 0}; each basis vector has first nonzero entry positive."""
    cols = len(m[0])
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -a[i][f]
        first = next(v for v in x if v != 0)
        if first < 0:
            x = [-v for v in x]
        basis.append(tuple(x))
    return basis


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = tuple(tuple(row) + identity(n)[i] for i, row in enumerate(m))
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return tuple(tuple(a[i][n:]) for i in range(n))


def solve(m: Matrix, b: Sequence) -> Vector:
    """Solve m x = b for square invertible m."""
    n = len(m)
    aug = tuple(tuple(row) + (b[i],) for i, row in enumerate(m))
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return tuple(a[i][n] for i in range(n))


def primitive_integer(x: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a nonzero rational vector to a primitive integer vector."""
    x = vec(x)
    if is_zero(x):
        raise ValueError("zero vector has no primitive form")
    den = lcm(*(v.denominator for v in x))
    ints = [int(v * den) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints)


def format_rational(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# Polynomials


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = list(vec(self.coeffs))
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (Fraction(0),))

    @classmethod
    def from_roots_int(cls, coeffs: Iterable[int]) -> "Polynomial":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return self.leading == 1

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else "X^%d" % i)
            terms.append("%s%s" % (c, "*" + mono if mono else ""))
        return "Polynomial(%s)" % (" + ".join(terms) or "0")


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def char_poly(m: Matrix) -> Polynomial:
    """det(X*I - m) by the Faddeev-LeVerrier recursion (exact over Q)."""
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = identity(n)  # M_0 = 0 is skipped; M_1 = I
    for k in range(1, n + 1):
        am = matmul(m, mk)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        mk = matadd(am, matscale(c, identity(n)))
    return Polynomial(tuple(coeffs))


# --- polynomial arithmetic over F_p, used for irreducibility certificates ---


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod_divmod(a, b, p):
    a = list(a)
    _trim(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] * inv % p
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] = (a[i + shift] - f * c) % p
        _trim(a)
    return q, a


def _pmod_mulmod(a, b, f, p):
    prod = [x % p for x in _pmul(a, b)] if a and b else []
    return _pmod_divmod(prod, f, p)[1]


def _pmod_powmod(base, e, f, p):
    result = [1]
    base = _pmod_divmod(base, f, p)[1]
    while e:
        if e & 1:
            result = _pmod_mulmod(result, base, f, p)
        base = _pmod_mulmod(base, base, f, p)
        e >>= 1
    return result


def _pmod_gcd(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, _pmod_divmod(a, b, p)[1]
    return a


def _irreducible_mod_p(f: list[int], p: int) -> bool:
    """Ben-Or test for a monic integer polynomial reduced mod p."""
    fp = [c % p for c in f]
    n = len(fp) - 1
    x = [0, 1]
    xp = x
    for _ in range(1, n // 2 + 1):
        xp = _pmod_powmod(xp, p, fp, p)
        diff = _padd(xp, [0, p - 1])
        g = _pmod_gcd(fp, [c % p for c in diff], p)
        if len(g) > 1:
            return False
    return True


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def integral_monic(p: Polynomial) -> list[int]:
    """Coefficients of D^n p(X/D), a monic integer polynomial with the same splitting."""
    if not p.is_monic():
        raise ValueError("polynomial is not monic: %r" % (p,))
    n = p.degree
    d = lcm(*(c.denominator for c in p.coeffs))
    out = [p.coeffs[i] * d ** (n - i) for i in range(n + 1)]
    return [int(c) for c in out]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def is_irreducible(p: Polynomial) -> bool | None:
    """Irreducibility over Q.

    Returns True when certified, False when a factor is exhibited and None
    when neither certificate was found.  Degrees 2 and 3 are decided by the
    rational root test; higher degrees are certified by irreducibility
    modulo a small prime.
    """
    f = integral_monic(p)
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if f[0] == 0:
        return False
    for d in _divisors(f[0]):
        for r in (d, -d):
            if sum(c * r ** i for i, c in enumerate(f)) == 0:
                return False
    if n <= 3:
        return True
    for prime in _SMALL_PRIMES:
        if _irreducible_mod_p(f, prime):
            return True
    return None


def _pdivmod_q(a, b):
    """Division with remainder in Q[X]; coefficient lists lowest first."""
    a = [Fraction(c) for c in a]
    _trim(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        _trim(a)
    return q, a


def count_real_roots(p: Polynomial) -> int:
    """Number of distinct real roots, from a Sturm sequence."""
    f = list(p.coeffs)
    df = [i * c for i, c in enumerate(f)][1:]
    seq = [f, df]
    while len(seq[-1]) > 0 and any(seq[-1]):
        _, r = _pdivmod_q(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])

    def changes(signs):
        s = [x for x in signs if x != 0]
        return sum(1 for a, b in zip(s, s[1:]) if a != b)

    def at_pos_inf(poly):
        return sign(poly[-1])

    def at_neg_inf(poly):
        return sign(poly[-1]) * (-1) ** (len(poly) - 1)

    return changes([at_neg_inf(q) for q in seq]) - changes([at_pos_inf(q) for q in seq])


# ---------------------------------------------------------------------------
# Lattice utilities


def parallelepiped_lattice_points(generators: Sequence[Sequence]) -> list[Vector]:
    """Integer points of the half-open parallelepiped sum [0,1) alpha_i.

    Scans the bounding box and keeps the points whose exact coordinates in
    the generator basis lie in [0, 1).  There are exactly |det| of them.
    """
    gens = [vec(a) for a in generators]
    g = len(gens)
    if any(v.denominator != 1 for a in gens for v in a):
        raise ValueError("generators must be integer vectors")
    a = transpose(tuple(gens))
    if len(a) != g or det(a) == 0:
        raise SingularMatrixError("generators are linearly dependent")
    inv = inverse(a)
    lo = [sum(min(v[i], 0) for v in gens) for i in range(g)]
    hi = [sum(max(v[i], 0) for v in gens) for i in range(g)]
    out = []
    for pt in itertools.product(*(range(int(l), int(h) + 1) for l, h in zip(lo, hi))):
        x = vec(pt)
        c = matvec(inv, x)
        if all(0 <= ci < 1 for ci in c):
            out.append(x)
    return out


def fourier_motzkin_witness(rows: Sequence[Sequence], rhs: Sequence) -> Vector | None:
    """Find y with <rows[i], y> >= rhs[i] for all i, or None if infeasible.

    Exact Fourier-Motzkin elimination with back substitution; intended for
    a handful of constraints in small dimension.
    """
    cons = [(vec(r), _q(b)) for r, b in zip(rows, rhs)]
    n = len(cons[0][0]) if cons else 0
    stages = []
    current = cons
    for var in range(n - 1, -1, -1):
        stages.append((var, current))
        pos = [(r, b) for r, b in current if r[var] > 0]
        neg = [(r, b) for r, b in current if r[var] < 0]
        zero = [(r, b) for r, b in current if r[var] == 0]
        nxt = list(zero)
        for rp, bp in pos:
            for rn, bn in neg:
                cp, cn = rp[var], -rn[var]
                r = tuple(cn * x + cp * y for x, y in zip(rp, rn))
                nxt.append((r, cn * bp + cp * bn))
        current = nxt
    if any(b > 0 for _, b in current):
        return None
    y = [Fraction(0)] * n
    for var, cs in reversed(stages):
        lower, upper = None, None
        for r, b in cs:
            rest = b - sum(r[j] * y[j] for j in range(n) if j != var)
            if r[var] > 0:
                bound = rest / r[var]
                lower = bound if lower is None else max(lower, bound)
            elif r[var] < 0:
                bound = rest / r[var]
                upper = bound if upper is None else min(upper, bound)
        if lower is None and upper is None:
            val = Fraction(0)
        elif lower is None:
            val = min(Fraction(0), upper)
        elif upper is None:
            val = max(Fraction(0), lower)
        else:
            val = lower if lower == upper else (lower + upper) / 2
        y[var] = val
    y = tuple(y)
    assert all(dot(r, y) >= b for r, b in cons)
    return y
