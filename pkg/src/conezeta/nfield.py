"""Number fields, ideal bases and their embedding data.

A field is given by a monic integral minimal polynomial of a generator
theta.  Field elements are coordinate tuples in the power basis
1, theta, ..., theta^(g-1).  An ideal is given by a Z-basis w whose rows
are power-basis coordinates; vectors x in Q^g stand for <x, w>.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

import mpmath
import numpy as np

from . import exactlin as el
from .exactlin import Matrix, Polynomial, Vector

MAX_PRECISION = 4096


class PrecisionError(RuntimeError):
    """Raised when a numeric decision cannot be made at the maximal precision."""


class ReducibleError(ValueError):
    pass


def _as_polynomial(p) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial(tuple(p))


# ---------------------------------------------------------------------------
# Fields


@dataclass(frozen=True, eq=False)
class NumberField:
    min_poly: Polynomial
    embeddings: tuple  # mpmath mpc, real embeddings first
    r1: int
    r2: int
    precision: int
    irreducible: bool | None = True

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    @property
    def companion(self) -> Matrix:
        """Multiplication by theta on the power basis (columns are images)."""
        g = self.degree
        c = self.min_poly.coeffs
        rows = [[Fraction(0)] * g for _ in range(g)]
        for j in range(g - 1):
            rows[j + 1][j] = Fraction(1)
        for i in range(g):
            rows[i][g - 1] = -c[i]
        return el.mat(rows)

    def mult_matrix(self, a: Sequence) -> Matrix:
        """Regular representation of the element with power coordinates a."""
        g = self.degree
        comp = self.companion
        acc = el.matscale(0, el.identity(g))
        power = el.identity(g)
        for coeff in el.vec(a):
            if coeff:
                acc = el.matadd(acc, el.matscale(coeff, power))
            power = el.matmul(comp, power)
        return acc

    def mul(self, a: Sequence, b: Sequence) -> Vector:
        return el.matvec(self.mult_matrix(a), el.vec(b))

    def inv(self, a: Sequence) -> Vector:
        one = (Fraction(1),) + (Fraction(0),) * (self.degree - 1)
        return el.solve(self.mult_matrix(a), one)

    def trace(self, a: Sequence) -> Fraction:
        m = self.mult_matrix(a)
        return sum((m[i][i] for i in range(self.degree)), Fraction(0))

    def norm(self, a: Sequence) -> Fraction:
        return el.det(self.mult_matrix(a))

    def trace_form(self) -> Matrix:
        g = self.degree
        basis = [tuple(Fraction(int(i == j)) for j in range(g)) for i in range(g)]
        return tuple(
            tuple(self.trace(self.mul(basis[i], basis[j])) for j in range(g)) for i in range(g)
        )

    def is_real(self, i: int) -> bool:
        return i < self.r1

    def places(self) -> list[tuple[int, int]]:
        """(embedding index, local degree) for each archimedean place."""
        out = [(i, 1) for i in range(self.r1)]
        out += [(self.r1 + 2 * j, 2) for j in range(self.r2)]
        return out

    def root(self, i: int, bits: int | None = None):
        """The i-th embedding of theta, refined to ``bits`` of precision."""
        if bits is None or bits <= self.precision:
            return self.embeddings[i]
        return _refined_root(self, i, bits)

    def embed(self, a: Sequence, i: int, bits: int | None = None):
        r = self.root(i, bits)
        with mpmath.workprec(bits or self.precision):
            acc = mpmath.mpf(0)
            for c in reversed(el.vec(a)):
                acc = acc * r + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def element_sign(self, a: Sequence, i: int) -> int:
        """Exact sign of a real embedding of a field element.

        The value is algebraic and vanishes only for a = 0, so the
        precision ladder terminates for every nonzero element.
        """
        if not self.is_real(i):
            raise ValueError("embedding %d is not real" % i)
        a = el.vec(a)
        if el.is_zero(a):
            return 0
        bits = max(self.precision, 53)
        while bits <= MAX_PRECISION:
            with mpmath.workprec(bits + 20):
                v = mpmath.re(self.embed(a, i, bits))
                scale = sum(abs(mpmath.mpf(c.numerator) / c.denominator) for c in a)
                scale *= max(1, abs(mpmath.re(self.root(i, bits)))) ** (len(a) - 1)
                tol = scale * mpmath.mpf(2) ** (-bits + 8) * len(a)
                if abs(v) > tol:
                    return 1 if v > 0 else -1
            bits *= 2
        raise PrecisionError("sign of embedding undecided at %d bits" % MAX_PRECISION)


_refine_cache: dict = {}


def _refined_root(fld: NumberField, i: int, bits: int):
    key = (fld.min_poly.coeffs, i, bits)
    if key in _refine_cache:
        return _refine_cache[key]
    coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in fld.min_poly.coeffs]
    with mpmath.workprec(bits + 20):
        r = mpmath.mpc(fld.embeddings[i])
        r = _newton(coeffs, r, bits)
        if fld.is_real(i):
            r = mpmath.mpf(mpmath.re(r))
    _refine_cache[key] = r
    return r


def _horner(coeffs, x):
    v, dv = 0, 0
    for c in reversed(coeffs):
        dv = dv * x + v
        v = v * x + c
    return v, dv


def _newton(coeffs, r, bits):
    for _ in range(200):
        v, dv = _horner(coeffs, r)
        if dv == 0:
            break
        step = v / dv
        r -= step
        if abs(step) <= abs(r) * mpmath.mpf(2) ** (-bits - 4) or step == 0:
            break
    return r


def build_field(min_poly, precision: int = 53, assume_irreducible: bool = False) -> NumberField:
    """Field data for a monic integral minimal polynomial (lowest degree first)."""
    p = _as_polynomial(min_poly)
    if not p.is_monic() or not p.is_integral():
        raise ValueError("minimal polynomial must be monic with integer coefficients")
    if p.degree < 1:
        raise ValueError("minimal polynomial must have degree >= 1")
    verdict = el.is_irreducible(p)
    if verdict is False:
        raise ReducibleError("minimal polynomial is reducible: %r" % (p,))
    if verdict is None and not assume_irreducible:
        raise ReducibleError("irreducibility not certified; pass assume_irreducible=True")
    n_real = el.count_real_roots(p)
    g = p.degree
    bits = precision
    while bits <= MAX_PRECISION:
        roots = _roots(p, bits)
        if roots is not None:
            real = [r for r in roots if abs(mpmath.im(r)) <= _root_tol(r, bits)]
            cplx = [r for r in roots if mpmath.im(r) > _root_tol(r, bits)]
            if len(real) == n_real and 2 * len(cplx) == g - n_real:
                real = sorted((mpmath.mpf(mpmath.re(r)) for r in real), reverse=True)
                cplx = sorted(cplx, key=lambda z: (-mpmath.re(z), -mpmath.im(z)))
                emb = list(real)
                for z in cplx:
                    emb += [z, mpmath.conj(z)]
                return NumberField(p, tuple(emb), n_real, len(cplx), precision, verdict)
        bits *= 2
    raise PrecisionError("root isolation failed at %d bits" % MAX_PRECISION)


def _root_tol(r, bits):
    return max(1, abs(r)) * mpmath.mpf(2) ** (-bits // 2)


def _roots(p: Polynomial, bits: int):
    coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in p.coeffs]
    with mpmath.workprec(bits + 30):
        try:
            roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=bits)
        except mpmath.libmp.NoConvergence:
            return None
        roots = [_newton(coeffs, mpmath.mpc(r), bits) for r in roots]
        for r in roots:
            v, _ = _horner(coeffs, r)
            scale = sum(abs(c) * max(1, abs(r)) ** i for i, c in enumerate(coeffs))
            if abs(v) > scale * mpmath.mpf(2) ** (-bits + 4):
                return None
    with mpmath.workprec(bits):
        return [+r for r in roots]


# ---------------------------------------------------------------------------
# Norm forms


@dataclass(frozen=True)
class NormForm:
    """Homogeneous degree-g polynomial N(x) = numer(x) / denom with integer coefficients."""

    monomials: tuple  # ((exponents), int coefficient)
    denom: int

    def exact(self, x: Sequence) -> Fraction:
        x = el.vec(x)
        total = Fraction(0)
        for exps, c in self.monomials:
            term = Fraction(c)
            for xi, e in zip(x, exps):
                if e:
                    term *= xi ** e
            total += term
        return total / self.denom

    def numerators(self, pts: np.ndarray) -> np.ndarray:
        """Integer values denom*N(x) for integer points (rows), overflow-guarded."""
        pts = np.asarray(pts)
        if pts.size == 0:
            return np.zeros(0, dtype=np.int64)
        g = pts.shape[1]
        bound = int(np.abs(pts).max()) if pts.dtype != object else max(abs(int(v)) for v in pts.flat)
        worst = sum(abs(c) for _, c in self.monomials) * bound ** g
        if worst < 2 ** 62 and pts.dtype != object:
            p = pts.astype(np.int64)
            out = np.zeros(len(p), dtype=np.int64)
        else:
            p = pts.astype(object)
            out = np.zeros(len(p), dtype=object)
        for exps, c in self.monomials:
            term = np.full(len(p), c, dtype=out.dtype)
            for j in range(g):
                for _ in range(exps[j]):
                    term = term * p[:, j]
            out = out + term
        return out


def _norm_form(rho: Sequence[Matrix]) -> NormForm:
    g = len(rho)
    # entry (i, j) of sum_k x_k rho_k is a linear form; expand det by Leibniz
    poly: dict = {}
    for perm in itertools.permutations(range(g)):
        sgn = _perm_sign(perm)
        terms = {(0,) * g: Fraction(sgn)}
        for i in range(g):
            j = perm[i]
            new: dict = {}
            for exps, c in terms.items():
                for k in range(g):
                    coeff = rho[k][i][j]
                    if coeff:
                        e = list(exps)
                        e[k] += 1
                        e = tuple(e)
                        new[e] = new.get(e, Fraction(0)) + c * coeff
            terms = new
        for e, c in terms.items():
            poly[e] = poly.get(e, Fraction(0)) + c
    poly = {e: c for e, c in poly.items() if c}
    d = lcm(*(c.denominator for c in poly.values())) if poly else 1
    return NormForm(tuple(sorted((e, int(c * d)) for e, c in poly.items())), d)


def _perm_sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


# ---------------------------------------------------------------------------
# Ideals


@dataclass(frozen=True, eq=False)
class IdealBasis:
    field: NumberField
    basis_matrix: Matrix  # row i = power coordinates of w_i
    theta: Vector  # power coordinates of theta
    rho: tuple  # rho_w(w_j)
    Q: Matrix
    dual_matrix: Matrix  # row i = power coordinates of w*_i
    W_numeric: object  # mpmath matrix, column i = tau_i(w)
    W_dual_numeric: object
    detW: object
    norm_form: NormForm

    @property
    def degree(self) -> int:
        return self.field.degree

    def element(self, x: Sequence) -> Vector:
        """Power coordinates of <x, w>."""
        return el.matvec(el.transpose(self.basis_matrix), el.vec(x))

    def coords(self, a: Sequence) -> Vector:
        """Inverse of element(): coordinates of a field element in the basis w."""
        return el.solve(el.transpose(self.basis_matrix), el.vec(a))

    def rho_of(self, a: Sequence) -> Matrix:
        bt = el.transpose(self.basis_matrix)
        return el.matmul(el.inverse(bt), el.matmul(self.field.mult_matrix(a), bt))

    def embed_vector(self, x: Sequence, i: int, bits: int | None = None):
        return self.field.embed(self.element(x), i, bits)

    def trace_form_det(self) -> Fraction:
        b = self.basis_matrix
        return el.det(el.matmul(b, el.matmul(self.field.trace_form(), el.transpose(b))))


def build_ideal(fld: NumberField, basis_matrix, theta_coords=None) -> IdealBasis:
    b = el.mat(basis_matrix)
    g = fld.degree
    if len(b) != g or el.det(b) == 0:
        raise ValueError("ideal basis must be an invertible %dx%d matrix" % (g, g))
    if theta_coords is None:
        theta_coords = [0, 1] + [0] * (g - 2) if g > 1 else [0]
    theta = el.vec(theta_coords)
    bt = el.transpose(b)
    bt_inv = el.inverse(bt)

    def rho_of(a):
        return el.matmul(bt_inv, el.matmul(fld.mult_matrix(a), bt))

    rho = tuple(rho_of(row) for row in b)
    Q = rho_of(theta)
    cp = el.char_poly(Q)
    if g > 1 and el.is_irreducible(cp) is False:
        raise ReducibleError("theta does not generate the field (char poly reducible)")
    tr = fld.trace_form()
    dual = el.matmul(bt_inv, el.inverse(tr))
    # spot checks: multiplicativity on basis pairs, exact dual pairing
    for i in range(g):
        for j in range(g):
            prod = fld.mul(b[i], b[j])
            assert el.matmul(rho[i], rho[j]) == rho_of(prod)
            assert fld.trace(fld.mul(b[i], dual[j])) == (1 if i == j else 0)
    with mpmath.workprec(fld.precision):
        W = mpmath.matrix(g, g)
        Wd = mpmath.matrix(g, g)
        for i in range(g):
            for j in range(g):
                W[j, i] = fld.embed(b[j], i)
                Wd[j, i] = fld.embed(dual[j], i)
        detW = mpmath.det(W)
    return IdealBasis(fld, b, theta, rho, Q, dual, W, Wd, detW, _norm_form(rho))


def norm_exact(a: IdealBasis, x: Sequence) -> Fraction:
    """N(<x, w>) as the determinant of sum_j x_j rho_w(w_j)."""
    x = el.vec(x)
    g = a.degree
    m = el.matscale(0, el.identity(g))
    for xj, r in zip(x, a.rho):
        if xj:
            m = el.matadd(m, el.matscale(xj, r))
    return el.det(m)


def component_of(a: IdealBasis, x) -> tuple | None:
    """Sign vector of the real embeddings of <x, w>, or None on the norm-zero locus."""
    if isinstance(x, EmbeddedVector):
        return x.component()
    if norm_exact(a, x) == 0:
        return None
    elem = a.element(x)
    return tuple(a.field.element_sign(elem, i) for i in range(a.field.r1))


def sign_character(a: IdealBasis, x: Sequence, power: int) -> int:
    n = norm_exact(a, x)
    if n == 0:
        raise ValueError("sign character is undefined at norm zero")
    return (1 if n > 0 else -1) ** power


# ---------------------------------------------------------------------------
# Characters


def parse_sign_key(key) -> tuple:
    if isinstance(key, str):
        out = []
        for ch in key:
            if ch == "+":
                out.append(1)
            elif ch == "-":
                out.append(-1)
            else:
                raise ValueError("bad sign key %r" % key)
        return tuple(out)
    return tuple(int(s) for s in key)


def format_sign_key(mu: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in mu)


@dataclass(frozen=True)
class Character:
    """Integer-valued function on sign vectors {+1,-1}^r1."""

    r1: int
    values: tuple = field(default=())  # sorted ((mu), value) with nonzero values only

    @classmethod
    def from_mapping(cls, r1: int, mapping: Mapping) -> "Character":
        vals = {}
        for k, v in mapping.items():
            mu = parse_sign_key(k)
            if len(mu) != r1:
                raise ValueError("sign key %r has length %d, expected %d" % (k, len(mu), r1))
            if int(v) != v:
                raise ValueError("character values must be integers")
            vals[mu] = vals.get(mu, 0) + int(v)
        return cls(r1, tuple(sorted((mu, v) for mu, v in vals.items() if v)))

    @classmethod
    def indicator(cls, mu) -> "Character":
        mu = parse_sign_key(mu)
        return cls(len(mu), ((mu, 1),))

    @classmethod
    def constant(cls, r1: int, value: int = 1) -> "Character":
        return cls.from_mapping(r1, {mu: value for mu in all_components(r1)})

    def __call__(self, mu) -> int:
        if mu is None:
            return 0
        mu = parse_sign_key(mu)
        for m, v in self.values:
            if m == mu:
                return v
        return 0

    def support(self) -> list[tuple]:
        return [mu for mu, _ in self.values]

    def is_zero(self) -> bool:
        return not self.values

    def to_mapping(self) -> dict:
        return {format_sign_key(mu): v for mu, v in self.values}

    def twisted(self, power: int) -> "Character":
        """The character mu -> sign(prod mu)^power * chi(mu)."""
        out = {}
        for mu, v in self.values:
            s = 1
            for m in mu:
                s *= m
            out[mu] = v * s ** power
        return Character.from_mapping(self.r1, out)


def all_components(r1: int) -> list[tuple]:
    return [tuple(p) for p in itertools.product((1, -1), repeat=r1)]


# ---------------------------------------------------------------------------
# Points on the norm-zero locus


@dataclass(frozen=True)
class EmbeddedVector:
    """The real vector tau_j(y) for a vector y in F^g.

    Pairings with rational vectors are field elements, so zero tests are
    exact and signs are decided through ``element_sign``.
    """

    ideal: IdealBasis
    entries: tuple  # g power-coordinate tuples
    index: int

    def dot_sign(self, v: Sequence) -> int:
        g = self.ideal.degree
        acc = [Fraction(0)] * g
        for vi, y in zip(el.vec(v), self.entries):
            if vi:
                for t in range(g):
                    acc[t] += vi * y[t]
        return self.ideal.field.element_sign(acc, self.index)

    def transform(self, m: Matrix) -> "EmbeddedVector":
        g = self.ideal.degree
        out = []
        for row in m:
            acc = [Fraction(0)] * g
            for c, y in zip(row, self.entries):
                if c:
                    for t in range(g):
                        acc[t] += c * y[t]
            out.append(tuple(acc))
        return EmbeddedVector(self.ideal, tuple(out), self.index)

    def __neg__(self):
        return EmbeddedVector(self.ideal, tuple(tuple(-c for c in y) for y in self.entries), self.index)

    def is_zero(self) -> bool:
        return all(el.is_zero(y) for y in self.entries)

    def component(self):
        return None

    def numeric(self):
        fld = self.ideal.field
        return [mpmath.re(fld.embed(y, self.index)) for y in self.entries]


def norm_zero_vector(a: IdealBasis, y: Sequence[Sequence], index: int) -> EmbeddedVector:
    """tau_index(y) where y in F^g satisfies sum y_i w_i = 0, so N_w vanishes there."""
    fld = a.field
    if not fld.is_real(index):
        raise ValueError("norm-zero vectors are built from real embeddings")
    entries = tuple(el.vec(e) for e in y)
    total = [Fraction(0)] * a.degree
    for yi, wi in zip(entries, a.basis_matrix):
        prod = fld.mul(yi, wi)
        total = [s + p for s, p in zip(total, prod)]
    if any(total):
        raise ValueError("sum y_i w_i must vanish")
    return EmbeddedVector(a, entries, index)


def random_norm_zero_vectors(a: IdealBasis, count: int, rng) -> list[EmbeddedVector]:
    """Generic nonzero points on the norm-zero locus of a field with real embeddings."""
    fld = a.field
    g = a.degree
    if fld.r1 == 0:
        return []
    out = []
    b = a.basis_matrix
    while len(out) < count:
        # y = c*(w_2, -w_1, 0, ...) + d*(w_3, 0, -w_1, ...) style combinations
        y = [[Fraction(0)] * g for _ in range(g)]
        for j in range(1, g):
            c = el.vec(rng.integers(-3, 4, size=g).tolist())
            if el.is_zero(c):
                continue
            cw_j = fld.mul(c, b[j])
            cw_0 = fld.mul(c, b[0])
            y[0] = [s + t for s, t in zip(y[0], cw_j)]
            y[j] = [s - t for s, t in zip(y[j], cw_0)]
        if all(el.is_zero(e) for e in y):
            continue
        index = int(rng.integers(0, fld.r1))
        out.append(norm_zero_vector(a, y, index))
    return out
