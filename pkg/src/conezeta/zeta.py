"""Partial zeta values from signed cone chains, and a brute-force orbit oracle.

Pairing the chain with the integrated cone sums gives

    sum_i c_i s_{I_i} = (k!)^g detW / (g+gk-1)! * zeta(eps^(k+1) chi, k+1),

where s_I = (k!)^g detW / (g+gk-1)! * sgn(I) sum 1/N_w(x)^(k+1).  The
assembly below forms the complex s_I, pairs them with the chain and
divides out the common weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import exactlin as el
from .cones import Cone
from .conesum import ConeSumConfig, cone_zeta_sum
from .hurwitz import NotAdmissibleError, intq_factor, is_q_admissible
from .nfield import MAX_PRECISION, Character, IdealBasis, PrecisionError
from .sfd import SFDReport, SignedConeChain, UnitGroupData


class UnverifiedChainError(RuntimeError):
    pass


@dataclass(frozen=True)
class ZetaResult:
    value: object  # mpmath.mpf
    imag_residual: float
    err_estimate: float
    k: int
    chain_used: dict
    depth: int
    term_values: tuple = field(default=(), compare=False)

    def to_json_obj(self) -> dict:
        return {
            "value": mpmath.nstr(self.value, 17),
            "imag_residual": self.imag_residual,
            "err_estimate": self.err_estimate,
            "k": self.k,
            "depth": self.depth,
            "chain": self.chain_used,
            "term_values": [mpmath.nstr(v, 17) for v in self.term_values],
        }


def det_w(a: IdealBasis, rtol: float | None = None):
    """Determinant of the embedding matrix, checked against the exact trace form."""
    exact = a.trace_form_det()
    fld = a.field
    bits = fld.precision
    while bits <= MAX_PRECISION:
        with mpmath.workprec(bits + 10):
            if bits == fld.precision:
                d = a.detW
            else:
                g = a.degree
                W = mpmath.matrix(g, g)
                for i in range(g):
                    for j in range(g):
                        W[j, i] = fld.embed(a.basis_matrix[j], i, bits)
                d = mpmath.det(W)
            target = mpmath.mpf(exact.numerator) / exact.denominator
            tol = rtol if rtol is not None else 2.0 ** (-0.75 * bits)
            if abs(d * d - target) <= tol * abs(target):
                return d
        bits *= 2
    raise PrecisionError("(detW)^2 does not match the trace-form determinant")


def zeta_value(
    a: IdealBasis,
    chain: SignedConeChain,
    chi: Character,
    k: int,
    cfg: ConeSumConfig = ConeSumConfig(),
    verification: SFDReport | None = None,
    force: bool = False,
) -> ZetaResult:
    """zeta(eps^(k+1) chi, a^-1, k+1) from a verified signed fundamental domain."""
    if k < 1:
        raise ValueError("k must be >= 1 (series divergence)")
    if not force and (verification is None or not verification.ok):
        raise UnverifiedChainError("chain has not passed verification; use force to override")
    prec = max(cfg.precision, a.field.precision)
    with mpmath.workprec(prec):
        factor = intq_factor(a, k)
        total = mpmath.mpc(0)
        err = 0.0
        terms = []
        for c, I in chain.terms:
            cone = Cone(I)
            if not is_q_admissible(a, cone):
                raise NotAdmissibleError("chain simplex %s is not Q-admissible" % (I,))
            res = cone_zeta_sum(a, cone, k, cfg)
            s_I = factor * res.value
            total += c * s_I
            err += abs(c) * res.err_estimate
            terms.append(res.value)
        value = total / factor if chain.terms else mpmath.mpc(0)
    return ZetaResult(
        mpmath.re(value),
        float(abs(mpmath.im(value))),
        err,
        k,
        chain.summary(),
        cfg.depth,
        tuple(terms),
    )


# ---------------------------------------------------------------------------
# Oracle


@dataclass(frozen=True)
class OracleResult:
    value: float
    half_value: float
    orbits: int
    norm_bound: float

    @property
    def stabilization(self) -> float:
        if self.value == 0:
            return abs(self.half_value)
        return abs(self.value - self.half_value) / abs(self.value)


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    less = np.zeros(len(a), dtype=bool)
    equal = np.ones(len(a), dtype=bool)
    for j in range(a.shape[1]):
        less |= equal & (a[:, j] < b[:, j])
        equal &= a[:, j] == b[:, j]
    return less


def brute_zeta_oracle(
    a: IdealBasis,
    units: UnitGroupData,
    chi: Character,
    k: int,
    norm_bound: float,
    slack: float = 1e-7,
) -> OracleResult:
    """Sum of eps(x)^(k+1) chi(x) / |N(x)|^(k+1) over unit orbits with |N(x)| <= T.

    Orbit representatives are found in a coordinate box that contains every
    element whose log-embedding lies in the fundamental interval of the unit
    lattice; each orbit is keyed by the lexicographically least of its
    elements with log-parameter in a slightly widened interval.
    """
    if k < 1:
        raise ValueError("k must be >= 1 (series divergence)")
    if units.rank > 1:
        raise NotImplementedError("oracle supports unit rank <= 1")
    fld = a.field
    g = a.degree
    if chi.is_zero():
        return OracleResult(0.0, 0.0, 0, norm_bound)
    T = float(norm_bound)
    W = np.array([[complex(a.W_numeric[j, i]) for i in range(g)] for j in range(g)])
    places = fld.places()
    if units.rank == 1:
        eps_coords = units.unit_coords[0]
        eps_abs = np.array([abs(complex(fld.embed(eps_coords, i))) for i in range(g)])
        bounds = T ** (1.0 / g) * np.maximum(1.0, eps_abs) ** (1 + 1e-3)
        p0, e0 = places[0]
        ell0 = math.log(eps_abs[p0])
    else:
        bounds = np.full(g, T ** (1.0 / g))
    wt_inv = np.linalg.inv(W.T)
    reach = np.abs(wt_inv) @ bounds * (1 + 1e-9) + 1
    axes = [np.arange(-int(r), int(r) + 1) for r in reach]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, g)
    nf = a.norm_form
    numer = nf.numerators(grid)
    keep = (numer != 0) & (np.abs(numer) <= T * nf.denom)
    pts = grid[keep]

    def log_param(p: np.ndarray) -> np.ndarray:
        vals = p.astype(np.float64) @ W[:, p0]
        norms = nf.numerators(p).astype(np.float64) / nf.denom
        return (np.log(np.abs(vals)) - np.log(np.abs(norms)) / g) / ell0

    torsion = [np.array([[int(c) for c in row] for row in z], dtype=np.int64) for z in units.torsion_elements()]
    candidates = []
    if units.rank == 1:
        t = log_param(pts)
        eps = units.generators[0]
        shifts = sorted({int(m) for m in np.unique(np.floor(-t))} | {int(m) for m in np.unique(np.floor(-t)) + 1}
                        | {int(m) for m in np.unique(np.floor(-t)) - 1})
        for m in shifts:
            gm = np.array([[int(c) for c in row] for row in el.matpow(eps, m)], dtype=object)
            moved = (pts.astype(object) @ gm.T)
            moved = moved.astype(np.int64) if np.abs(moved).max() < 2 ** 62 else moved
            tm = log_param(moved)
            ok = (tm >= -slack) & (tm <= 1 + slack)
            for z in torsion:
                candidates.append(((moved @ z.T).astype(np.int64), ok))
    else:
        for z in torsion:
            candidates.append(((pts @ z.T).astype(np.int64), np.ones(len(pts), dtype=bool)))
    best = None
    have = np.zeros(len(pts), dtype=bool)
    for cand, ok in candidates:
        if best is None:
            best = cand.copy()
            have = ok.copy()
            continue
        take = ok & (~have | _lex_less(cand, best))
        best[take] = cand[take]
        have |= ok
    if not have.all():
        raise ArithmeticError("orbit canonicalisation failed for some points")
    reps = np.unique(best, axis=0)
    norms = nf.numerators(reps).astype(np.float64) / nf.denom
    if fld.r1:
        signs = np.sign(np.real(reps.astype(np.float64) @ W[:, : fld.r1])).astype(int)
        chis = np.array([chi(tuple(s)) for s in signs], dtype=np.float64)
    else:
        chis = np.full(len(reps), float(chi(())))
    terms = chis / norms ** (k + 1)
    full = math.fsum(terms[np.abs(norms) <= T])
    half = math.fsum(terms[np.abs(norms) <= T / 2])
    return OracleResult(full, half, len(reps), T)
