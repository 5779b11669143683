"""Command-line front end: ``zeta run``, ``zeta verify`` and ``zeta cocycle-test``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import exactlin as el
from .cones import cocycle_trial
from .conesum import ConeSumConfig
from .nfield import Character, PrecisionError, build_field, build_ideal
from .sfd import SignedConeChain, build_sfd, build_unit_group, sample_points, verify_sfd
from .zeta import brute_zeta_oracle, zeta_value

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_PRECISION = 3
EXIT_PARSE = 4


class SpecError(ValueError):
    pass


@dataclass
class JobSpec:
    min_poly: list
    chi: dict
    k: int = 1
    ideal_basis: list | None = None
    theta: list | None = None
    units: list = field(default_factory=list)
    torsion: list | None = None
    depth: int = 128
    precision: int = 64
    verify_samples: int = 200
    null_samples: int = 20
    oracle: dict | None = None
    seed: int = 0

    def validate(self) -> "JobSpec":
        if not self.min_poly or any(int(c) != c for c in self.min_poly):
            raise SpecError("min_poly must be a list of integers")
        if int(self.k) != self.k or self.k < 1:
            raise SpecError("k must be ≥ 1 (series divergence)")
        if self.depth < 1:
            raise SpecError("depth must be ≥ 1")
        g = len(self.min_poly) - 1
        if self.ideal_basis is not None:
            if len(self.ideal_basis) != g or any(len(r) != g for r in self.ideal_basis):
                raise SpecError("ideal_basis must be %dx%d" % (g, g))
            el.mat(self.ideal_basis)
        for u in self.units:
            if len(u) != g:
                raise SpecError("unit coordinates must have length %d" % g)
            el.vec(u)
        if self.torsion is not None and len(self.torsion) != g:
            raise SpecError("torsion coordinates must have length %d" % g)
        if not isinstance(self.chi, dict):
            raise SpecError("chi must map sign strings to integers")
        return self

    @classmethod
    def from_obj(cls, obj: dict) -> "JobSpec":
        if not isinstance(obj, dict):
            raise SpecError("job spec must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise SpecError("unknown spec fields: %s" % ", ".join(sorted(extra)))
        try:
            spec = cls(**obj)
        except TypeError as exc:
            raise SpecError(str(exc)) from None
        return spec.validate()

    @classmethod
    def from_json(cls, text: str) -> "JobSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("invalid JSON: %s" % exc) from None
        return cls.from_obj(obj)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PrecisionError as exc:
        raise StageError(name, str(exc), EXIT_PRECISION) from exc
    except (ValueError, ArithmeticError, NotImplementedError, RuntimeError) as exc:
        raise StageError(name, str(exc), EXIT_PARSE if name == "parse" else EXIT_VERIFY) from exc


class StageError(Exception):
    def __init__(self, stage: str, message: str, code: int):
        super().__init__(message)
        self.stage = stage
        self.message = message
        self.code = code


def _setup(spec: JobSpec):
    fld = _stage("field", build_field, spec.min_poly, spec.precision)
    g = fld.degree
    basis = spec.ideal_basis if spec.ideal_basis is not None else el.identity(g)
    a = _stage("ideal", build_ideal, fld, basis, spec.theta)
    units = _stage("units", build_unit_group, a, spec.units, spec.torsion)
    chi = _stage("parse", Character.from_mapping, fld.r1, spec.chi)
    return a, units, chi


def _verify(spec, a, units, chain, chi):
    rng = np.random.default_rng(spec.seed)
    samples = sample_points(a, spec.verify_samples, spec.null_samples, rng)
    return _stage("verify", verify_sfd, a, chain, chi, samples, units)


def run(spec: JobSpec, force: bool = False, emit_chain: str | None = None) -> tuple[dict, int]:
    timings = {}
    t0 = time.perf_counter()
    a, units, chi = _setup(spec)
    timings["setup"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    chain = _stage("chain", build_sfd, a, units, chi)
    timings["chain"] = time.perf_counter() - t0
    if emit_chain:
        with open(emit_chain, "w") as fh:
            fh.write(chain.to_json())
    t0 = time.perf_counter()
    report = _verify(spec, a, units, chain, chi)
    timings["verify"] = time.perf_counter() - t0
    out: dict[str, Any] = {
        "chain": chain.to_json_obj(),
        "verification": report.to_json_obj(),
    }
    if not report.ok and not force:
        out["timings"] = timings
        return out, EXIT_VERIFY
    t0 = time.perf_counter()
    cfg = ConeSumConfig(depth=spec.depth, precision=spec.precision)
    z = _stage("zeta", zeta_value, a, chain, chi, spec.k, cfg, report, force)
    timings["zeta"] = time.perf_counter() - t0
    out["zeta"] = z.to_json_obj()
    if spec.oracle:
        t0 = time.perf_counter()
        o = _stage("oracle", brute_zeta_oracle, a, units, chi, spec.k, float(spec.oracle["norm_bound"]))
        timings["oracle"] = time.perf_counter() - t0
        rel = abs(float(z.value) - o.value) / abs(o.value) if o.value else abs(float(z.value))
        out["oracle"] = {"value": o.value, "stabilization": o.stabilization, "orbits": o.orbits,
                         "norm_bound": o.norm_bound, "relative_difference": rel}
    out["timings"] = timings
    return out, EXIT_OK


def _load_spec(path: str) -> JobSpec:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return JobSpec.from_json(text)


def _error(stage: str, message: str, code: int) -> int:
    print(json.dumps({"error": {"stage": stage, "message": message, "exit_code": code}}), file=sys.stderr)
    return code


def cmd_run(args) -> int:
    spec = _load_spec(args.spec)
    if args.depth is not None:
        spec.depth = args.depth
    if args.precision is not None:
        spec.precision = args.precision
    if args.oracle is not None:
        spec.oracle = {"norm_bound": args.oracle}
    spec.validate()
    report, code = run(spec, force=args.force, emit_chain=args.emit_chain)
    print(json.dumps(report, indent=2))
    return code


def cmd_verify(args) -> int:
    spec = _load_spec(args.spec)
    with open(args.chain) as fh:
        chain = SignedConeChain.from_json(fh.read())
    a, units, chi = _setup(spec)
    report = _verify(spec, a, units, chain, chi)
    print(json.dumps(report.to_json_obj(), indent=2))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_cocycle(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    checked = 0
    for _ in range(args.trials):
        J, Q, xs, defects = cocycle_trial(args.degree, rng, args.points)
        checked += len(defects)
        failures += sum(1 for d in defects if d != 0)
    print(json.dumps({"degree": args.degree, "trials": args.trials, "points": checked, "failures": failures}))
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zeta", description="Partial zeta values from Q-closed cone sums.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="build, verify and evaluate a job")
    r.add_argument("--spec", required=True, help="job JSON file, or - for stdin")
    r.add_argument("--depth", type=int)
    r.add_argument("--precision", type=int)
    r.add_argument("--oracle", type=float, metavar="T", help="also run the brute-force oracle to |N| <= T")
    r.add_argument("--force", action="store_true", help="evaluate even if verification fails")
    r.add_argument("--emit-chain", metavar="PATH")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check a chain against the counting identity")
    v.add_argument("--spec", required=True)
    v.add_argument("--chain", required=True)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("cocycle-test", help="random cocycle-relation checks")
    c.add_argument("--degree", type=int, default=2, choices=(2, 3))
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--points", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_cocycle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        return _error("parse", str(exc), EXIT_PARSE)
    except (OSError, json.JSONDecodeError) as exc:
        return _error("parse", str(exc), EXIT_PARSE)
    except StageError as exc:
        return _error(exc.stage, exc.message, exc.code)
    except PrecisionError as exc:
        return _error("numeric", str(exc), EXIT_PRECISION)


if __name__ == "__main__":
    sys.exit(main())
