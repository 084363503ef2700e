"""Command line front end: ``spongedim {report,pressure,cubes,sample,verify}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 computation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
import sympy as sp

from . import __version__
from .cubes import count_cubes, density_diagnostic, dump_samples, empirical_box_dimension
from .dimensions import (
    DimensionReport,
    box_dimension,
    coincidence_report,
    hausdorff_dimension_sponge,
    weighted_pressure,
)
from .errors import ConfigError, InvalidDigit, NonMonotone, SpongeDimError, TooSmall
from .lattice import ExpansionSpec, build_expansion
from .measures import Interval, full_dim_marginal, maximal_entropy_measure
from .symbolic import DEFAULT_BUDGET, SubshiftSpec, level_labels
from .verify import SUITES, run_suite

log = logging.getLogger("spongedim")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3


@dataclass
class Budgets:
    enumeration: int = DEFAULT_BUDGET
    depth: int = 3
    k_max: int = 8
    samples: int = 10_000
    seed: int = 0


@dataclass
class Outputs:
    report: str | None = None
    dump: str | None = None


@dataclass
class AnalysisConfig:
    expansion: list[int]
    digits: list[list[int]]
    kind: str = "full"
    transition: list[list[int]] | None = None
    budgets: Budgets = field(default_factory=Budgets)
    outputs: Outputs = field(default_factory=Outputs)

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["transition"] is None:
            del out["transition"]
        return out

    def build(self) -> tuple[SubshiftSpec, ExpansionSpec]:
        spec = build_expansion(self.expansion)
        digits = [tuple(x) for x in self.digits]
        if self.kind == "full":
            return SubshiftSpec.full(digits), spec
        return SubshiftSpec.sft(digits, np.asarray(self.transition, dtype=np.int64)), spec


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    return v


def _int_list(v, where: str) -> list[int]:
    if not isinstance(v, list):
        raise ConfigError(f"{where}: expected a list of integers")
    return [_int(x, f"{where}[{j}]") for j, x in enumerate(v)]


def parse_config(doc: dict) -> AnalysisConfig:
    """Validate a decoded config document; every failure names its field."""
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    known = {"expansion", "digits", "kind", "transition", "budgets", "outputs"}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown field(s): {sorted(extra)}")
    for key in ("expansion", "digits"):
        if key not in doc:
            raise ConfigError(f"missing field '{key}'")
    m = _int_list(doc["expansion"], "expansion")
    try:
        spec = build_expansion(m)
    except (NonMonotone, TooSmall, ValueError) as exc:
        raise ConfigError(f"expansion: {exc}") from exc
    if not isinstance(doc["digits"], list) or not doc["digits"]:
        raise ConfigError("digits: expected a non-empty list of tuples")
    digits = []
    for j, x in enumerate(doc["digits"]):
        x = _int_list(x, f"digits[{j}]")
        try:
            spec.validate_digit(x)
        except InvalidDigit as exc:
            raise ConfigError(f"digits[{j}] = {tuple(x)}: {exc}") from exc
        digits.append(x)
    if len({tuple(x) for x in digits}) != len(digits):
        raise ConfigError("digits: repeated tuple")
    kind = doc.get("kind", "full")
    if kind not in ("full", "sft"):
        raise ConfigError(f"kind: expected 'full' or 'sft', got {kind!r}")
    transition = None
    if kind == "sft":
        if "transition" not in doc:
            raise ConfigError("transition: required when kind is 'sft'")
        T = doc["transition"]
        if not isinstance(T, list) or len(T) != len(digits):
            raise ConfigError(f"transition: expected {len(digits)} rows")
        transition = []
        for a, row in enumerate(T):
            row = _int_list(row, f"transition[{a}]")
            if len(row) != len(digits) or any(v not in (0, 1) for v in row):
                raise ConfigError(f"transition[{a}]: expected {len(digits)} entries in {{0, 1}}")
            transition.append(row)
    elif "transition" in doc:
        raise ConfigError("transition: only allowed when kind is 'sft'")
    budgets = Budgets()
    for key, v in (doc.get("budgets") or {}).items():
        if not hasattr(budgets, key):
            raise ConfigError(f"budgets.{key}: unknown field")
        setattr(budgets, key, _int(v, f"budgets.{key}"))
    outputs = Outputs()
    for key, v in (doc.get("outputs") or {}).items():
        if not hasattr(outputs, key):
            raise ConfigError(f"outputs.{key}: unknown field")
        if v is not None and not isinstance(v, str):
            raise ConfigError(f"outputs.{key}: expected a path string")
        setattr(outputs, key, v)
    return AnalysisConfig(m, digits, kind, transition, budgets, outputs)


def load_config(path: str) -> AnalysisConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc)


# ---------------------------------------------------------------- rendering


def real(x: float) -> float:
    return float(f"{float(x):.15g}")


def _log_power_base(n: int) -> tuple[int, int]:
    """Write ``n = b**e`` with the smallest base ``b``."""
    for b in range(2, n + 1):
        e, v = 0, 1
        while v < n:
            v *= b
            e += 1
        if v == n:
            return b, e
    return n, 1


def symbolic_box(X: SubshiftSpec, spec: ExpansionSpec) -> str | None:
    if not X.is_full:
        return None
    diffs = []
    for i in range(1, spec.s + 1):
        a, b = spec.theta_ratios[i - 1].as_fraction(), spec.theta_ratios[i].as_fraction()
        if a is None or b is None:
            return None
        diffs.append(b - a)
    L = math.lcm(*(f.denominator for f in diffs))
    prod = 1
    for i, f in enumerate(diffs, start=1):
        prod *= len(level_labels(X, spec, i)[0]) ** int(f * L)
    base, e = _log_power_base(spec.n[-1])
    return str(sp.log(prod) / (L * e * sp.log(base)))


def symbolic_haus(X: SubshiftSpec, spec: ExpansionSpec, max_digits: int = 64) -> str | None:
    if not X.is_full or X.size > max_digits:
        return None
    alpha = [r.as_fraction() for r in spec.alpha_ratios]
    if any(a is None for a in alpha):
        return None
    data = full_dim_marginal(X.digits, spec)
    z = {x: sp.Integer(1) for x in data.level_digits[0]}
    for i in range(2, spec.s + 1):
        nz: dict = {}
        for y in data.level_digits[i - 2]:
            key = spec.pi_digit(i, y)
            nz[key] = nz.get(key, 0) + z[y] ** sp.Rational(alpha[i - 2])
        z = nz
    Z = sum(v ** sp.Rational(alpha[-1]) for v in z.values())
    expr = sp.expand_log(sp.log(Z), force=True) / sp.expand_log(sp.log(spec.n[-1]), force=True)
    return str(sp.simplify(expr))


def _value(x) -> Any:
    if isinstance(x, Interval):
        return {"lower": real(x.lower), "upper": real(x.upper)}
    return real(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        return real(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def report_document(cfg: AnalysisConfig) -> dict:
    t0 = time.perf_counter()
    X, spec = cfg.build()
    b = cfg.budgets
    r: DimensionReport = coincidence_report(X, spec, depth=b.depth, k_max=b.k_max, budget=b.enumeration)
    doc = {
        "tool": "spongedim",
        "version": __version__,
        "config": cfg.to_dict(),
        "expansion": spec.to_dict(),
        "dim_box": {"value": real(r.dim_box), "symbolic": symbolic_box(X, spec)},
        "dim_haus": {"value": _value(r.dim_haus), "symbolic": symbolic_haus(X, spec)},
        "ly_of_mme": _value(r.ly_of_mme),
        "verdict_A": r.verdict_A.value,
        "verdict_C": r.verdict_C.value,
        "haus_measure_class": r.haus_measure_class.value,
        "fiber_profile": r.fiber_profile,
        "full_dim_marginal": None,
        "witnesses": _jsonable(r.witnesses),
    }
    if X.is_full:
        doc["full_dim_marginal"] = [real(v) for v in full_dim_marginal(X.digits, spec).marginal]
    else:
        press = weighted_pressure(X, spec, b.k_max, b.enumeration)
        doc["pressure"] = {
            "estimates": [real(v) for v in press.estimates],
            "upper": real(press.upper),
            "dim_interval": _value(press.dim_estimate),
        }
    doc["wall_time_s"] = real(time.perf_counter() - t0)
    return doc


# ---------------------------------------------------------------- commands


def _emit(doc, path: str | None = None):
    text = json.dumps(doc, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    _emit(report_document(cfg), args.out or cfg.outputs.report)
    return EXIT_OK


def cmd_pressure(args) -> int:
    cfg = load_config(args.config)
    X, spec = cfg.build()
    k = args.kmax or cfg.budgets.k_max
    press = weighted_pressure(X, spec, k, cfg.budgets.enumeration)
    _emit({
        "k": press.ks,
        "estimates": [real(v) for v in press.estimates],
        "increments": [real(v) for v in press.increments],
        "upper": real(press.upper),
        "dim_interval": _value(press.dim_estimate),
    })
    return EXIT_OK


def cmd_cubes(args) -> int:
    cfg = load_config(args.config)
    X, spec = cfg.build()
    if args.empirical:
        kmin = args.kmin if args.kmin is not None else max(1, args.k // 2)
        est = empirical_box_dimension(X, spec, range(kmin, args.k + 1), cfg.budgets.enumeration)
        _emit({"slope": real(est.slope), "k": est.ks, "counts": est.counts,
               "residuals": [real(v) for v in est.residuals], "dim_box": real(box_dimension(X, spec))})
    else:
        print(count_cubes(X, spec, args.k, budget=cfg.budgets.enumeration))
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = load_config(args.config)
    X, spec = cfg.build()
    if X.is_full:
        gamma = hausdorff_dimension_sponge(X.digits, spec)
    else:
        gamma = weighted_pressure(X, spec, cfg.budgets.k_max, cfg.budgets.enumeration).dim_estimate.mid
    n = args.n or cfg.budgets.samples
    seed = cfg.budgets.seed if args.seed is None else args.seed
    mode = "peres-nu" if args.nu else "mu"
    mu = None if args.nu else maximal_entropy_measure(X)
    dump = args.dump or cfg.outputs.dump
    diag = density_diagnostic(X, spec, mu, gamma, args.k, n, seed, mode=mode, delta=args.delta,
                              keep_samples=dump is not None)
    if dump:
        dump_samples(dump, diag)
    doc = {k: v for k, v in asdict(diag).items() if k != "log_theta"}
    doc["gamma"] = gamma
    _emit(_jsonable(doc))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    failed = 0
    for name, ok, detail in checks:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    print(f"{len(checks) - failed}/{len(checks)} passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spongedim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="full dimension report")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pressure", help="weighted pressure estimates")
    p.add_argument("config")
    p.add_argument("--kmax", type=int)
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("cubes", help="approximate cube counts")
    p.add_argument("config")
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true")
    g.add_argument("--empirical", action="store_true")
    p.add_argument("--kmin", type=int)
    p.set_defaults(func=cmd_cubes)

    p = sub.add_parser("sample", help="density diagnostic")
    p.add_argument("config")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--nu", action="store_true")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--dump")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpongeDimError as exc:
        print(f"computation error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
