"""Batch runner: JSON experiment config in, CSV sweeps and a JSON verdict report out.

Exit codes: 0 success, 2 config error, 3 inconsistent chain, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ChainConsistencyError, ConfigError, DomainError, EvaluationError, SpectralParameterError,
)
from .extrapolation import embed, favard0_norm
from .funcspace import DEFAULT_KS, LIBRARY, default_grid, parse_function, wide_grid
from .resolvent import euler_errors
from .scales import (
    CHAIN, ProbeSchedule, bicont_holder, classify_chain, favard_res, favard_sg, holder_exponent,
    interpolation_norm, little_holder, modulus_profile, record, resolvent_profile,
)
from .semigroups import parse_semigroup, translation

TESTS = ("favard_sg", "favard_res", "little_holder", "bicont_holder", "exponent",
         "interpolation", "euler", "embed", "classify")
OPEN_ALPHA = {"little_holder", "bicont_holder", "interpolation", "classify"}
NO_ALPHA = {"exponent", "euler", "embed"}
CSV_HEADER = ["t_or_lambda", "quotient", "function", "semigroup", "alpha", "test"]

EXIT_CONFIG = 2
EXIT_CHAIN = 3
EXIT_NUMERIC = 4


@dataclass
class ExperimentConfig:
    semigroup: str
    functions: list
    tests: list
    alpha: list = field(default_factory=lambda: [0.5])
    schedule: dict = field(default_factory=dict)
    p: list = field(default_factory=lambda: [2.0])
    euler_t: float = 1.0
    euler_m: list = field(default_factory=lambda: [4, 16, 64, 256])
    output: str = "semiscale"


def _need_list(raw: dict, key: str) -> list:
    v = raw.get(key)
    if not isinstance(v, list) or not v:
        raise ConfigError(f"config field {key!r} must be a nonempty list")
    return v


def _float(v, key: str) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"config field {key!r} must hold numbers, got {v!r}")
    return float(v)


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a decoded JSON config; every failure names the offending field."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"semigroup", "functions", "tests", "alpha", "schedule", "p",
                          "euler", "output"}
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    sg = raw.get("semigroup", "translation")
    if not isinstance(sg, str):
        raise ConfigError("config field 'semigroup' must be a string")
    functions = [str(f) for f in _need_list(raw, "functions")]
    tests = [str(t) for t in _need_list(raw, "tests")]
    for t in tests:
        if t not in TESTS:
            raise ConfigError(f"config field 'tests': unknown test {t!r}; known: {', '.join(TESTS)}")
    alpha = [_float(a, "alpha") for a in raw.get("alpha", [0.5])]
    if any(t not in NO_ALPHA for t in tests) and not alpha:
        raise ConfigError("config field 'alpha' must be nonempty for the requested tests")
    for a in alpha:
        if not 0.0 < a <= 1.0:
            raise ConfigError(f"config field 'alpha': {a} is outside (0, 1]")
        if a == 1.0 and OPEN_ALPHA & set(tests):
            bad = sorted(OPEN_ALPHA & set(tests))
            raise ConfigError(f"config field 'alpha': tests {bad} need alpha < 1")
    schedule = raw.get("schedule", {})
    if not isinstance(schedule, dict):
        raise ConfigError("config field 'schedule' must be an object")
    known = set(ProbeSchedule.__dataclass_fields__)
    if set(schedule) - known:
        raise ConfigError(f"config field 'schedule': unknown keys {sorted(set(schedule) - known)}")
    p = [_float(v, "p") for v in raw.get("p", [2.0])]
    if any(not v >= 1 for v in p):
        raise ConfigError("config field 'p': every p must be >= 1")
    euler = raw.get("euler", {})
    if not isinstance(euler, dict) or set(euler) - {"t", "m"}:
        raise ConfigError("config field 'euler' must be an object with keys t and m")
    euler_t = _float(euler.get("t", 1.0), "euler.t")
    euler_m = euler.get("m", [4, 16, 64, 256])
    if (not isinstance(euler_m, list) or not euler_m
            or any(isinstance(m, bool) or not isinstance(m, int) or m < 1 for m in euler_m)):
        raise ConfigError("config field 'euler.m' must be a nonempty list of positive integers")
    output = raw.get("output", "semiscale")
    if not isinstance(output, str) or not output or "/" in output:
        raise ConfigError("config field 'output' must be a plain file prefix")
    return ExperimentConfig(sg, functions, tests, alpha, schedule, p, euler_t, euler_m, output)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(raw)


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def emit_csv(rows: list, path: Path) -> Path:
    """Write one sweep; refuses an empty sweep and leaves no file behind."""
    if not rows:
        raise ValueError(f"empty sweep, not writing {path}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for param, quot, fn, sg, alpha, test in rows:
            w.writerow([_fmt(param), _fmt(quot), fn, sg, _fmt(alpha), test])
    return path


def emit_report(records: list, chain: list | None, path: Path, meta: dict | None = None) -> Path:
    report = {"meta": meta or {}, "records": records}
    if chain is not None:
        report["chain"] = chain
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")
    return path


def emit_gnuplot(csv_paths: list, path: Path) -> Path:
    lines = ["set datafile separator ','", "set logscale xy", "set key outside",
             "set xlabel 't or lambda'", "set ylabel 'quotient'"]
    for p in csv_paths:
        lines += [f"set title '{p.stem}'", f"set output '{p.stem}.png'",
                  "set terminal pngcairo size 900,600",
                  f"plot '{p.name}' every ::1 using 1:($2>0?$2:1/0) with linespoints title '{p.stem}'"]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _rows(params, quots, fn, sg, alpha, test) -> list:
    return [(float(a), float(b), fn, sg, alpha, test) for a, b in zip(params, quots)]


def run(cfg: ExperimentConfig) -> tuple[list, list | None, dict]:
    """Evaluate every (function, test, alpha) cell; returns records, chain block and sweeps."""
    grid = default_grid()
    try:
        sg = parse_semigroup(cfg.semigroup, grid)
    except ConfigError as exc:
        raise ConfigError(f"config field 'semigroup': {exc}") from exc
    try:
        sched = ProbeSchedule(**cfg.schedule)
    except (DomainError, TypeError) as exc:
        raise ConfigError(f"config field 'schedule': {exc}") from exc
    try:
        fns = [(label, parse_function(label)) for label in cfg.functions]
    except ConfigError as exc:
        raise ConfigError(f"config field 'functions': {exc}") from exc
    grids_t = {"space": grid.as_list(), "t_grid": sched.as_dict()["t_grid"]}
    grids_l = {"space": grid.as_list(), "lambda_grid": sched.as_dict()["lambda_grid"]}
    records, sweeps, chain = [], {t: [] for t in cfg.tests}, None
    tests = set(cfg.tests)
    for label, f in fns:
        mod = None
        if tests & {"favard_sg", "little_holder", "bicont_holder", "interpolation"}:
            mod = modulus_profile(sg, f, sched.t_grid, grid, DEFAULT_KS)
        res = resolvent_profile(sg, f, sched.lambda_grid, grid) if "favard_res" in tests else None
        for test in cfg.tests:
            if test == "classify":
                continue
            alphas = [None] if test in NO_ALPHA else cfg.alpha
            for a in alphas:
                records += _cell(test, sg, f, label, a, cfg, sched, grid, mod, res,
                                 grids_t, grids_l, sweeps)
    if "classify" in tests:
        chain = []
        wide = wide_grid()
        for label, f in fns:
            for a in cfg.alpha:
                r = classify_chain(f, a, sched, wide)
                chain.append({"function": label, "alpha": a, "verdicts": r.as_dict(),
                              "monotone": True})
                records.append(record(label, "translation", a, "classify", None, None,
                                      ",".join(r.verdicts),
                                      {"space": wide.as_list(), "t_grid": grids_t["t_grid"]}))
                prof = modulus_profile(translation(), f, sched.t_grid, wide)
                sweeps["classify"] += _rows(prof.params, prof.full / prof.params ** a,
                                            label, "translation", a, "classify")
    return records, chain, sweeps


def _cell(test, sg, f, label, a, cfg, sched, grid, mod, res, grids_t, grids_l, sweeps) -> list:
    name = sg.label
    if test == "favard_sg":
        e = favard_sg(sg, f, a, sched, profile=mod)
        sweeps[test] += _rows(e.params, e.quotients, label, name, a, test)
        return [record(label, name, a, test, e.value, e.slope, e.verdict, grids_t)]
    if test == "favard_res":
        e = favard_res(sg, f, a, sched, profile=res)
        sweeps[test] += _rows(e.params, e.quotients, label, name, a, test)
        return [record(label, name, a, test, e.value, e.slope, e.verdict, grids_l)]
    if test == "little_holder":
        m = little_holder(sg, f, a, sched, profile=mod)
        sweeps[test] += _rows(mod.params, mod.full / mod.params ** a, label, name, a, test)
        return [record(label, name, a, test, m.quotient, m.slope, m.verdict, grids_t)]
    if test == "bicont_holder":
        m = bicont_holder(sg, f, a, DEFAULT_KS, sched, profile=mod)
        for K in DEFAULT_KS:
            tag = f"{test}[{K.a:g},{K.b:g}]"
            sweeps[test] += _rows(mod.params, mod.local[K] / mod.params ** a, label, name, a, tag)
        return [record(label, name, a, test, m.quotient, m.slope, m.verdict, grids_t)]
    if test == "interpolation":
        sweeps[test] += _rows(mod.params, mod.full / mod.params ** a, label, name, a, test)
        out = []
        for p in cfg.p:
            val = interpolation_norm(sg, f, a, p, sched, profile=mod)
            out.append(record(label, name, a, f"interpolation:p={p:g}", val, None, None, grids_t))
        return out
    if test == "exponent":
        h = holder_exponent(sg, f, sched, grid)
        t = sched.t_grid
        t = t[(t >= 1e-4 * (1 - 1e-9)) & (t <= 1e-1 * (1 + 1e-9))]
        prof = modulus_profile(sg, f, t, grid)
        sweeps[test] += _rows(t, prof.full, label, name, None, test)
        verdict = "fixed_point" if h.fixed_point else "fitted"
        return [record(label, name, None, test, h.value, h.slope, verdict, {
            "space": grid.as_list(), "t_grid": [float(t[0]), float(t[-1]), int(t.size)]})]
    if test == "euler":
        errs = euler_errors(sg, cfg.euler_t, cfg.euler_m, f, grid=grid)
        sweeps[test] += [(float(e.m), e.sup_error, label, name, None, test) for e in errs]
        ok = all(b.sup_error <= 1.1 * a_.sup_error + 1e-12 for a_, b in zip(errs, errs[1:]))
        return [record(label, name, None, test, errs[-1].sup_error, None,
                       "nonincreasing" if ok else "increasing",
                       {"space": grid.as_list(), "t": cfg.euler_t, "m": list(cfg.euler_m)})]
    if test == "embed":
        vec = embed(sg, f)
        e = favard0_norm(sg, f, sched, grid=grid)
        sweeps[test] += _rows(e.params, e.quotients, label, name, None, test)
        return [record(label, name, None, "embed_norm", vec.norm(grid), None,
                       "in_closure" if vec.in_closure(sched, grid) else "outside_closure",
                       {"space": grid.as_list(), "sigma": sg.sigma}),
                record(label, name, None, "favard0", e.value, e.slope, e.verdict, grids_t)]
    raise ConfigError(f"unknown test {test!r}")


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        records, chain, sweeps = run(cfg)
    except (ConfigError, SpectralParameterError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChainConsistencyError as exc:
        print(f"chain inconsistency: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostics, indent=2, default=str), file=sys.stderr)
        return EXIT_CHAIN
    except (EvaluationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csvs = []
    for test in cfg.tests:
        if test in sweeps and sweeps[test]:
            csvs.append(emit_csv(sweeps[test], out / f"{cfg.output}_{test}.csv"))
            sweeps.pop(test)
    meta = {"semigroup": cfg.semigroup, "grid": default_grid().as_list(),
            "schedule": ProbeSchedule(**cfg.schedule).as_dict()}
    emit_report(records, chain, out / f"{cfg.output}_report.json", meta)
    if args.gnuplot:
        emit_gnuplot(csvs, out / f"{cfg.output}.gp")
    for r in records:
        print(f"{r['function']:>18} {r['test']:>18} alpha={r['alpha']!s:<5} "
              f"value={r['value']!s:<22} {r['verdict']}")
    if chain:
        for c in chain:
            v = c["verdicts"]
            print(f"chain {c['function']} alpha={c['alpha']}: "
                  + " ".join(f"{k}={v[k]}" for k in CHAIN))
    return 0


def cmd_list_functions(args) -> int:
    for name, (_, takes, default, desc) in LIBRARY.items():
        label = f"{name}:<param, default {default:g}>" if takes else name
        print(f"{label:<36} {desc}")
    return 0


def cmd_list_semigroups(args) -> int:
    print("translation                 T(t)f(x) = f(x+t), generator d/dx")
    print("heat                        Gaussian convolution, generator d^2/dx^2")
    print("multiplication:<function>   T(t)f = exp(t q) f, needs sup q < 0 (e.g. multiplication:neg_quadratic)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiscale", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("--config", required=True, help="path to the JSON config")
    r.add_argument("--out", default=".", help="output directory (default: .)")
    r.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    r.set_defaults(func=cmd_run)
    sub.add_parser("list-functions", help="show the function library").set_defaults(
        func=cmd_list_functions)
    sub.add_parser("list-semigroups", help="show the semigroup selections").set_defaults(
        func=cmd_list_semigroups)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
