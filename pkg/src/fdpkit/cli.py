"""Command-line interface.

Subcommands: ``threshold`` (rejection rules on a p-value file),
``envelope`` (FDP confidence envelopes and the thresholds they imply),
``estimate`` (mixing-weight estimators), ``simulate`` (named Monte Carlo
validation targets), and ``reproduce-example`` (the two worked examples).

The environment variable ``FDP_SEED`` overrides ``--seed`` everywhere.
Errors exit with status 1 and a JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .datasets import EXAMPLE1_PVALUES, EXAMPLE2_SCENARIO
from .envelopes import (
    asymptotic_envelope,
    confidence_thresholds,
    exact_confidence_set,
    exact_envelope,
)
from .estimation import astar_lower, ecdf, kernel_a_consistent, storey_a0
from .simulation import ScenarioConfig, generate_sample, run_validation
from .thresholds import (
    ThresholdResult,
    bayes_classifier_threshold,
    bh_threshold,
    plugin_threshold,
    simple_thresholds,
)

__all__ = ["RunSpec", "ingest", "run", "main", "read_envelope_csv"]


@dataclass
class RunSpec:
    """A fully resolved CLI invocation; ``run`` executes it."""

    command: str
    input: str | None = None
    format: str = "lines"
    alpha: float = 0.05
    method: str | None = None
    ceiling: float | None = None
    t0: float = 0.5
    t_min: float | None = None
    variant: str = "plain"
    seed: int = 0
    reps: int | None = None
    grid: int | None = None
    output: str | None = None
    as_json: bool = False
    t: float | None = None
    r: int | None = None
    bandwidth: float | None = None
    min_rate: bool = False
    no_floor_check: bool = False
    target: str | None = None
    config: str | None = None
    example: int | None = None


def ingest(path: str, format: str = "lines") -> np.ndarray:
    """Read p-values from a file: one float per nonblank line, or the first
    column of a CSV whose header row is always skipped."""
    if format not in ("lines", "csv"):
        raise ValueError(f"unknown input format: {format!r}")
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if format == "csv":
                if lineno == 1:
                    continue
                field = line.split(",")[0].strip()
            else:
                field = line
            try:
                out.append(float(field))
            except ValueError:
                raise ValueError(f"line {lineno}: could not parse {field!r}") from None
    if not out:
        raise ValueError(f"no p-values found in {path}")
    return np.asarray(out, dtype=float)


def _threshold_record(res: ThresholdResult) -> dict:
    rec = {
        "method": res.method,
        "t": res.t,
        "rejected": res.rejected,
        "z": res.z,
        "alpha": res.alpha,
        "inclusive": res.inclusive,
    }
    rec.update({f"diag_{k}": v for k, v in sorted(res.diagnostics.items())})
    return rec


def _write_threshold_csv(path: str, res: ThresholdResult) -> None:
    with open(path, "w") as fh:
        fh.write("method,t,rejected,z,alpha\n")
        cells = [
            res.method,
            repr(float(res.t)),
            "" if res.rejected is None else str(res.rejected),
            "" if res.z is None else repr(float(res.z)),
            "" if res.alpha is None else repr(float(res.alpha)),
        ]
        fh.write(",".join(cells) + "\n")


def _envelope_grid(env) -> np.ndarray:
    if env.method == "exact":
        return env.gamma_bar.knots
    knots = env.gamma_bar.ghat.base.knots
    inner = knots[(knots > env.t_min) & (knots <= 1.0)]
    return np.unique(np.r_[env.t_min, inner, 1.0])


def _write_envelope_csv(path: str, env) -> None:
    ts = _envelope_grid(env)
    gam = np.asarray(env.gamma_bar(ts), dtype=float)
    v = np.asarray(env.v_fn(ts), dtype=float)
    cnt = np.asarray(env.count_bound_at(ts), dtype=float)
    with open(path, "w") as fh:
        fh.write("t,gamma_bar,v,count_bound\n")
        for row in zip(ts, gam, v, cnt):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def read_envelope_csv(path: str) -> dict:
    """Read back a CSV written by the envelope subcommand as arrays."""
    cols = {"t": [], "gamma_bar": [], "v": [], "count_bound": []}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != list(cols):
            raise ValueError(f"unexpected envelope CSV header: {header}")
        for raw in fh:
            if not raw.strip():
                continue
            for name, cell in zip(cols, raw.strip().split(",")):
                cols[name].append(float(cell))
    return {k: np.asarray(vs) for k, vs in cols.items()}


def _build_envelope(p: np.ndarray, spec: RunSpec):
    method = spec.method or "exact"
    if method == "exact":
        confset = exact_confidence_set(p, spec.alpha)
        return exact_envelope(confset, p)
    if method == "asymptotic":
        kwargs = {}
        if spec.grid is not None:
            kwargs["quantile_grid_size"] = spec.grid
        if spec.reps is not None:
            kwargs["quantile_reps"] = spec.reps
        return asymptotic_envelope(
            p,
            t0=spec.t0,
            alpha=spec.alpha,
            t_min=spec.t_min,
            enforce_floor=not spec.no_floor_check,
            quantile_seed=spec.seed,
            **kwargs,
        )
    raise ValueError(f"unknown envelope method: {method!r}")


def _run_threshold(spec: RunSpec) -> dict:
    p = ingest(spec.input, spec.format)
    method = spec.method or "bh"
    if method in ("uncorrected", "bonferroni", "fixed", "first-r"):
        res = simple_thresholds(p, spec.alpha, method, t=spec.t, r=spec.r)
    elif method == "bh":
        res = bh_threshold(p, spec.alpha)
    elif method == "plugin":
        res = plugin_threshold(p, storey_a0(p, spec.t0), spec.alpha, spec.variant)
    elif method == "bayes":
        res = bayes_classifier_threshold(p, spec.bandwidth)
    else:
        raise ValueError(f"unknown threshold method: {method!r}")
    if spec.output:
        _write_threshold_csv(spec.output, res)
    return _threshold_record(res)


def _run_envelope(spec: RunSpec) -> dict:
    p = ingest(spec.input, spec.format)
    env = _build_envelope(p, spec)
    if spec.output:
        _write_envelope_csv(spec.output, env)
    if spec.min_rate and spec.ceiling is not None:
        raise ValueError("choose one of --min-rate and --ceiling")
    if spec.min_rate:
        thr = confidence_thresholds(env, None)
        rec = _threshold_record(thr)
        rec.update({"T": thr.t, "Z": thr.z, "envelope": env.method})
        return rec
    if spec.ceiling is not None:
        thr = confidence_thresholds(env, spec.ceiling)
        rec = _threshold_record(thr)
        rec.update({"T": thr.t, "Z": thr.z, "envelope": env.method})
        return rec
    return {
        "envelope": env.method,
        "level": env.level,
        "t_min": env.t_min,
        "points": int(_envelope_grid(env).size),
        **{f"meta_{k}": v for k, v in sorted(env.meta.items()) if np.isscalar(v)},
    }


def _run_estimate(spec: RunSpec) -> dict:
    p = ingest(spec.input, spec.format)
    method = spec.method or "storey"
    if method == "storey":
        est = storey_a0(p, spec.t0)
    elif method == "astar":
        est = astar_lower(ecdf(p, spec.variant), spec.alpha)
    elif method == "kernel":
        est = kernel_a_consistent(p, spec.bandwidth)
    else:
        raise ValueError(f"unknown estimate method: {method!r}")
    rec = {"method": est.method, "value": est.value}
    for name in ("t0", "bandwidth", "alpha"):
        val = getattr(est, name)
        if val is not None:
            rec[name] = val
    rec.update({f"diag_{k}": v for k, v in sorted(est.diagnostics.items())})
    return rec


def _run_simulate(spec: RunSpec) -> dict:
    if not spec.target:
        raise ValueError("simulate needs --target")
    cfg = {}
    if spec.config:
        with open(spec.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config file must hold a JSON object")
    if spec.seed is not None:
        cfg.setdefault("seed", spec.seed)
    if spec.reps is not None:
        cfg.setdefault("reps", spec.reps)
    report = run_validation(cfg, spec.target)
    if spec.output:
        with open(spec.output, "w") as fh:
            fh.write(json.dumps(report, sort_keys=True) + "\n")
    return report


def _run_example(spec: RunSpec) -> dict:
    if spec.example == 1:
        p = np.asarray(EXAMPLE1_PVALUES)
        alpha = spec.alpha
        un = simple_thresholds(p, alpha, "uncorrected")
        bf = simple_thresholds(p, alpha, "bonferroni")
        bh = bh_threshold(p, alpha)
        env = exact_envelope(exact_confidence_set(p, alpha), p)
        mr = confidence_thresholds(env, None)
        return {
            "alpha": alpha,
            "uncorrected_t": un.t,
            "uncorrected_rejected": un.rejected,
            "bonferroni_t": bf.t,
            "bonferroni_rejected": bf.rejected,
            "bh_t": bh.t,
            "bh_rejected": bh.rejected,
            "min_rate_T": mr.t,
            "min_rate_Z": mr.z,
            "min_rate_rejected": mr.rejected,
            "min_rate_inclusive": mr.inclusive,
        }
    if spec.example == 2:
        scen = ScenarioConfig(
            m=EXAMPLE2_SCENARIO.m,
            a=EXAMPLE2_SCENARIO.a,
            family=EXAMPLE2_SCENARIO.family,
            params=EXAMPLE2_SCENARIO.params,
            seed=spec.seed,
        )
        samp = generate_sample(scen, 0)
        p = samp.pvalues
        alpha = spec.alpha
        c = spec.ceiling if spec.ceiling is not None else 0.05
        t_min = spec.t_min if spec.t_min is not None else 1e-4
        env_exact = exact_envelope(exact_confidence_set(p, alpha), p)
        thr_exact = confidence_thresholds(env_exact, c)
        mr = confidence_thresholds(env_exact, None)
        env_asym = asymptotic_envelope(p, t0=spec.t0, alpha=alpha, t_min=t_min, enforce_floor=False)
        thr_asym = confidence_thresholds(env_asym, c)
        return {
            "alpha": alpha,
            "ceiling": c,
            "seed": scen.seed,
            "exact_ceiling_t": thr_exact.t,
            "asymptotic_ceiling_t": thr_asym.t,
            "min_rate_T": mr.t,
            "min_rate_Z": mr.z,
        }
    raise ValueError("example must be 1 or 2")


def run(spec: RunSpec) -> dict:
    """Execute a resolved invocation and return its result record."""
    if spec.command == "threshold":
        return _run_threshold(spec)
    if spec.command == "envelope":
        return _run_envelope(spec)
    if spec.command == "estimate":
        return _run_estimate(spec)
    if spec.command == "simulate":
        return _run_simulate(spec)
    if spec.command == "reproduce-example":
        return _run_example(spec)
    raise ValueError(f"unknown command: {spec.command!r}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.10g" % v
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdpkit", description="False-discovery control toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("--input", required=True, help="p-value file")
            sp.add_argument("--format", default="lines", choices=["lines", "csv"])
        sp.add_argument("--alpha", type=float, default=0.05)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", help="write result file (CSV/JSON by command)")
        sp.add_argument("--json", dest="as_json", action="store_true", help="print JSON")

    sp = sub.add_parser("threshold", help="rejection thresholds")
    common(sp)
    sp.add_argument(
        "--method",
        default="bh",
        choices=["uncorrected", "bonferroni", "fixed", "first-r", "bh", "plugin", "bayes"],
    )
    sp.add_argument("--t", type=float, help="threshold for --method fixed")
    sp.add_argument("--r", type=int, help="count for --method first-r")
    sp.add_argument("--t0", type=float, default=0.5, help="cut point for the plug-in weight")
    sp.add_argument("--variant", default="plain", choices=["plain", "floor", "lcm"])
    sp.add_argument("--bandwidth", type=float)

    sp = sub.add_parser("envelope", help="FDP confidence envelopes")
    common(sp)
    sp.add_argument("--method", default="exact", choices=["exact", "asymptotic"])
    sp.add_argument("--ceiling", type=float, help="largest t with bound at or below this rate")
    sp.add_argument("--min-rate", dest="min_rate", action="store_true")
    sp.add_argument("--t0", type=float, default=0.5)
    sp.add_argument("--t-min", dest="t_min", type=float)
    sp.add_argument("--no-floor-check", dest="no_floor_check", action="store_true")
    sp.add_argument("--reps", type=int, help="quantile simulation replications")
    sp.add_argument("--grid", type=int, help="quantile simulation grid size")

    sp = sub.add_parser("estimate", help="mixing-weight estimators")
    common(sp)
    sp.add_argument("--method", default="storey", choices=["storey", "astar", "kernel"])
    sp.add_argument("--t0", type=float, default=0.5)
    sp.add_argument("--variant", default="plain", choices=["plain", "floor", "lcm"])
    sp.add_argument("--bandwidth", type=float)

    sp = sub.add_parser("simulate", help="named validation targets")
    common(sp, with_input=False)
    sp.add_argument("--target", required=True)
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--reps", type=int)

    sp = sub.add_parser("reproduce-example", help="worked examples")
    common(sp, with_input=False)
    sp.add_argument("example", type=int, choices=[1, 2])
    sp.add_argument("--ceiling", type=float)
    sp.add_argument("--t0", type=float, default=0.5)
    sp.add_argument("--t-min", dest="t_min", type=float)

    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    fields = {f: getattr(args, f) for f in RunSpec.__dataclass_fields__ if hasattr(args, f)}
    spec = RunSpec(**fields)
    if "FDP_SEED" in os.environ:
        try:
            spec.seed = int(os.environ["FDP_SEED"])
        except ValueError:
            print(json.dumps({"error": "FDP_SEED must be an integer"}), file=sys.stderr)
            return 1
    try:
        result = run(spec)
    except Exception as exc:  # deliberate: CLI boundary
        print(json.dumps({"error": str(exc)}, sort_keys=True), file=sys.stderr)
        return 1
    if spec.as_json or spec.command == "simulate":
        print(json.dumps(result, sort_keys=True))
    else:
        for k, v in result.items():
            if v is not None:
                print(f"{k} {_fmt(v)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
