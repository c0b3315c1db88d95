"""Command-line interface: fit, gof, simulate and benchmark subcommands.

CSV in (columns z, delta, xi, x1..xp, w1..wq), JSON/CSV out.  All
randomness flows from --seed; with --threads 1 reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import os
import sys

import numpy as np

from . import __version__, benchmark
from .copulas import CopulaFamily
from .core import Dataset
from .errors import DepcensError, InputError, ParseError
from .estimator import FitConfig, bootstrap_se, fit, param_names
from .gof import bootstrap_gof, kaplan_meier, model_cdf_v
from .likelihood import ModelSpec
from .simulate import Scenario, ScenarioConfig, run_gof_study, run_monte_carlo

SCHEMA_VERSION = 1

__all__ = ["main", "parse_csv", "write_csv", "SCHEMA_VERSION"]


def parse_csv(path: str) -> Dataset:
    """Read a dataset; errors name the offending row and column."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        x_cols = [h for h in header if re.fullmatch(r"x\d+", h)]
        w_cols = [h for h in header if re.fullmatch(r"w\d+", h)]
        expected = ["z", "delta", "xi"] + sorted(x_cols, key=lambda s: int(s[1:])) \
            + sorted(w_cols, key=lambda s: int(s[1:]))
        if header[:3] != ["z", "delta", "xi"] or not x_cols or not w_cols \
                or header != expected:
            raise ParseError(
                f"{path}: header must be z,delta,xi,x1..xp,w1..wq (got {','.join(header)})")
        p, q = len(x_cols), len(w_cols)
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3 + p + q:
                raise ParseError(f"{path}: row {i}: expected {3 + p + q} cells, got {len(row)}")
            vals = []
            for name, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ParseError(f"{path}: row {i}: column {name}: non-numeric value {cell!r}") from None
            z, delta, xi = vals[0], vals[1], vals[2]
            if delta not in (0.0, 1.0):
                raise ParseError(f"{path}: row {i}: column delta: must be 0 or 1")
            if xi not in (0.0, 1.0):
                raise ParseError(f"{path}: row {i}: column xi: must be 0 or 1")
            if delta + xi > 1:
                raise ParseError(f"{path}: row {i}: delta+xi > 1")
            rows.append((z, int(delta), int(xi), vals[3:3 + p], vals[3 + p:]))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return Dataset(
        z=[r[0] for r in rows],
        delta=[r[1] for r in rows],
        xi=[r[2] for r in rows],
        x=np.asarray([r[3] for r in rows]),
        w=np.asarray([r[4] for r in rows]),
    )


def write_csv(data: Dataset, path: str) -> None:
    header = ["z", "delta", "xi"] + [f"x{i + 1}" for i in range(data.p)] \
        + [f"w{i + 1}" for i in range(data.q)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            writer.writerow([repr(float(data.z[i])), int(data.delta[i]), int(data.xi[i])]
                            + [repr(float(v)) for v in data.x[i]]
                            + [repr(float(v)) for v in data.w[i]])


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=False)
        fh.write("\n")


def _transform_table(transform):
    times = transform.times
    jumps = transform.jumps
    cumulative = transform.eval(times)
    return [
        {"time": float(t), "jump": float(j), "cumulative": float(c)}
        for t, j, c in zip(times, jumps, cumulative)
    ]


def _result_payload(command, result, boot, gof_payload=None):
    names = param_names(result.params.p, result.params.q)
    estimates = np.concatenate([result.params.as_vector(), [result.tau_hat]])
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params_hat": {n: float(v) for n, v in zip(names, estimates)},
        "se": None if boot is None else {n: v for n, v in zip(names, _jsonable(boot.se))},
        "p_values": None if boot is None else {n: v for n, v in zip(names, _jsonable(boot.p_values))},
        "tau_hat": float(result.tau_hat),
        "transform_jumps": _transform_table(result.transform),
        "loglik_trace": [float(v) for v in result.loglik_trace],
        "converged": bool(result.converged),
        "gof": gof_payload,
    }
    if boot is not None:
        payload["bootstrap"] = {
            "replicates_requested": boot.n_requested,
            "replicates_converged": boot.n_converged,
            "unreliable": bool(boot.unreliable),
            "degenerate": bool(boot.degenerate),
        }
    return payload


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depcens",
        description="Semiparametric transformed linear models under dependent censoring",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_copula=True):
        if with_copula:
            sp.add_argument("--copula", choices=[f.value for f in CopulaFamily],
                            default="frank", help="copula family (default frank)")
        sp.add_argument("--b", type=int, default=100, help="bootstrap replicates")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: DEPCENS_THREADS or 1)")
        sp.add_argument("--tol-theta", type=float, default=1e-5)
        sp.add_argument("--tol-h", type=float, default=1e-5)
        sp.add_argument("--max-iters", type=int, default=200)

    sp = sub.add_parser("fit", help="fit the model to a CSV dataset")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True, help="result JSON path")
    add_common(sp)

    sp = sub.add_parser("gof", help="fit plus bootstrap goodness-of-fit test")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True, help="result JSON path")
    sp.add_argument("--curve-csv", default=None,
                    help="optional CSV of (v, km, model) distribution values")
    add_common(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo study for a built-in scenario")
    sp.add_argument("--scenario", choices=[s.value for s in Scenario], default="s1_h1")
    sp.add_argument("--n", type=int, default=300)
    sp.add_argument("--runs", type=int, default=50)
    sp.add_argument("--mode", choices=["fit", "gof"], default="fit",
                    help="parameter-recovery table or goodness-of-fit study")
    sp.add_argument("--output", required=True, help="summary JSON path")
    sp.add_argument("--output-csv", default=None, help="optional summary CSV path")
    add_common(sp, with_copula=False)

    sp = sub.add_parser("benchmark", help="compare the numeric backends")
    sp.add_argument("--n", type=int, default=300)
    sp.add_argument("--output", default=None, help="optional JSON path")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--repeats", type=int, default=200)
    return parser


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("DEPCENS_THREADS", "").strip()
    return max(1, int(env)) if env else 1


def _fit_config(args) -> FitConfig:
    return FitConfig(max_outer_iters=args.max_iters, tol_theta=args.tol_theta,
                     tol_h=args.tol_h, seed=args.seed)


def _cmd_fit(args) -> int:
    data = parse_csv(args.input)
    spec = ModelSpec(CopulaFamily(args.copula))
    config = _fit_config(args)
    result = fit(data, spec, config)
    boot = None
    if args.b > 0 and result.converged:
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, 1]))
        boot = bootstrap_se(data, spec, config, args.b, rng, base=result,
                            threads=_threads(args))
    _write_json(_result_payload("fit", result, boot), args.output)
    return 0 if result.converged else 2


def _cmd_gof(args) -> int:
    data = parse_csv(args.input)
    spec = ModelSpec(CopulaFamily(args.copula))
    config = _fit_config(args)
    result = fit(data, spec, config)
    if not result.converged:
        _write_json(_result_payload("gof", result, None), args.output)
        return 2
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 2]))
    gof = bootstrap_gof(result, data, args.b, rng, config=config, threads=_threads(args))
    gof_payload = {
        "t_cm": gof.t_cm,
        "p_value": gof.p_value,
        "replicates": [float(v) for v in gof.replicates],
        "replicates_requested": gof.n_requested,
        "replicates_dropped": gof.n_dropped,
        "unreliable": bool(gof.unreliable),
        "clamp_fraction": gof.clamp_fraction,
    }
    _write_json(_result_payload("gof", result, None, gof_payload), args.output)
    if args.curve_csv:
        order = np.argsort(data.z, kind="stable")
        v = data.z[order]
        km = kaplan_meier(data.z, data.zeta).eval(v)
        fv = model_cdf_v(v, result, data)
        with open(args.curve_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["v", "km", "model"])
            for a, b, c in zip(v, km, np.asarray(fv)):
                writer.writerow([repr(float(a)), repr(float(b)), repr(float(c))])
    return 0


def _cmd_simulate(args) -> int:
    cfg = ScenarioConfig(scenario=Scenario(args.scenario), n=args.n, runs=args.runs,
                         bootstrap_b=args.b, seed=args.seed)
    config = _fit_config(args)
    threads = _threads(args)
    if args.mode == "fit":
        summary = run_monte_carlo(cfg, config, threads=threads)
        rows = list(summary.rows())
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "mode": "fit",
            "scenario": summary.scenario,
            "n": summary.n,
            "runs": summary.runs,
            "converged_runs": summary.n_converged,
            "bootstrap_b": summary.bootstrap_b,
            "table": rows,
        }
        _write_json(payload, args.output)
        if args.output_csv:
            with open(args.output_csv, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=["parameter", "true", "bias", "sd", "rmse", "cp"])
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                                     for k, v in row.items()})
    else:
        summary = run_gof_study(cfg, config, threads=threads)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "mode": "gof",
            "scenario": summary.scenario,
            "n": summary.n,
            "runs": summary.runs,
            "converged_runs": summary.n_converged,
            "bootstrap_b": summary.bootstrap_b,
            "mean_t_cm": summary.mean_t_cm,
            "mean_t_cm_boot": summary.mean_t_cm_boot,
            "rejection_rate_5": summary.rejection_rate_5,
            "rejection_rate_10": summary.rejection_rate_10,
            "replicate_p_values": [float(v) for v in summary.p_values],
        }
        _write_json(payload, args.output)
        if args.output_csv:
            with open(args.output_csv, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["metric", "value"])
                for key in ("mean_t_cm", "mean_t_cm_boot", "rejection_rate_5", "rejection_rate_10"):
                    writer.writerow([key, repr(float(getattr(summary, key)))])
    return 0


def _cmd_benchmark(args) -> int:
    report = benchmark.run_benchmark(n=args.n, seed=args.seed, repeats=args.repeats)
    print(benchmark.format_report(report))
    if args.output:
        _write_json({"schema_version": SCHEMA_VERSION, "command": "benchmark", **report},
                    args.output)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "gof":
            return _cmd_gof(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_benchmark(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DepcensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
