"""Backend benchmark: compiled kernels versus the NumPy fallback.

Times the hot kernels on synthetic inputs of the requested size, checks
the two backends agree numerically, and times one end-to-end fit per
backend.
"""

from __future__ import annotations

import time

import numpy as np

from ._kernels import BACKEND, available_backends, load_backend
from .copulas import CopulaFamily
from .estimator import FitConfig, fit
from .likelihood import ModelSpec
from .simulate import Scenario, generate_dataset, scenario_true_model

__all__ = ["run_benchmark", "format_report"]

_KERNELS = ("loglik_total", "psi_values_split", "psi_values", "fv_curve")


def _inputs(n: int, seed: int):
    rng = np.random.default_rng(seed)
    hz = np.sort(rng.normal(0.5, 1.5, n))
    xb = rng.normal(0.5, 1.0, n)
    wb = rng.normal(0.3, 1.0, n)
    delta = (rng.random(n) < 0.4).astype(np.int64)
    xi = ((rng.random(n) < 0.5) & (delta == 0)).astype(np.int64)
    log_jump = np.where(delta + xi == 1, np.log(1.0 / n), 0.0)
    return hz, log_jump, xb, wb, delta, xi


def _time(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        out = fn()
    return (time.perf_counter() - t0) / repeats, out


def run_benchmark(n: int = 300, seed: int = 0, repeats: int = 200) -> dict:
    hz, log_jump, xb, wb, delta, xi = _inputs(n, seed)
    zeta = delta + xi
    lam_t, lam_c, fam, r = 0.5, 0.8, 0, 10.0
    backends = available_backends()
    rows = []
    for kernel in _KERNELS:
        row = {"kernel": kernel, "n": n}
        outputs = {}
        for name in backends:
            mod = load_backend(name)
            if kernel == "loglik_total":
                fn = lambda m=mod: m.loglik_total(hz, log_jump, xb, wb, delta, xi,
                                                  lam_t, lam_c, fam, r)
            elif kernel == "psi_values_split":
                fn = lambda m=mod: m.psi_values_split(hz, xb, wb, delta, xi,
                                                      lam_t, lam_c, fam, r)
            elif kernel == "psi_values":
                fn = lambda m=mod: m.psi_values(hz, xb, wb, zeta, lam_t, lam_c, fam, r)
            else:
                fn = lambda m=mod: m.fv_curve(hz[:64], xb, wb, lam_t, lam_c, fam, r)
            elapsed, out = _time(fn, repeats)
            row[f"seconds_{name}"] = elapsed
            outputs[name] = np.asarray(out, dtype=float)
        if len(backends) == 2:
            row["speedup"] = row["seconds_numpy"] / row["seconds_native"]
            row["max_abs_diff"] = float(np.nanmax(np.abs(outputs["native"] - outputs["numpy"])))
        rows.append(row)

    fit_rows = []
    data, _ = generate_dataset(scenario_true_model(Scenario.S1_H1), n,
                               np.random.default_rng(seed))
    for name in backends:
        import depcens._kernels as kernels_pkg
        previous = kernels_pkg.impl
        kernels_pkg.impl = load_backend(name)
        try:
            t0 = time.perf_counter()
            result = fit(data, ModelSpec(CopulaFamily.FRANK), FitConfig())
            elapsed = time.perf_counter() - t0
        finally:
            kernels_pkg.impl = previous
        fit_rows.append({
            "backend": name,
            "seconds": elapsed,
            "converged": bool(result.converged),
            "loglik": float(result.loglik_trace[-1]),
        })
    return {"active_backend": BACKEND, "kernels": rows, "fit": fit_rows}


def format_report(report: dict) -> str:
    lines = [f"active backend: {report['active_backend']}"]
    lines.append(f"{'kernel':<18} {'native':>12} {'numpy':>12} {'speedup':>8} {'max diff':>10}")
    for row in report["kernels"]:
        native = row.get("seconds_native")
        numpy_s = row.get("seconds_numpy")
        lines.append(
            f"{row['kernel']:<18} "
            f"{(native * 1e6 if native else float('nan')):>10.1f}us "
            f"{(numpy_s * 1e6 if numpy_s else float('nan')):>10.1f}us "
            f"{row.get('speedup', float('nan')):>8.2f} "
            f"{row.get('max_abs_diff', float('nan')):>10.2e}"
        )
    for row in report["fit"]:
        lines.append(
            f"end-to-end fit [{row['backend']}]: {row['seconds']:.2f}s "
            f"(converged={row['converged']}, loglik={row['loglik']:.4f})"
        )
    return "\n".join(lines)
