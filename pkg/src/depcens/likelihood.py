"""Observed-data log-likelihood and the pieces of the jump-update weight.

Three observation classes contribute: events (density of the event-time
margin times the conditional survival of the censoring margin), dependent
censoring (the symmetric term) and administrative censoring (the joint
survival copula).  Factors involving only the administrative-censoring
law are parameter free and dropped throughout, so reported values are
log-likelihoods up to an additive constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _kb
from .copulas import CopulaFamily, CopulaModel, _CODES
from .core import Dataset, ModelParams, Observation, StepTransform
from .errors import EstimationError, InputError, InvalidStateError
from .marginals import Family

__all__ = [
    "ModelSpec",
    "log_subdensity_event",
    "log_subdensity_depcens",
    "log_subdensity_admin",
    "total_loglik",
    "omega",
    "joint_survival",
    "psi",
    "psi_array",
    "score",
]

_FD_REL_STEP = 1e-6


@dataclass(frozen=True)
class ModelSpec:
    """Parametric classes bound at fit time: copula family and margins."""

    copula: CopulaFamily = CopulaFamily.FRANK
    marginal_t: Family = Family.LAMBDA_HAZARD
    marginal_c: Family = Family.LAMBDA_HAZARD

    def __post_init__(self):
        if self.marginal_t is not Family.LAMBDA_HAZARD or self.marginal_c is not Family.LAMBDA_HAZARD:
            raise InputError("only the lambda-hazard margin family is supported for fitting")

    @property
    def copula_code(self) -> int:
        return _CODES[self.copula]

    def copula_model(self, r: float) -> CopulaModel:
        return CopulaModel(self.copula, r)


def _obs_arguments(obs: Observation, params: ModelParams, transform: StepTransform):
    hz = transform.eval(obs.z)
    return hz, hz - float(obs.x @ params.beta), hz - float(obs.w @ params.eta)


def log_subdensity_event(obs: Observation, params: ModelParams, transform: StepTransform,
                         spec: ModelSpec) -> float:
    """log f for a row with delta = 1: event density x conditional survival x jump."""
    if not (obs.delta == 1 and obs.xi == 0):
        raise InputError("observation is not an event (delta=1, xi=0)")
    jump = transform.jump_at(obs.z)
    if jump <= 0.0:
        raise InvalidStateError(f"transform carries no jump at event time {obs.z}")
    _, x1, x2 = _obs_arguments(obs, params, transform)
    u = _kb.impl.lh_cdf(x1, params.lambda_t)
    v = _kb.impl.lh_cdf(x2, params.lambda_c)
    pu = _kb.impl.cop_pu(spec.copula_code, params.r, u, v)
    with np.errstate(divide="ignore"):
        val = _kb.impl.lh_logpdf(x1, params.lambda_t) + np.log1p(-pu) + np.log(jump)
    return float(val) if np.isfinite(val) else -np.inf


def log_subdensity_depcens(obs: Observation, params: ModelParams, transform: StepTransform,
                           spec: ModelSpec) -> float:
    """log f for a row with xi = 1; the event term with the two roles swapped."""
    if not (obs.delta == 0 and obs.xi == 1):
        raise InputError("observation is not dependently censored (delta=0, xi=1)")
    jump = transform.jump_at(obs.z)
    if jump <= 0.0:
        raise InvalidStateError(f"transform carries no jump at event time {obs.z}")
    _, x1, x2 = _obs_arguments(obs, params, transform)
    u = _kb.impl.lh_cdf(x1, params.lambda_t)
    v = _kb.impl.lh_cdf(x2, params.lambda_c)
    pv = _kb.impl.cop_pv(spec.copula_code, params.r, u, v)
    with np.errstate(divide="ignore"):
        val = _kb.impl.lh_logpdf(x2, params.lambda_c) + np.log1p(-pv) + np.log(jump)
    return float(val) if np.isfinite(val) else -np.inf


def log_subdensity_admin(obs: Observation, params: ModelParams, transform: StepTransform,
                         spec: ModelSpec) -> float:
    """log of the joint survival copula for an administratively censored row."""
    if not (obs.delta == 0 and obs.xi == 0):
        raise InputError("observation is not administratively censored")
    _, x1, x2 = _obs_arguments(obs, params, transform)
    surv = joint_survival(x1, x2, params, spec)
    with np.errstate(divide="ignore"):
        val = np.log(surv) if surv > 0.0 else -np.inf
    return float(val)


def _fit_arrays(data: Dataset, params: ModelParams, transform: StepTransform):
    hz = transform.eval(data.z)
    jumps = transform.jump_at(data.z)
    ev = data.zeta == 1
    if np.any(jumps[ev] <= 0.0):
        raise InvalidStateError("transform must carry a positive jump at every event time")
    log_jump = np.zeros_like(hz)
    log_jump[ev] = np.log(jumps[ev])
    xb = data.x @ params.beta
    wb = data.w @ params.eta
    return hz, log_jump, xb, wb


def total_loglik(data: Dataset, params: ModelParams, transform: StepTransform,
                 spec: ModelSpec) -> float:
    """Sum of the applicable log subdensities; -inf marks an infeasible point."""
    hz, log_jump, xb, wb = _fit_arrays(data, params, transform)
    return _kb.impl.loglik_total(hz, log_jump, xb, wb, data.delta, data.xi,
                           params.lambda_t, params.lambda_c, spec.copula_code, params.r)


def omega(x1, x2, params: ModelParams, spec: ModelSpec):
    """Density factor of V = min(T, C) on the error scale."""
    om, _ = _kb.impl.omega_s(x1, x2, params.lambda_t, params.lambda_c, spec.copula_code, params.r)
    return om if np.ndim(om) else float(om)


def joint_survival(x1, x2, params: ModelParams, spec: ModelSpec):
    """S(x1, x2) = P(eps_T > x1, eps_C > x2) via the survival copula."""
    _, s = _kb.impl.omega_s(x1, x2, params.lambda_t, params.lambda_c, spec.copula_code, params.r)
    return s if np.ndim(s) else float(s)


def psi_array(hz, xb, wb, zeta, params: ModelParams, spec: ModelSpec) -> np.ndarray:
    """Jump-update weights, analytic with a finite-difference fallback."""
    hz = np.asarray(hz, dtype=float)
    psi_vals = np.asarray(_kb.impl.psi_values(hz, xb, wb, zeta, params.lambda_t, params.lambda_c,
                                        spec.copula_code, params.r))
    bad = ~np.isfinite(psi_vals)
    if np.any(bad):
        psi_vals = psi_vals.copy()
        step = _FD_REL_STEP * np.maximum(1.0, np.abs(hz[bad]))
        for sel, h in zip(np.flatnonzero(bad), step):
            psi_vals[sel] = _psi_fd(hz[sel], xb[sel], wb[sel], zeta[sel], params, spec, h)
    return psi_vals


def _log_omega(x1, x2, params, spec):
    """log omega assembled in log space; stable deep in both tails."""
    code = spec.copula_code
    u = _kb.impl.lh_cdf(x1, params.lambda_t)
    v = _kb.impl.lh_cdf(x2, params.lambda_c)
    with np.errstate(divide="ignore"):
        a = _kb.impl.lh_logpdf(x1, params.lambda_t) + np.log1p(-_kb.impl.cop_pu(code, params.r, u, v))
        b = _kb.impl.lh_logpdf(x2, params.lambda_c) + np.log1p(-_kb.impl.cop_pv(code, params.r, u, v))
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    out = np.where(np.isfinite(hi), hi + np.log1p(np.exp(np.minimum(lo - hi, 0.0))), hi)
    return out


def _psi_fd(m, xbi, wbi, zi, params, spec, h):
    def logf(mm):
        if zi == 1:
            return float(_log_omega(mm - xbi, mm - wbi, params, spec))
        _, s = _kb.impl.omega_s(mm - xbi, mm - wbi, params.lambda_t, params.lambda_c,
                          spec.copula_code, params.r)
        with np.errstate(divide="ignore"):
            return float(np.log(s))

    return float(-(logf(m + h) - logf(m - h)) / (2.0 * h))


def psi(obs: Observation, params: ModelParams, transform: StepTransform,
        spec: ModelSpec) -> float:
    """Negative derivative of log omega (events) or log S (censored) in H(z)."""
    hz = np.atleast_1d(transform.eval(obs.z))
    xb = np.atleast_1d(float(obs.x @ params.beta))
    wb = np.atleast_1d(float(obs.w @ params.eta))
    zeta = np.atleast_1d(obs.zeta)
    return float(psi_array(hz, xb, wb, zeta, params, spec)[0])


def psi_split_array(hz, xb, wb, delta, xi, params: ModelParams, spec: ModelSpec) -> np.ndarray:
    """Jump-update weights from the event-type-split likelihood.

    These are the transform-derivatives of the exact objective
    :func:`total_loglik` maximizes, so using them inside the fitter makes
    the jump step and the parameter step ascend one common function.
    """
    hz = np.asarray(hz, dtype=float)
    out = np.asarray(_kb.impl.psi_values_split(hz, xb, wb, delta, xi, params.lambda_t,
                                         params.lambda_c, spec.copula_code, params.r))
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = out.copy()
        step = _FD_REL_STEP * np.maximum(1.0, np.abs(hz[bad]))
        for sel, h in zip(np.flatnonzero(bad), step):
            out[sel] = _psi_split_fd(hz[sel], xb[sel], wb[sel], int(delta[sel]), int(xi[sel]),
                                     params, spec, h)
    return out


def _psi_split_fd(m, xbi, wbi, di, xii, params, spec, h):
    code = spec.copula_code

    def logf(mm):
        x1 = mm - xbi
        x2 = mm - wbi
        u = _kb.impl.lh_cdf(x1, params.lambda_t)
        v = _kb.impl.lh_cdf(x2, params.lambda_c)
        with np.errstate(divide="ignore"):
            if di == 1:
                return float(_kb.impl.lh_logpdf(x1, params.lambda_t)
                             + np.log1p(-_kb.impl.cop_pu(code, params.r, u, v)))
            if xii == 1:
                return float(_kb.impl.lh_logpdf(x2, params.lambda_c)
                             + np.log1p(-_kb.impl.cop_pv(code, params.r, u, v)))
            return float(np.log(1.0 - u - v + _kb.impl.cop_cdf(code, params.r, u, v)))

    return float(-(logf(m + h) - logf(m - h)) / (2.0 * h))


def _step_bounds(params: ModelParams, spec: ModelSpec, j: int, h: float):
    """One-sided stepping near parameter-domain boundaries; returns (lo_ok, hi_ok)."""
    p, q = params.p, params.q
    vec = params.as_vector()
    if j < p + q:
        return True, True
    if j in (p + q, p + q + 1):  # lambdas, nonnegative
        return vec[j] - h >= 0.0, True
    if spec.copula is CopulaFamily.GAUSSIAN:
        return vec[j] - h > -1.0, vec[j] + h < 1.0
    if spec.copula is CopulaFamily.GUMBEL:
        return vec[j] - h >= 1.0, True
    return True, True


def score(data: Dataset, params: ModelParams, transform: StepTransform,
          spec: ModelSpec) -> np.ndarray:
    """Central finite-difference gradient of the log-likelihood in theta."""
    p, q = params.p, params.q
    vec = params.as_vector()

    def ll(v):
        return total_loglik(data, ModelParams.from_vector(v, p, q), transform, spec)

    base = ll(vec)
    if not np.isfinite(base):
        raise EstimationError("log-likelihood is not finite at the requested point")
    grad = np.empty_like(vec)
    for j in range(vec.size):
        h = _FD_REL_STEP * max(1.0, abs(vec[j]))
        for _ in range(4):
            lo_ok, hi_ok = _step_bounds(params, spec, j, h)
            up = vec.copy()
            dn = vec.copy()
            if lo_ok and hi_ok:
                up[j] += h
                dn[j] -= h
                denom = 2.0 * h
            elif hi_ok:
                up[j] += h
                denom = h
            else:
                dn[j] -= h
                denom = h
            f_up = ll(up) if hi_ok else base
            f_dn = ll(dn) if lo_ok else base
            if np.isfinite(f_up) and np.isfinite(f_dn):
                grad[j] = (f_up - f_dn) / denom
                break
            h /= 10.0
        else:
            raise EstimationError(f"score: non-finite likelihood around component {j}")
    return grad
