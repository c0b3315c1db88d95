"""Two-stage alternating maximum-likelihood fitter.

Each outer iteration first refreshes the step-transform jump sizes in
closed form (weighted at-risk sums built from the psi weights evaluated
at the previous iterate), then maximizes the pseudo log-likelihood over
the finite-dimensional parameters with the transform frozen.  Convergence
is declared on parameter stability, not objective monotonicity: the
alternation is not a guaranteed-ascent scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr

from . import _parallel
from . import _kernels as _kb
from .copulas import CopulaFamily, r_from_tau, tau_from_r
from .core import Dataset, ModelParams, StepTransform
from .errors import EstimationError, InputError, InvalidStateError
from .likelihood import ModelSpec, psi_array, psi_split_array

__all__ = [
    "FitConfig",
    "FitResult",
    "BootstrapResult",
    "update_jumps",
    "maximize_theta",
    "fit",
    "bootstrap_se",
]

_WARMUP_ITERS = 6
_PENALTY = 1e15
_FD_STEP = 1e-6


@dataclass(frozen=True)
class FitConfig:
    max_outer_iters: int = 200
    tol_theta: float = 1e-5
    tol_h: float = 1e-5
    theta_init: Optional[ModelParams] = None
    jump_init: Optional[float] = None  # None -> 1/n
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise InputError("max_outer_iters must be at least 1")
        if self.tol_theta <= 0 or self.tol_h <= 0:
            raise InputError("tolerances must be positive")


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    transform: StepTransform
    loglik_trace: tuple
    converged: bool
    n_iters: int
    tau_hat: float
    spec: ModelSpec


@dataclass(frozen=True)
class BootstrapResult:
    """Per-parameter bootstrap standard errors and Wald p-values.

    Layout matches ``ModelParams.as_vector`` with Kendall's tau appended.
    """

    names: tuple
    estimates: np.ndarray
    se: np.ndarray
    p_values: np.ndarray
    n_requested: int
    n_converged: int
    replicates: np.ndarray  # (n_converged, n_params) matrix
    unreliable: bool
    degenerate: bool


# ---------------------------------------------------------------------------
# data workspace
# ---------------------------------------------------------------------------


class _Workspace:
    """Sorted views and tie structure reused across iterations."""

    def __init__(self, data: Dataset):
        order = np.argsort(data.z, kind="stable")
        self.z = data.z[order]
        self.delta = data.delta[order]
        self.xi = data.xi[order]
        self.zeta = self.delta + self.xi
        self.x = data.x[order]
        self.w = data.w[order]
        self.n = data.n
        self.uniq, self.inv = np.unique(self.z, return_inverse=True)
        self.first = np.searchsorted(self.z, self.uniq, side="left")
        self.last = np.searchsorted(self.z, self.uniq, side="right") - 1
        self.ev_count = np.bincount(self.inv, weights=self.zeta, minlength=self.uniq.size)
        self.is_event_time = self.ev_count > 0
        if np.any(self.is_event_time & (self.uniq == 0.0)):
            raise InputError("events at time 0 cannot carry a jump (H(0) = 0 is fixed)")
        self.pos = self.uniq > 0
        self.neg = self.uniq < 0

    def eval_transform(self, jumps: np.ndarray) -> np.ndarray:
        """H at every (sorted) observation given jump sizes on self.uniq."""
        h_uniq = np.zeros_like(self.uniq)
        if np.any(self.pos):
            h_uniq[self.pos] = np.cumsum(jumps[self.pos])
        if np.any(self.neg):
            h_uniq[self.neg] = -(np.cumsum(jumps[self.neg][::-1])[::-1])
        return h_uniq[self.inv]

    def transform_object(self, jumps: np.ndarray) -> StepTransform:
        keep = self.is_event_time
        return StepTransform.from_jumps(self.uniq[keep], jumps[keep])

    def jumps_from_transform(self, transform: StepTransform, fallback: float) -> np.ndarray:
        jumps = np.asarray(transform.jump_at(self.uniq))
        jumps = np.where(self.is_event_time & (jumps <= 0.0), fallback, jumps)
        jumps[~self.is_event_time] = 0.0
        return jumps

    def log_jump_vector(self, jumps: np.ndarray) -> np.ndarray:
        ev = self.zeta == 1
        out = np.zeros(self.n)
        jump_per_obs = jumps[self.inv]
        if np.any(jump_per_obs[ev] <= 0.0):
            raise InvalidStateError("zero jump size at an event time")
        out[ev] = np.log(jump_per_obs[ev])
        return out


# ---------------------------------------------------------------------------
# jump-size update (Step 2)
# ---------------------------------------------------------------------------


def _psi_on_workspace(ws: _Workspace, params: ModelParams, spec: ModelSpec,
                      jumps: np.ndarray, psi_override=None,
                      weights: str = "censored-minimum") -> np.ndarray:
    if psi_override is not None:
        return np.broadcast_to(np.asarray(psi_override, dtype=float), (ws.n,)).copy()
    hz = ws.eval_transform(jumps)
    xb = ws.x @ params.beta
    wb = ws.w @ params.eta
    if weights == "full":
        return psi_split_array(hz, xb, wb, ws.delta, ws.xi, params, spec)
    return psi_array(hz, xb, wb, ws.zeta, params, spec)


def _propose_jumps(ws: _Workspace, psi_vals: np.ndarray):
    """Closed-form update; returns (jumps, invalid_mask over unique times).

    Positive axis: events at t over the psi-weighted at-risk sum of rows
    with z >= t.  Negative axis mirrors the sum over rows with z <= t; the
    monotone (sign-fixed) transform convention makes that denominator
    enter with a minus sign.
    """
    suffix = np.cumsum(psi_vals[::-1])[::-1]
    prefix = np.cumsum(psi_vals)
    denom = np.zeros_like(ws.uniq)
    denom[ws.pos] = suffix[ws.first[ws.pos]]
    denom[ws.neg] = -prefix[ws.last[ws.neg]]
    new_jumps = np.zeros_like(ws.uniq)
    need = ws.is_event_time
    ok = need & (denom > 0.0)
    new_jumps[ok] = ws.ev_count[ok] / denom[ok]
    invalid = need & ~ok
    return new_jumps, invalid


def _raw_update(ws: _Workspace, params: ModelParams, spec: ModelSpec,
                jumps_prev: np.ndarray, psi_override=None,
                weights: str = "censored-minimum"):
    """One closed-form pass; returns (proposal, n_undefined).

    All jump sizes are updated simultaneously from the previous iterate's
    psi values.  A nonpositive weighted at-risk sum leaves the update for
    that time undefined (transiently normal on the negative axis early
    on); those entries keep their previous sizes and are counted.
    """
    psi_vals = _psi_on_workspace(ws, params, spec, jumps_prev, psi_override, weights)
    if not np.all(np.isfinite(psi_vals)):
        raise EstimationError("psi evaluation failed on the current iterate")
    proposal, invalid = _propose_jumps(ws, psi_vals)
    if np.any(invalid):
        if psi_override is not None or np.all(invalid[ws.is_event_time]):
            raise EstimationError("jump update failed: nonpositive at-risk weight sums")
        proposal[invalid] = jumps_prev[invalid]
    return proposal, int(np.sum(invalid))


def _loglik_at_jumps(ws: _Workspace, params: ModelParams, spec: ModelSpec,
                     jumps: np.ndarray) -> float:
    """Full log-likelihood as a function of the jump sizes (theta fixed)."""
    hz = ws.eval_transform(jumps)
    ev = ws.zeta == 1
    jump_per_obs = jumps[ws.inv]
    if np.any(jump_per_obs[ev] <= 0.0):
        return -np.inf
    log_jump = np.zeros(ws.n)
    log_jump[ev] = np.log(jump_per_obs[ev])
    return _kb.impl.loglik_total(hz, log_jump, ws.x @ params.beta, ws.w @ params.eta,
                           ws.delta, ws.xi, params.lambda_t, params.lambda_c,
                           spec.copula_code, params.r)


def _update_jumps_ws(ws: _Workspace, params: ModelParams, spec: ModelSpec,
                     jumps_prev: np.ndarray):
    """Stabilized update used inside the alternation.

    The closed-form proposal (full-likelihood weights) is backtracked
    toward the previous jumps until the log-likelihood does not
    deteriorate, which turns the jump refresh into an ascent step on the
    same objective the parameter step maximizes.  Near a fixed point the
    raw proposal is accepted unchanged.
    """
    proposal, n_undefined = _raw_update(ws, params, spec, jumps_prev, weights="full")
    base = _loglik_at_jumps(ws, params, spec, jumps_prev)
    step = proposal - jumps_prev
    slack = 1e-9 * (1.0 + abs(base))
    scale = 1.0
    for _ in range(31):
        cand = jumps_prev + scale * step
        if _loglik_at_jumps(ws, params, spec, cand) >= base - slack:
            return cand, n_undefined
        scale *= 0.5
    return jumps_prev, max(n_undefined, 1)


def update_jumps(data: Dataset, params: ModelParams, transform: StepTransform,
                 spec: ModelSpec, psi_override=None,
                 weights: str = "censored-minimum") -> StepTransform:
    """One closed-form refresh of all jump sizes.

    ``weights`` selects the derivative weights in the at-risk sums:
    ``"censored-minimum"`` uses the pooled minimum-time density (the psi
    function), ``"full"`` the event-type-split subdensities that the
    fitter itself ascends.
    """
    if weights not in ("censored-minimum", "full"):
        raise InputError("weights must be 'censored-minimum' or 'full'")
    ws = _Workspace(data)
    jumps = ws.jumps_from_transform(transform, fallback=1.0 / ws.n)
    new_jumps, _ = _raw_update(ws, params, spec, jumps, psi_override=psi_override,
                               weights=weights)
    return ws.transform_object(new_jumps)


# ---------------------------------------------------------------------------
# theta maximization (Step 3)
# ---------------------------------------------------------------------------

_PHI_BOUND_LIN = 60.0
_PHI_BOUND_LOG = 20.0
_PHI_BOUND_FRANK = 300.0
_PHI_BOUND_ATANH = 18.0
_PHI_BOUND_GUMBEL = 5.3  # r - 1 <= exp(5.3) ~ 200


def _theta_to_phi(params: ModelParams, family: CopulaFamily) -> np.ndarray:
    lam_t = max(params.lambda_t, 1e-12)
    lam_c = max(params.lambda_c, 1e-12)
    if family is CopulaFamily.FRANK:
        rho = params.r
    elif family is CopulaFamily.GAUSSIAN:
        rho = np.arctanh(np.clip(params.r, -1 + 1e-15, 1 - 1e-15))
    else:
        rho = np.log(max(params.r - 1.0, 1e-12))
    return np.concatenate([params.beta, params.eta, [np.log(lam_t), np.log(lam_c), rho]])


def _phi_to_theta(phi: np.ndarray, p: int, q: int, family: CopulaFamily) -> ModelParams:
    rho = phi[p + q + 2]
    if family is CopulaFamily.FRANK:
        r = rho
    elif family is CopulaFamily.GAUSSIAN:
        r = np.tanh(rho)
    else:
        r = 1.0 + np.exp(rho)
    return ModelParams(phi[:p], phi[p:p + q], np.exp(phi[p + q]), np.exp(phi[p + q + 1]), r)


def _phi_bounds(p: int, q: int, family: CopulaFamily):
    bounds = [(-_PHI_BOUND_LIN, _PHI_BOUND_LIN)] * (p + q)
    bounds += [(-_PHI_BOUND_LOG, _PHI_BOUND_LOG)] * 2
    if family is CopulaFamily.FRANK:
        bounds.append((-_PHI_BOUND_FRANK, _PHI_BOUND_FRANK))
    elif family is CopulaFamily.GAUSSIAN:
        bounds.append((-_PHI_BOUND_ATANH, _PHI_BOUND_ATANH))
    else:
        bounds.append((-_PHI_BOUND_GUMBEL - 15.0, _PHI_BOUND_GUMBEL))
    return bounds


def _make_objective(ws: _Workspace, jumps: np.ndarray, spec: ModelSpec, p: int, q: int):
    hz = ws.eval_transform(jumps)
    log_jump = ws.log_jump_vector(jumps)
    code = spec.copula_code
    family = spec.copula

    def neg_loglik(phi: np.ndarray) -> float:
        if family is CopulaFamily.FRANK:
            r = phi[p + q + 2]
        elif family is CopulaFamily.GAUSSIAN:
            r = np.tanh(phi[p + q + 2])
        else:
            r = 1.0 + np.exp(phi[p + q + 2])
        xb = ws.x @ phi[:p]
        wb = ws.w @ phi[p:p + q]
        ll = _kb.impl.loglik_total(hz, log_jump, xb, wb, ws.delta, ws.xi,
                             np.exp(phi[p + q]), np.exp(phi[p + q + 1]), code, r)
        if not np.isfinite(ll):
            return _PENALTY
        # additive constants (offset) are excluded from the optimized
        # objective and only restored in reporting
        return -ll

    return neg_loglik


def _fd_grad(fun, phi: np.ndarray, bounds) -> np.ndarray:
    grad = np.empty_like(phi)
    for j in range(phi.size):
        h = _FD_STEP * max(1.0, abs(phi[j]))
        lo, hi = bounds[j]
        up = phi.copy()
        dn = phi.copy()
        up[j] = min(phi[j] + h, hi)
        dn[j] = max(phi[j] - h, lo)
        denom = up[j] - dn[j]
        grad[j] = (fun(up) - fun(dn)) / denom if denom > 0 else 0.0
    return grad


def _maximize_theta_ws(ws: _Workspace, jumps: np.ndarray, theta_start: ModelParams,
                       spec: ModelSpec, offset: float = 0.0, pin_shape: bool = False):
    p, q = theta_start.p, theta_start.q
    fun = _make_objective(ws, jumps, spec, p, q)
    phi0 = _theta_to_phi(theta_start, spec.copula)
    bounds = _phi_bounds(p, q, spec.copula)
    if pin_shape:
        # freeze the marginal shapes and the association (warm-up phase)
        for j in range(p + q, p + q + 3):
            bounds[j] = (phi0[j], phi0[j])
    if not np.isfinite(fun(phi0)) or fun(phi0) >= _PENALTY:
        raise EstimationError("log-likelihood not finite at the starting parameters")
    res = minimize(
        fun,
        phi0,
        jac=lambda phi: _fd_grad(fun, phi, bounds),
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": 500, "ftol": 1e-13, "gtol": 1e-8},
    )
    best = res.x if res.fun <= fun(phi0) else phi0
    return _phi_to_theta(best, p, q, spec.copula), bool(res.success), float(-res.fun + offset)


def maximize_theta(data: Dataset, transform: StepTransform, theta_start: ModelParams,
                   spec: ModelSpec, loglik_offset: float = 0.0) -> ModelParams:
    """Maximize the pseudo log-likelihood in theta with the transform fixed.

    ``loglik_offset`` adds a constant to the objective; it exists to let
    callers verify that constant terms (such as the dropped n log n jump
    normalizer) cannot change the maximizer.
    """
    ws = _Workspace(data)
    jumps = ws.jumps_from_transform(transform, fallback=1.0 / ws.n)
    params, _, _ = _maximize_theta_ws(ws, jumps, theta_start, spec, offset=loglik_offset)
    return params


# ---------------------------------------------------------------------------
# full alternation (Steps 1-4)
# ---------------------------------------------------------------------------


def default_theta_init(data: Dataset, spec: ModelSpec) -> ModelParams:
    """Neutral start: zero coefficients, unit lambdas, tau = 0.5 association."""
    return ModelParams(
        beta=np.zeros(data.p),
        eta=np.zeros(data.q),
        lambda_t=1.0,
        lambda_c=1.0,
        r=r_from_tau(spec.copula, 0.5),
    )


def _km_matched_jumps(ws: _Workspace, theta: ModelParams, spec: ModelSpec) -> np.ndarray:
    """Initial jump sizes from quantile-matching the censored minimum.

    With zero coefficients the model says P(min(T,C) <= v) = G(H(v)) for a
    known one-dimensional CDF G; inverting G at the Kaplan-Meier estimate
    places the initial transform at the right location and scale, which
    keeps the alternation out of the degenerate flat-transform basin that
    a constant 1/n initialization falls into.
    """
    n = ws.n
    at_risk = n - np.searchsorted(ws.z, ws.uniq, side="left")
    surv = np.cumprod(1.0 - ws.ev_count / at_risk)
    f_km = np.clip(1.0 - surv, 1.0 / (4.0 * n), 1.0 - 1.0 / (4.0 * n))

    def g_cdf(h):
        u = _kb.impl.lh_cdf(h, theta.lambda_t)
        v = _kb.impl.lh_cdf(h, theta.lambda_c)
        c = _kb.impl.cop_cdf(spec.copula_code, theta.r, u, v)
        return u + v - c

    # vectorized bisection for G^{-1} at the event times
    ev = ws.is_event_time
    target = f_km[ev]
    lo = np.full(target.shape, -40.0)
    hi = np.full(target.shape, 40.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        too_high = g_cdf(mid) >= target
        hi = np.where(too_high, mid, hi)
        lo = np.where(too_high, lo, mid)
    h0 = 0.5 * (lo + hi)
    t_ev = ws.uniq[ev]
    # keep H(0) = 0: anchor at the sign change (or at the edge nearest zero)
    h0 = h0 - np.interp(0.0, t_ev, h0)
    jumps = np.zeros_like(ws.uniq)
    floor = 1.0 / (10.0 * n)
    pos = t_ev > 0
    if np.any(pos):
        hp = np.maximum.accumulate(np.maximum(h0[pos], 0.0))
        jumps[ev & ws.pos] = np.maximum(np.diff(np.concatenate([[0.0], hp])), floor)
    neg = t_ev < 0
    if np.any(neg):
        hn = np.minimum(np.minimum.accumulate(h0[neg][::-1])[::-1], 0.0)
        jumps[ev & ws.neg] = np.maximum(np.diff(np.concatenate([hn, [0.0]])), floor)
    return jumps


def _h_block(ws: _Workspace, theta: ModelParams, spec: ModelSpec, jumps: np.ndarray,
             tol: float, max_cycles: int = 100):
    """Drive the jump update to its fixed point for fixed theta.

    The raw update converges linearly, so each cycle applies two update
    steps followed by a squared-extrapolation step, accepted only when it
    does not lower the log-likelihood.
    """
    n_frozen = 0
    for _ in range(max_cycles):
        j1, n_frozen = _update_jumps_ws(ws, theta, spec, jumps)
        if np.max(np.abs(j1 - jumps), initial=0.0) < tol and n_frozen == 0:
            return j1, 0
        j2, n_frozen = _update_jumps_ws(ws, theta, spec, j1)
        r = j1 - jumps
        v = (j2 - j1) - r
        nv = float(np.linalg.norm(v))
        accepted = j2
        if nv > 0.0:
            alpha = -float(np.linalg.norm(r)) / nv
            cand = jumps - 2.0 * alpha * r + alpha * alpha * v
            cand = np.where(ws.is_event_time, np.maximum(cand, 0.0), 0.0)
            if (_loglik_at_jumps(ws, theta, spec, cand)
                    >= _loglik_at_jumps(ws, theta, spec, j2)):
                accepted = cand
        if np.max(np.abs(accepted - jumps), initial=0.0) < tol and n_frozen == 0:
            return accepted, n_frozen
        jumps = accepted
    return jumps, n_frozen


def fit(data: Dataset, spec: ModelSpec, config: FitConfig = FitConfig()) -> FitResult:
    """Alternate jump updates and theta maximization until both stabilize."""
    data.validate_for_fit()
    ws = _Workspace(data)
    theta = config.theta_init if config.theta_init is not None else default_theta_init(data, spec)
    if theta.p != data.p or theta.q != data.q:
        raise InputError("theta_init dimensions do not match the dataset")
    if config.jump_init is not None:
        if config.jump_init <= 0:
            raise InputError("jump_init must be positive")
        jumps = np.where(ws.is_event_time, config.jump_init, 0.0)
    else:
        jumps = _km_matched_jumps(ws, theta, spec)

    # warm-up: location/regression only, marginal shapes and association
    # pinned, so the transform settles near the right scale before the
    # weakly identified shape parameters are released
    if config.theta_init is None:
        for _ in range(_WARMUP_ITERS):
            jumps, _ = _h_block(ws, theta, spec, jumps, tol=10.0 * config.tol_h, max_cycles=25)
            theta, _, _ = _maximize_theta_ws(ws, jumps, theta, spec, pin_shape=True)

    trace = []
    converged = False
    n_iters = 0
    d_theta = np.inf
    for n_iters in range(1, config.max_outer_iters + 1):
        # inexact early blocks: solve H only as tightly as theta has settled
        tol_inner = max(0.1 * config.tol_h, min(1e-3, 0.05 * d_theta))
        new_jumps, n_frozen = _h_block(ws, theta, spec, jumps, tol=tol_inner)
        if np.any(new_jumps < 0):
            raise EstimationError("negative jump size produced; model badly misspecified")
        new_theta, _, ll = _maximize_theta_ws(ws, new_jumps, theta, spec)
        trace.append(ll)
        d_theta = np.max(np.abs(new_theta.as_vector() - theta.as_vector()))
        d_jumps = np.max(np.abs(new_jumps - jumps)) if jumps.size else 0.0
        theta, jumps = new_theta, new_jumps
        if d_theta < config.tol_theta and d_jumps < config.tol_h and n_frozen == 0:
            converged = True
            break

    return FitResult(
        params=theta,
        transform=ws.transform_object(jumps),
        loglik_trace=tuple(trace),
        converged=converged,
        n_iters=n_iters,
        tau_hat=tau_from_r(spec.copula, theta.r),
        spec=spec,
    )


# ---------------------------------------------------------------------------
# bootstrap standard errors
# ---------------------------------------------------------------------------


def param_names(p: int, q: int) -> tuple:
    return tuple(
        [f"beta{i + 1}" for i in range(p)]
        + [f"eta{i + 1}" for i in range(q)]
        + ["lambda_t", "lambda_c", "r", "tau"]
    )


def _replicate_config(config: FitConfig, theta: ModelParams) -> FitConfig:
    return replace(config, theta_init=theta, threads=1)


def _refit_worker(args):
    (z, delta, xi, x, w, family_value, config, warm_theta_vec, p, q) = args
    spec = ModelSpec(CopulaFamily(family_value))
    theta = ModelParams.from_vector(np.asarray(warm_theta_vec), p, q)
    try:
        data = Dataset(z, delta, xi, x, w)
        result = fit(data, spec, _replicate_config(config, theta))
    except (InputError, EstimationError, InvalidStateError):
        return None
    if not result.converged:
        return None
    return np.concatenate([result.params.as_vector(), [result.tau_hat]])


def bootstrap_se(data: Dataset, spec: ModelSpec, config: FitConfig, b: int,
                 rng: np.random.Generator, base: Optional[FitResult] = None,
                 threads: Optional[int] = None) -> BootstrapResult:
    """Nonparametric bootstrap: resample rows, refit, aggregate SDs.

    Non-converged replicates are dropped (and counted); more than 20%
    dropped flags the result as unreliable.  Wald p-values use the normal
    reference 2(1 - Phi(|estimate| / SE)).
    """
    if b < 1:
        raise InputError("bootstrap requires at least one replicate")
    if base is None:
        base = fit(data, spec, config)
    if not base.converged:
        raise EstimationError("bootstrap requires a converged base fit")
    n = data.n
    idx_matrix = rng.integers(0, n, size=(b, n))
    jobs = [
        (
            data.z[idx], data.delta[idx], data.xi[idx], data.x[idx], data.w[idx],
            spec.copula.value, config, base.params.as_vector(), data.p, data.q,
        )
        for idx in idx_matrix
    ]
    n_threads = config.threads if threads is None else threads
    rows = [r for r in _parallel.map_parallel(_refit_worker, jobs, n_threads) if r is not None]
    replicates = np.asarray(rows, dtype=float) if rows else np.empty((0, data.p + data.q + 4))
    n_conv = replicates.shape[0]
    estimates = np.concatenate([base.params.as_vector(), [base.tau_hat]])
    if n_conv >= 2:
        se = replicates.std(axis=0, ddof=1)
    else:
        se = np.full(estimates.shape, np.nan)
    degenerate = bool(np.any(se == 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        zstat = np.abs(estimates) / se
        p_values = 2.0 * (1.0 - ndtr(zstat))
    return BootstrapResult(
        names=param_names(data.p, data.q),
        estimates=estimates,
        se=se,
        p_values=p_values,
        n_requested=b,
        n_converged=n_conv,
        replicates=replicates,
        unreliable=n_conv < 0.8 * b,
        degenerate=degenerate,
    )
