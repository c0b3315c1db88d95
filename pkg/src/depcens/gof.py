"""Goodness of fit: Kaplan-Meier CDF, Cramer-von Mises distance, bootstrap.

The test compares the product-limit estimate of the distribution of
V = min(T, C) against the fitted model's covariate-averaged CDF and
calibrates the squared distance by regenerating full datasets from the
fitted model (copula pair sampling, marginal quantile transforms, the
inverse step transform, and administrative times resampled from their
Kaplan-Meier estimate).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _parallel
from . import _kernels as _kb
from .copulas import CopulaFamily, CopulaModel
from .core import Dataset, ModelParams, StepTransform
from .errors import EstimationError, InputError, InvalidStateError
from .estimator import FitConfig, FitResult, fit
from .likelihood import ModelSpec
from .marginals import lambda_hazard

__all__ = ["StepCdf", "GofResult", "kaplan_meier", "model_cdf_v", "cramer_von_mises", "bootstrap_gof"]


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous distribution function given by (time, F(time)) knots."""

    times: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        f = np.asarray(self.probs, dtype=float)
        if t.ndim != 1 or t.shape != f.shape:
            raise InputError("times and probs must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise InputError("times must be strictly increasing")
        if np.any(np.diff(f) < -1e-12) or np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
            raise InputError("probs must be nondecreasing and within [0, 1]")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "probs", np.clip(f, 0.0, 1.0))
        t.setflags(write=False)

    def eval(self, z):
        z = np.asarray(z, dtype=float)
        idx = np.searchsorted(self.times, z, side="right")
        padded = np.concatenate([[0.0], self.probs])
        out = padded[idx]
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class GofResult:
    t_cm: float
    replicates: np.ndarray
    p_value: float
    n_requested: int
    n_dropped: int
    unreliable: bool
    clamp_fraction: float


def kaplan_meier(times, events) -> StepCdf:
    """Product-limit CDF estimate for right-censored data.

    ``events`` flags the rows whose time is an actual observation of the
    quantity being estimated; with no censoring the result is the
    empirical CDF.
    """
    times = np.asarray(times, dtype=float)
    events = np.asarray(events)
    if times.size == 0:
        raise InputError("kaplan_meier requires at least one observation")
    if times.shape != events.shape:
        raise InputError("times and event indicators must have equal length")
    if not np.isin(events, (0, 1)).all():
        raise InputError("event indicators must be 0/1")
    order = np.argsort(times, kind="stable")
    z = times[order]
    d = events[order].astype(float)
    uniq, inv = np.unique(z, return_inverse=True)
    deaths = np.bincount(inv, weights=d, minlength=uniq.size)
    at_risk = z.size - np.searchsorted(z, uniq, side="left")
    surv = np.cumprod(1.0 - deaths / at_risk)
    return StepCdf(uniq, 1.0 - surv)


def _km_masses(times, events):
    """Discrete sampling distribution implied by the KM estimate.

    Mass sits at the drop times; any remaining survival mass is assigned
    to the largest observed time.
    """
    km = kaplan_meier(times, events)
    increments = np.diff(np.concatenate([[0.0], km.probs]))
    support = km.times
    keep = increments > 0
    support, masses = support[keep], increments[keep]
    leftover = 1.0 - masses.sum()
    t_max = km.times[-1]
    if leftover > 1e-12:
        if support.size and support[-1] == t_max:
            masses = masses.copy()
            masses[-1] += leftover
        else:
            support = np.concatenate([support, [t_max]])
            masses = np.concatenate([masses, [leftover]])
    masses = masses / masses.sum()
    return support, masses


def model_cdf_v(v, fit_result: FitResult, data: Dataset):
    """Covariate-averaged model CDF of V = min(T, C) at time(s) v."""
    params = fit_result.params
    hv = np.atleast_1d(fit_result.transform.eval(v))
    out = _kb.impl.fv_curve(hv, data.x @ params.beta, data.w @ params.eta,
                      params.lambda_t, params.lambda_c,
                      fit_result.spec.copula_code, params.r)
    out = np.asarray(out)
    return out if np.ndim(v) else float(out[0])


def cramer_von_mises(fit_result: FitResult, data: Dataset) -> float:
    """Squared distance between the KM and model CDFs over the observed times."""
    km = kaplan_meier(data.z, data.zeta)
    f_km = km.eval(data.z)
    f_mod = model_cdf_v(data.z, fit_result, data)
    return float(np.sum((f_km - np.asarray(f_mod)) ** 2))


def _gof_worker(args):
    (seed, z, x, w, theta_vec, p, q, family_value, pos_t, pos_j, neg_t, neg_j,
     a_support, a_masses, config) = args
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    spec = ModelSpec(CopulaFamily(family_value))
    params = ModelParams.from_vector(np.asarray(theta_vec), p, q)
    transform = StepTransform(pos_t, pos_j, neg_t, neg_j)
    n = z.shape[0]

    copula = CopulaModel(spec.copula, params.r)
    u, v = copula.sample_pair(rng, size=n)
    eps_t = lambda_hazard(params.lambda_t).quantile(np.clip(u, 1e-15, 1 - 1e-16))
    eps_c = lambda_hazard(params.lambda_c).quantile(np.clip(v, 1e-15, 1 - 1e-16))
    yt = x @ params.beta + eps_t
    yc = w @ params.eta + eps_c
    t_rep, cl_t = transform.inverse_array(yt, return_clamped=True, anchor=False)
    c_rep, cl_c = transform.inverse_array(yc, return_clamped=True, anchor=False)
    a_rep = rng.choice(a_support, size=n, p=a_masses)

    z_rep = np.minimum(np.minimum(t_rep, c_rep), a_rep)
    delta = ((t_rep <= c_rep) & (t_rep <= a_rep)).astype(int)
    xi = ((c_rep < t_rep) & (c_rep <= a_rep)).astype(int)
    assert np.all(delta + xi <= 1) and np.allclose(z_rep, np.minimum(np.minimum(t_rep, c_rep), a_rep))
    clamp_count = int(np.sum(cl_t) + np.sum(cl_c))

    try:
        data_rep = Dataset(z_rep, delta, xi, x, w)
        data_rep.validate_for_fit()
        result = fit(data_rep, spec, replace(config, theta_init=params, threads=1))
    except (InputError, EstimationError, InvalidStateError):
        return None, clamp_count
    if not result.converged:
        return None, clamp_count
    return cramer_von_mises(result, data_rep), clamp_count


def bootstrap_gof(fit_result: FitResult, data: Dataset, b: int,
                  rng: np.random.Generator, config: FitConfig = FitConfig(),
                  threads: int = 1) -> GofResult:
    """Bootstrap p-value for the Cramer-von Mises statistic.

    Each replicate regenerates a full dataset from the fitted model,
    refits it (warm started) and recomputes the statistic; the p-value is
    the fraction of replicate statistics strictly above the observed one.
    """
    if b < 1:
        raise InputError("bootstrap requires at least one replicate")
    if not fit_result.converged:
        raise EstimationError("goodness-of-fit bootstrap requires a converged fit")
    t_cm = cramer_von_mises(fit_result, data)
    a_support, a_masses = _km_masses(data.z, 1 - data.zeta)
    transform = fit_result.transform
    seeds = rng.integers(0, 2**63 - 1, size=b)
    jobs = [
        (
            int(seed), data.z, data.x, data.w, fit_result.params.as_vector(),
            data.p, data.q, fit_result.spec.copula.value,
            transform.pos_times, transform.pos_jumps, transform.neg_times, transform.neg_jumps,
            a_support, a_masses, config,
        )
        for seed in seeds
    ]
    outcomes = _parallel.map_parallel(_gof_worker, jobs, threads)
    stats = np.asarray([t for t, _ in outcomes if t is not None], dtype=float)
    clamps = sum(c for _, c in outcomes)
    n_dropped = b - stats.size
    if stats.size == 0:
        raise EstimationError("all bootstrap replicates failed to refit")
    p_value = float(np.mean(stats > t_cm))
    return GofResult(
        t_cm=t_cm,
        replicates=stats,
        p_value=p_value,
        n_requested=b,
        n_dropped=int(n_dropped),
        unreliable=n_dropped > 0.2 * b,
        clamp_fraction=float(clamps / (2.0 * b * data.n)),
    )
