"""Marginal error distributions.

The workhorse is the lambda-indexed family with hazard e^t/(1 + lam e^t):
lam = 0 gives the extreme-value (proportional hazards) error, lam = 1 the
logistic (proportional odds) error.  Normal and Student-t margins exist
for simulation and for normal-quantile plumbing; they are not fit-time
margins.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import ndtr, ndtri

from . import _kernels as _kb
from .errors import InputError

__all__ = ["Family", "MarginalModel", "lambda_hazard", "normal", "scaled_t"]


class Family(enum.Enum):
    LAMBDA_HAZARD = "lambda_hazard"
    NORMAL = "normal"
    SCALED_T = "scaled_t"


@dataclass(frozen=True)
class MarginalModel:
    """A univariate error distribution with a single shape parameter.

    ``param`` is lambda for the hazard family (>= 0), the scale for the
    normal, and the degrees of freedom for the Student t.
    """

    family: Family
    param: float

    def __post_init__(self):
        if self.family is Family.LAMBDA_HAZARD:
            if self.param < 0:
                raise InputError("lambda must be nonnegative")
        elif self.param <= 0:
            raise InputError(f"{self.family.value} parameter must be positive")

    # -- density / distribution -------------------------------------------

    def density(self, t):
        if self.family is Family.LAMBDA_HAZARD:
            return _kb.impl.lh_pdf(t, self.param)
        if self.family is Family.NORMAL:
            t = np.asarray(t, dtype=float)
            out = np.exp(-0.5 * (t / self.param) ** 2) / (self.param * np.sqrt(2 * np.pi))
            return out if out.ndim else float(out)
        return stats.t.pdf(t, df=self.param)

    def log_density(self, t):
        if self.family is Family.LAMBDA_HAZARD:
            return _kb.impl.lh_logpdf(t, self.param)
        return np.log(self.density(t))

    def cdf(self, t):
        if self.family is Family.LAMBDA_HAZARD:
            return _kb.impl.lh_cdf(t, self.param)
        if self.family is Family.NORMAL:
            out = ndtr(np.asarray(t, dtype=float) / self.param)
            return out if out.ndim else float(out)
        return stats.t.cdf(t, df=self.param)

    def survival(self, t):
        if self.family is Family.LAMBDA_HAZARD:
            return _kb.impl.lh_sf(t, self.param)
        out = 1.0 - self.cdf(t)
        return out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise InputError("quantile argument must lie strictly inside (0, 1)")
        if self.family is Family.LAMBDA_HAZARD:
            lam = self.param
            if lam < _kb.impl.LAMBDA_ZERO_EPS:
                out = np.log(-np.log1p(-u))
            else:
                out = np.log(np.expm1(-lam * np.log1p(-u))) - np.log(lam)
        elif self.family is Family.NORMAL:
            out = self.param * ndtri(u)
        else:
            out = stats.t.ppf(u, df=self.param)
        out = np.asarray(out)
        return out if out.ndim else float(out)

    def log_density_derivative(self, t):
        """d log f / dt; only defined for the hazard family."""
        if self.family is not Family.LAMBDA_HAZARD:
            raise InputError("log-density derivative is only supported for the hazard family")
        return _kb.impl.lh_g(t, self.param)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF sampling; deterministic given the generator state."""
        u = rng.uniform(size=size)
        eps = np.finfo(float).tiny
        u = np.clip(u, eps, 1.0 - 1e-16)
        return self.quantile(u)


def lambda_hazard(lam: float) -> MarginalModel:
    return MarginalModel(Family.LAMBDA_HAZARD, lam)


def normal(sigma: float = 1.0) -> MarginalModel:
    return MarginalModel(Family.NORMAL, sigma)


def scaled_t(df: float) -> MarginalModel:
    return MarginalModel(Family.SCALED_T, df)
