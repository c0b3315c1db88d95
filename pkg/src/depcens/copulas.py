"""Frank, Gaussian and Gumbel copulas.

Provides the joint CDF, both conditional distributions (the partial
derivatives C'_1 and C'_2), the survival copula, Kendall-tau conversions
and conditional-inversion pair sampling.  Boundary arguments (0 or 1)
return analytic limits; interior values are never clamped.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from . import _kernels as _kb
from .errors import InputError

__all__ = ["CopulaFamily", "CopulaModel", "bivariate_normal_cdf", "r_from_tau"]


class CopulaFamily(enum.Enum):
    FRANK = "frank"
    GAUSSIAN = "gaussian"
    GUMBEL = "gumbel"


_CODES = {
    CopulaFamily.FRANK: _kb.impl.FRANK,
    CopulaFamily.GAUSSIAN: _kb.impl.GAUSSIAN,
    CopulaFamily.GUMBEL: _kb.impl.GUMBEL,
}


def _check_domain(family: CopulaFamily, r: float) -> None:
    if not np.isfinite(r):
        raise InputError("association parameter must be finite")
    if family is CopulaFamily.GAUSSIAN and not -1.0 < r < 1.0:
        raise InputError("Gaussian association must lie in (-1, 1)")
    if family is CopulaFamily.GUMBEL and r < 1.0:
        raise InputError("Gumbel association must be >= 1")
    # Frank allows any real; values within the independence window are
    # routed to the product-copula limit by the kernels.


def _check_unit(u, v, open_interval=False):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lo, hi = (0.0, 1.0)
    bad = (u < lo) | (u > hi) | (v < lo) | (v > hi) | ~np.isfinite(u) | ~np.isfinite(v)
    if np.any(bad):
        raise InputError("copula arguments must lie in [0, 1]")
    return u, v


@dataclass(frozen=True)
class CopulaModel:
    family: CopulaFamily
    r: float

    def __post_init__(self):
        _check_domain(self.family, self.r)

    @property
    def _code(self) -> int:
        return _CODES[self.family]

    def cdf(self, u, v):
        u, v = _check_unit(u, v)
        return _kb.impl.cop_cdf(self._code, self.r, u, v)

    def partial_u(self, u, v):
        """C'_1(u, v): conditional CDF of the second margin given the first."""
        u, v = _check_unit(u, v)
        return _kb.impl.cop_pu(self._code, self.r, u, v)

    def partial_v(self, u, v):
        """C'_2(u, v): conditional CDF of the first margin given the second."""
        u, v = _check_unit(u, v)
        return _kb.impl.cop_pv(self._code, self.r, u, v)

    def density(self, u, v):
        u, v = _check_unit(u, v)
        return _kb.impl.cop_dens(self._code, self.r, u, v)

    def survival_copula(self, u, v):
        """P(U > u, V > v) = 1 - u - v + C(u, v)."""
        u, v = _check_unit(u, v)
        out = 1.0 - u - v + np.asarray(_kb.impl.cop_cdf(self._code, self.r, u, v))
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    # -- association ------------------------------------------------------

    def tau(self) -> float:
        return tau_from_r(self.family, self.r)

    # -- sampling ---------------------------------------------------------

    def sample_pair(self, rng: np.random.Generator, size: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Draw pairs by conditional inversion (Gaussian: via normals)."""
        if self.family is CopulaFamily.GAUSSIAN:
            z1 = rng.standard_normal(size)
            z2 = rng.standard_normal(size)
            u = ndtr(z1)
            v = ndtr(self.r * z1 + np.sqrt(1.0 - self.r**2) * z2)
            return u, v
        u = rng.uniform(size=size)
        w = rng.uniform(size=size)
        tiny = 1e-12
        u = np.clip(u, tiny, 1.0 - tiny)
        w = np.clip(w, tiny, 1.0 - tiny)
        if self.family is CopulaFamily.FRANK:
            r = self.r
            if abs(r) < _kb.impl.FRANK_INDEP_EPS:
                return u, w
            # closed-form solve of C'_1(u, v) = w for v; the log argument
            # can round to zero at extreme association, whence the clip
            with np.errstate(divide="ignore", over="ignore"):
                d = np.expm1(-r)
                b = w * d / (np.exp(-r * u) * (1.0 - w) + w)
                v = -np.log1p(b) / r
            return u, np.clip(v, tiny, 1.0 - tiny)
        return u, self._gumbel_conditional_inverse(u, w)

    def _gumbel_conditional_inverse(self, u, w):
        """Solve C'_1(u, v) = w for v by bisection (monotone in v)."""
        code, r = self._code, self.r
        lo = np.full_like(u, 1e-14)
        hi = np.full_like(u, 1.0 - 1e-14)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            too_high = _kb.impl.cop_pu(code, r, u, mid) >= w
            hi = np.where(too_high, mid, hi)
            lo = np.where(too_high, lo, mid)
        return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Kendall's tau
# ---------------------------------------------------------------------------


def _debye1(r: float) -> float:
    """D_1(r) = (1/r) * integral_0^r t/(e^t - 1) dt by adaptive quadrature."""
    val, _ = quad(lambda t: t / np.expm1(t) if t != 0.0 else 1.0, 0.0, r, limit=200)
    return val / r


def tau_from_r(family: CopulaFamily, r: float) -> float:
    """Kendall's tau as a function of the association parameter."""
    _check_domain(family, r)
    if family is CopulaFamily.FRANK:
        if abs(r) < _kb.impl.FRANK_INDEP_EPS:
            return 0.0
        return 1.0 - 4.0 / r * (1.0 - _debye1(r))
    if family is CopulaFamily.GAUSSIAN:
        return float(2.0 * np.arcsin(r) / np.pi)
    return 1.0 - 1.0 / r


def r_from_tau(family: CopulaFamily, tau: float) -> float:
    """Inverse of :func:`tau_from_r` on each family's attainable range."""
    if not np.isfinite(tau):
        raise InputError("tau must be finite")
    if family is CopulaFamily.GAUSSIAN:
        if not -1.0 < tau < 1.0:
            raise InputError("Gaussian tau must lie in (-1, 1)")
        return float(np.sin(np.pi * tau / 2.0))
    if family is CopulaFamily.GUMBEL:
        if not 0.0 <= tau < 1.0:
            raise InputError("Gumbel tau must lie in [0, 1)")
        return 1.0 if tau == 0.0 else 1.0 / (1.0 - tau)
    if not -1.0 < tau < 1.0:
        raise InputError("Frank tau must lie in (-1, 1)")
    if abs(tau) < 1e-12:
        return 0.0
    # bracket then root-search; tau is strictly increasing in r
    lo, hi = (1e-4, 1e-4)
    if tau > 0:
        hi = 1.0
        while tau_from_r(family, hi) < tau:
            hi *= 2.0
            if hi > 1e6:
                raise InputError("Frank tau too close to 1")
        lo = hi / 2.0 if tau_from_r(family, 1e-4) < tau else 1e-8
        lo = 1e-8
    else:
        lo = -1.0
        while tau_from_r(family, lo) > tau:
            lo *= 2.0
            if lo < -1e6:
                raise InputError("Frank tau too close to -1")
        hi = -1e-8
    return float(brentq(lambda r: tau_from_r(family, r) - tau, lo, hi, xtol=1e-12, rtol=1e-12))


def bivariate_normal_cdf(a: float, b: float, rho: float):
    """P(N1 <= a, N2 <= b) for standard normals with correlation rho."""
    if not -1.0 < rho < 1.0:
        raise InputError("correlation must lie strictly inside (-1, 1)")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # infinite arguments reduce to univariate margins
    if a.ndim == 0 and b.ndim == 0:
        a_, b_ = float(a), float(b)
        if np.isposinf(a_) and np.isposinf(b_):
            return 1.0
        if np.isneginf(a_) or np.isneginf(b_):
            return 0.0
        if np.isposinf(a_):
            return float(ndtr(b_))
        if np.isposinf(b_):
            return float(ndtr(a_))
    return _kb.impl.bvn_cdf(a, b, rho)
