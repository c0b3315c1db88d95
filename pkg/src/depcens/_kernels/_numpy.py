"""Pure-NumPy backend for the numerical kernels.

Vectorized reference implementation of every hot function: the
lambda-indexed error family, the three copula families with first and
second partial derivatives, the per-observation log-likelihood terms, the
jump-update weight function and the model-implied distribution of the
censored minimum.  The compiled backend mirrors this module; keep the two
in sync.

Copula family codes: 0 = Frank, 1 = Gaussian, 2 = Gumbel.
"""

import numpy as np
from scipy.special import ndtr, ndtri, owens_t

NAME = "numpy"

FRANK, GAUSSIAN, GUMBEL = 0, 1, 2

# Frank association below this is treated as exact independence; between
# the two thresholds a first-order expansion guards 0/0 cancellation.
FRANK_INDEP_EPS = 1e-6
FRANK_SERIES_EPS = 1e-3
GUMBEL_INDEP_EPS = 1e-9
LAMBDA_ZERO_EPS = 1e-8


def _softplus(x):
    out = np.empty_like(x)
    hi = x > 35.0
    lo = x < -35.0
    mid = ~(hi | lo)
    out[hi] = x[hi]
    out[lo] = np.exp(x[lo])
    out[mid] = np.log1p(np.exp(x[mid]))
    return out


def _wrap1(fn):
    """Lift a 1-d-array implementation to scalars and nd arrays."""

    def wrapped(t, lam):
        t = np.asarray(t, dtype=float)
        shape = t.shape
        out = fn(np.atleast_1d(t).ravel(), lam).reshape(shape)
        return out if out.ndim else float(out)

    return wrapped


# ---------------------------------------------------------------------------
# marginal error family: f(t) = e^t / (1 + lam * e^t)^(1 + 1/lam), lam >= 0
# ---------------------------------------------------------------------------


@_wrap1
def lh_logpdf(t, lam):
    if lam < LAMBDA_ZERO_EPS:
        with np.errstate(over="ignore"):
            return t - np.exp(t)
    return t - (1.0 + 1.0 / lam) * _softplus(t + np.log(lam))


def lh_pdf(t, lam):
    return np.exp(lh_logpdf(t, lam))


@_wrap1
def lh_cdf(t, lam):
    with np.errstate(over="ignore"):
        if lam < LAMBDA_ZERO_EPS:
            return -np.expm1(-np.exp(t))
        return -np.expm1(-_softplus(t + np.log(lam)) / lam)


@_wrap1
def lh_logsf(t, lam):
    with np.errstate(over="ignore"):
        if lam < LAMBDA_ZERO_EPS:
            return -np.exp(t)
        return -_softplus(t + np.log(lam)) / lam


def lh_sf(t, lam):
    return np.exp(lh_logsf(t, lam))


@_wrap1
def lh_g(t, lam):
    """Derivative of the log density; strictly decreasing with g(0) = 0."""
    with np.errstate(over="ignore"):
        if lam < LAMBDA_ZERO_EPS:
            return 1.0 - np.exp(t)
        return 1.0 - (1.0 + lam) / (lam + np.exp(-t))


# ---------------------------------------------------------------------------
# bivariate standard normal CDF (Owen's T formulation, ~1e-15 accurate)
# ---------------------------------------------------------------------------


def bvn_cdf(a, b, rho):
    if not -1.0 < rho < 1.0:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scalar = a.ndim == 0 and b.ndim == 0
    a, b = np.atleast_1d(*np.broadcast_arrays(a, b))
    if rho == 0.0:
        out = ndtr(a) * ndtr(b)
        return float(out[0]) if scalar else out
    s = np.sqrt(1.0 - rho * rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        aa = np.where(a != 0.0, (b - rho * a) / (a * s), np.inf)
        ab = np.where(b != 0.0, (a - rho * b) / (b * s), np.inf)
    # zero margins: Owen's T argument degenerates to +-inf with the sign
    # carried by the other coordinate
    aa = np.where(a == 0.0, np.where(b >= 0.0, np.inf, -np.inf), aa)
    ab = np.where(b == 0.0, np.where(a >= 0.0, np.inf, -np.inf), ab)
    delta = np.where((a * b < 0.0) | ((a * b == 0.0) & (a + b < 0.0)), 0.5, 0.0)
    out = 0.5 * (ndtr(a) + ndtr(b)) - owens_t(a, aa) - owens_t(b, ab) - delta
    both_zero = (a == 0.0) & (b == 0.0)
    if np.any(both_zero):
        out = np.where(both_zero, 0.25 + np.arcsin(rho) / (2.0 * np.pi), out)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Frank copula, numerically stable for |r| up to ~300
# ---------------------------------------------------------------------------


def _log_abs_expm1(x):
    """log|e^x - 1| for scalar x != 0."""
    if x > 0:
        return x + np.log1p(-np.exp(-x))
    return np.log1p(-np.exp(x))


def _frank_nt(r, u, v):
    """Factored denominator: D + ab = exp(m) * nt with m the max exponent."""
    q1 = -r * np.ones_like(u)
    q2 = -r * (u + v)
    q3 = -r * u
    q4 = -r * v
    m = np.maximum(np.maximum(q2, q1), np.maximum(q3, q4))
    nt = np.exp(q1 - m) + np.exp(q2 - m) - np.exp(q3 - m) - np.exp(q4 - m)
    return q3, q4, m, nt


def _frank_cdf(r, u, v):
    if abs(r) < FRANK_INDEP_EPS:
        return u * v
    if abs(r) < FRANK_SERIES_EPS:
        return u * v + 0.5 * r * u * v * (1.0 - u) * (1.0 - v)
    q3, q4, m, nt = _frank_nt(r, u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(m + np.log(np.abs(nt)) - _log_abs_expm1(-r)) / r
    out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
    out = np.where(u == 1.0, v, out)
    out = np.where(v == 1.0, np.where(u == 1.0, 1.0, u), out)
    return np.clip(out, 0.0, 1.0)


def _frank_pu(r, u, v):
    if abs(r) < FRANK_INDEP_EPS:
        return v * np.ones_like(u)
    if abs(r) < FRANK_SERIES_EPS:
        return v + 0.5 * r * v * (1.0 - v) * (1.0 - 2.0 * u)
    q3, q4, m, nt = _frank_nt(r, u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.expm1(q4) * np.exp(q3 - m) / nt
    out = np.where(v == 0.0, 0.0, out)
    out = np.where(v == 1.0, 1.0, out)
    return np.clip(out, 0.0, 1.0)


def _frank_pv(r, u, v):
    return _frank_pu(r, v, u)


def _frank_dens(r, u, v):
    if abs(r) < FRANK_INDEP_EPS:
        return np.ones_like(u * v)
    if abs(r) < FRANK_SERIES_EPS:
        return 1.0 + 0.5 * r * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)
    q3, q4, m, nt = _frank_nt(r, u, v)
    sign_d = -1.0 if r > 0 else 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = -r * sign_d * np.exp(_log_abs_expm1(-r) + q3 + q4 - 2.0 * m) / (nt * nt)
    return np.where(np.isfinite(out), out, 0.0)


def _frank_d2u(r, u, v):
    if abs(r) < FRANK_INDEP_EPS:
        return np.zeros_like(u * v)
    if abs(r) < FRANK_SERIES_EPS:
        return -r * v * (1.0 - v) * np.ones_like(u)
    pu = _frank_pu(r, u, v)
    return -r * pu * (1.0 - pu)


def _frank_d2v(r, u, v):
    return _frank_d2u(r, v, u)


# ---------------------------------------------------------------------------
# Gaussian copula
# ---------------------------------------------------------------------------


def _interior(u, v):
    return (u > 0.0) & (u < 1.0) & (v > 0.0) & (v < 1.0)


def _gauss_cdf(r, u, v):
    if r == 0.0:
        return u * v
    inside = _interior(u, v)
    x = ndtri(np.where(inside, u, 0.5))
    y = ndtri(np.where(inside, v, 0.5))
    out = np.asarray(bvn_cdf(x, y, r))
    out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
    out = np.where(u == 1.0, v, out)
    out = np.where(v == 1.0, np.where(u == 1.0, 1.0, u), out)
    return out


def _gauss_pu(r, u, v):
    if r == 0.0:
        return v * np.ones_like(u)
    s = np.sqrt(1.0 - r * r)
    inside = _interior(u, v)
    x = ndtri(np.where(inside, u, 0.5))
    y = ndtri(np.where(inside, v, 0.5))
    out = ndtr((y - r * x) / s)
    lim0 = 1.0 if r > 0 else 0.0
    out = np.where(u == 0.0, lim0, out)
    out = np.where(u == 1.0, 1.0 - lim0, out)
    out = np.where(v == 0.0, 0.0, out)
    out = np.where(v == 1.0, 1.0, out)
    return out


def _gauss_pv(r, u, v):
    return _gauss_pu(r, v, u)


def _norm_pdf(x):
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def _gauss_dens(r, u, v):
    if r == 0.0:
        return np.ones_like(u * v)
    s2 = 1.0 - r * r
    inside = _interior(u, v)
    x = ndtri(np.where(inside, u, 0.5))
    y = ndtri(np.where(inside, v, 0.5))
    with np.errstate(over="ignore"):
        out = np.exp(-(r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * s2)) / np.sqrt(s2)
    return np.where(inside, out, 0.0)


def _gauss_d2u(r, u, v):
    if r == 0.0:
        return np.zeros_like(u * v)
    s = np.sqrt(1.0 - r * r)
    inside = _interior(u, v)
    x = ndtri(np.where(inside, u, 0.5))
    y = ndtri(np.where(inside, v, 0.5))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = -(r / s) * _norm_pdf((y - r * x) / s) / _norm_pdf(x)
    return np.where(inside & np.isfinite(out), out, 0.0)


def _gauss_d2v(r, u, v):
    return _gauss_d2u(r, v, u)


# ---------------------------------------------------------------------------
# Gumbel copula (log-space throughout; r >= 1)
# ---------------------------------------------------------------------------


def _gumbel_logs(r, u, v):
    """Return (log R, log ut, log vt) with R = (ut^r + vt^r)^(1/r), ut = -log u."""
    log_ut = np.log(-np.log(u))
    log_vt = np.log(-np.log(v))
    a = r * log_ut
    b = r * log_vt
    m = np.maximum(a, b)
    log_p = m + np.log1p(np.exp(np.minimum(a, b) - m))
    return log_p / r, log_ut, log_vt


def _gumbel_cdf(r, u, v):
    if r < 1.0 + GUMBEL_INDEP_EPS:
        return u * v
    inside = _interior(u, v)
    uu = np.where(inside, u, 0.5)
    vv = np.where(inside, v, 0.5)
    log_r_big, _, _ = _gumbel_logs(r, uu, vv)
    out = np.exp(-np.exp(log_r_big))
    out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
    out = np.where(u == 1.0, v, out)
    out = np.where(v == 1.0, np.where(u == 1.0, 1.0, u), out)
    return np.clip(out, 0.0, 1.0)


def _gumbel_pu(r, u, v):
    if r < 1.0 + GUMBEL_INDEP_EPS:
        return v * np.ones_like(u)
    inside = _interior(u, v)
    uu = np.where(inside, u, 0.5)
    vv = np.where(inside, v, 0.5)
    log_r_big, log_ut, _ = _gumbel_logs(r, uu, vv)
    big_r = np.exp(log_r_big)
    out = np.exp(-big_r + (1.0 - r) * log_r_big + (r - 1.0) * log_ut - np.log(uu))
    out = np.where(u == 0.0, 1.0, out)
    out = np.where(u == 1.0, 0.0, out)
    out = np.where(v == 0.0, 0.0, out)
    out = np.where(v == 1.0, 1.0, out)
    return np.clip(out, 0.0, 1.0)


def _gumbel_pv(r, u, v):
    return _gumbel_pu(r, v, u)


def _gumbel_dens(r, u, v):
    if r < 1.0 + GUMBEL_INDEP_EPS:
        return np.ones_like(u * v)
    inside = _interior(u, v)
    uu = np.where(inside, u, 0.5)
    vv = np.where(inside, v, 0.5)
    log_r_big, log_ut, log_vt = _gumbel_logs(r, uu, vv)
    big_r = np.exp(log_r_big)
    log_c = (
        -big_r
        + (r - 1.0) * (log_ut + log_vt)
        - np.log(uu) - np.log(vv)
        + (1.0 - 2.0 * r) * log_r_big
        + np.log(big_r + r - 1.0)
    )
    return np.where(inside, np.exp(log_c), 0.0)


def _gumbel_d2u(r, u, v):
    if r < 1.0 + GUMBEL_INDEP_EPS:
        return np.zeros_like(u * v)
    inside = _interior(u, v)
    uu = np.where(inside, u, 0.5)
    vv = np.where(inside, v, 0.5)
    log_r_big, log_ut, _ = _gumbel_logs(r, uu, vv)
    big_r = np.exp(log_r_big)
    t1 = np.exp((2.0 - 2.0 * r) * log_r_big + (2.0 * r - 2.0) * log_ut)
    t2 = (r - 1.0) * np.exp((1.0 - 2.0 * r) * log_r_big + (2.0 * r - 2.0) * log_ut)
    t3 = (r - 1.0) * np.exp((1.0 - r) * log_r_big + (r - 2.0) * log_ut)
    t4 = np.exp((1.0 - r) * log_r_big + (r - 1.0) * log_ut)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.exp(-big_r) * (t1 + t2 - t3 - t4) / (uu * uu)
    return np.where(inside & np.isfinite(out), out, 0.0)


def _gumbel_d2v(r, u, v):
    return _gumbel_d2u(r, v, u)


# ---------------------------------------------------------------------------
# family dispatch
# ---------------------------------------------------------------------------

_DISPATCH = {
    "cdf": {FRANK: _frank_cdf, GAUSSIAN: _gauss_cdf, GUMBEL: _gumbel_cdf},
    "pu": {FRANK: _frank_pu, GAUSSIAN: _gauss_pu, GUMBEL: _gumbel_pu},
    "pv": {FRANK: _frank_pv, GAUSSIAN: _gauss_pv, GUMBEL: _gumbel_pv},
    "dens": {FRANK: _frank_dens, GAUSSIAN: _gauss_dens, GUMBEL: _gumbel_dens},
    "d2u": {FRANK: _frank_d2u, GAUSSIAN: _gauss_d2u, GUMBEL: _gumbel_d2u},
    "d2v": {FRANK: _frank_d2v, GAUSSIAN: _gauss_d2v, GUMBEL: _gumbel_d2v},
}


def _cop(kind, family, r, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = u.ndim == 0 and v.ndim == 0
    u, v = np.atleast_1d(*np.broadcast_arrays(u, v))
    out = np.asarray(_DISPATCH[kind][int(family)](float(r), u, v), dtype=float)
    return float(out[0]) if scalar else out


def cop_cdf(family, r, u, v):
    return _cop("cdf", family, r, u, v)


def cop_pu(family, r, u, v):
    return _cop("pu", family, r, u, v)


def cop_pv(family, r, u, v):
    return _cop("pv", family, r, u, v)


def cop_dens(family, r, u, v):
    return _cop("dens", family, r, u, v)


def cop_d2u(family, r, u, v):
    return _cop("d2u", family, r, u, v)


def cop_d2v(family, r, u, v):
    return _cop("d2v", family, r, u, v)


# ---------------------------------------------------------------------------
# fused likelihood kernels
# ---------------------------------------------------------------------------


def loglik_terms(hz, log_jump, xb, wb, delta, xi, lam_t, lam_c, family, r):
    """Per-observation log-likelihood contributions.

    Administrative-censoring factors are dropped (parameter free), so the
    total is a log-likelihood up to an additive constant.  Invalid terms
    come back as -inf.
    """
    hz = np.asarray(hz, dtype=float)
    x1 = hz - np.asarray(xb, dtype=float)
    x2 = hz - np.asarray(wb, dtype=float)
    log_jump = np.asarray(log_jump, dtype=float)
    delta = np.asarray(delta)
    xi = np.asarray(xi)
    u = lh_cdf(x1, lam_t)
    v = lh_cdf(x2, lam_c)
    out = np.empty_like(x1)

    ev = delta == 1
    dc = xi == 1
    ad = ~(ev | dc)
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.any(ev):
            pu = cop_pu(family, r, u[ev], v[ev])
            out[ev] = lh_logpdf(x1[ev], lam_t) + np.log1p(-pu) + log_jump[ev]
        if np.any(dc):
            pv = cop_pv(family, r, u[dc], v[dc])
            out[dc] = lh_logpdf(x2[dc], lam_c) + np.log1p(-pv) + log_jump[dc]
        if np.any(ad):
            surv = 1.0 - u[ad] - v[ad] + cop_cdf(family, r, u[ad], v[ad])
            out[ad] = np.log(np.maximum(surv, 0.0))
    out[~np.isfinite(out)] = -np.inf
    return out


def loglik_total(hz, log_jump, xb, wb, delta, xi, lam_t, lam_c, family, r):
    return float(np.sum(loglik_terms(hz, log_jump, xb, wb, delta, xi, lam_t, lam_c, family, r)))


def omega_s(x1, x2, lam_t, lam_c, family, r):
    """Density factor of min(T, C) and joint survival on the error scale."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    u = lh_cdf(x1, lam_t)
    v = lh_cdf(x2, lam_c)
    f1 = lh_pdf(x1, lam_t)
    f2 = lh_pdf(x2, lam_c)
    pu = cop_pu(family, r, u, v)
    pv = cop_pv(family, r, u, v)
    omega = f1 * (1.0 - pu) + f2 * (1.0 - pv)
    surv = 1.0 - u - v + cop_cdf(family, r, u, v)
    return omega, surv


def psi_values(hz, xb, wb, zeta, lam_t, lam_c, family, r):
    """Weight function of the jump update, evaluated per observation.

    For censored rows this is omega/S; for event rows it is the negative
    derivative of log omega in the transform value, assembled from the
    marginal score and the copula second partials.  Entries that fail to
    evaluate come back non-finite for the caller's finite-difference
    fallback.
    """
    hz = np.asarray(hz, dtype=float)
    x1 = hz - np.asarray(xb, dtype=float)
    x2 = hz - np.asarray(wb, dtype=float)
    zeta = np.asarray(zeta)
    u = lh_cdf(x1, lam_t)
    v = lh_cdf(x2, lam_c)
    f1 = lh_pdf(x1, lam_t)
    f2 = lh_pdf(x2, lam_c)
    g1 = lh_g(x1, lam_t)
    g2 = lh_g(x2, lam_c)
    pu = cop_pu(family, r, u, v)
    pv = cop_pv(family, r, u, v)
    dens = cop_dens(family, r, u, v)
    d2u = cop_d2u(family, r, u, v)
    d2v = cop_d2v(family, r, u, v)

    omega = f1 * (1.0 - pu) + f2 * (1.0 - pv)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d_omega = (
            f1 * g1 * (1.0 - pu)
            + f2 * g2 * (1.0 - pv)
            - f1 * f1 * d2u
            - f2 * f2 * d2v
            - 2.0 * f1 * f2 * dens
        )
        surv = 1.0 - u - v + cop_cdf(family, r, u, v)
        psi = np.where(zeta == 1, -d_omega / omega, omega / surv)
    return psi


def psi_values_split(hz, xb, wb, delta, xi, lam_t, lam_c, family, r):
    """Jump-update weights from the full (event-type-split) likelihood.

    Same censored branch as :func:`psi_values`; event rows use the
    negative transform-derivative of their own subdensity instead of the
    pooled minimum density, which makes the jump update ascend the same
    objective the parameter step maximizes.
    """
    hz = np.asarray(hz, dtype=float)
    x1 = hz - np.asarray(xb, dtype=float)
    x2 = hz - np.asarray(wb, dtype=float)
    delta = np.asarray(delta)
    xi = np.asarray(xi)
    u = lh_cdf(x1, lam_t)
    v = lh_cdf(x2, lam_c)
    f1 = lh_pdf(x1, lam_t)
    f2 = lh_pdf(x2, lam_c)
    g1 = lh_g(x1, lam_t)
    g2 = lh_g(x2, lam_c)
    pu = cop_pu(family, r, u, v)
    pv = cop_pv(family, r, u, v)
    dens = cop_dens(family, r, u, v)
    d2u = cop_d2u(family, r, u, v)
    d2v = cop_d2v(family, r, u, v)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        surv = 1.0 - u - v + cop_cdf(family, r, u, v)
        omega = f1 * (1.0 - pu) + f2 * (1.0 - pv)
        out = np.where(delta == 1, -g1 + (d2u * f1 + dens * f2) / (1.0 - pu), 0.0)
        out = np.where(xi == 1, -g2 + (d2v * f2 + dens * f1) / (1.0 - pv), out)
        out = np.where(delta + xi == 0, omega / surv, out)
    return out


def fv_curve(hv, xb, wb, lam_t, lam_c, family, r):
    """Covariate-averaged model CDF of V = min(T, C) at transform values hv."""
    hv = np.asarray(hv, dtype=float)
    xb = np.asarray(xb, dtype=float)
    wb = np.asarray(wb, dtype=float)
    x1 = hv[:, None] - xb[None, :]
    x2 = hv[:, None] - wb[None, :]
    u = lh_cdf(x1, lam_t)
    v = lh_cdf(x2, lam_c)
    c = _DISPATCH["cdf"][int(family)](float(r), u, v)
    return np.mean(u + v - c, axis=1)
