# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the numerical kernels.

Scalar C implementations of the marginal family, the three copulas and
the fused per-observation likelihood loops.  Mirrors _numpy.py exactly;
keep the two in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (asin, atan, exp, expm1, fabs, isfinite, log, log1p,
                        sin, sqrt, INFINITY, NAN, erfc, fmax, fmin, pi)
from scipy.special.cython_special cimport ndtri as c_ndtri

cnp.import_array()

NAME = "native"

FRANK, GAUSSIAN, GUMBEL = 0, 1, 2
FRANK_INDEP_EPS = 1e-6
FRANK_SERIES_EPS = 1e-3
GUMBEL_INDEP_EPS = 1e-9
LAMBDA_ZERO_EPS = 1e-8

cdef double _FRANK_INDEP = 1e-6
cdef double _FRANK_SERIES = 1e-3
cdef double _GUMBEL_INDEP = 1e-9
cdef double _LAM_ZERO = 1e-8


cdef inline double _softplus(double x) nogil:
    if x > 35.0:
        return x
    if x < -35.0:
        return exp(x)
    return log1p(exp(x))


cdef inline double _ndtr(double x) nogil:
    return 0.5 * erfc(-x / sqrt(2.0))


cdef inline double _npdf(double x) nogil:
    return exp(-0.5 * x * x) / sqrt(2.0 * pi)


# ---------------------------------------------------------------------------
# marginal error family
# ---------------------------------------------------------------------------


cdef inline double c_lh_logpdf(double t, double lam) nogil:
    if lam < _LAM_ZERO:
        return t - exp(t)
    return t - (1.0 + 1.0 / lam) * _softplus(t + log(lam))


cdef inline double c_lh_pdf(double t, double lam) nogil:
    return exp(c_lh_logpdf(t, lam))


cdef inline double c_lh_cdf(double t, double lam) nogil:
    if lam < _LAM_ZERO:
        return -expm1(-exp(t))
    return -expm1(-_softplus(t + log(lam)) / lam)


cdef inline double c_lh_logsf(double t, double lam) nogil:
    if lam < _LAM_ZERO:
        return -exp(t)
    return -_softplus(t + log(lam)) / lam


cdef inline double c_lh_g(double t, double lam) nogil:
    if lam < _LAM_ZERO:
        return 1.0 - exp(t)
    return 1.0 - (1.0 + lam) / (lam + exp(-t))


# ---------------------------------------------------------------------------
# bivariate normal CDF (Gauss-Legendre after Drezner-Wesolowsky/Genz)
# ---------------------------------------------------------------------------

cdef double[3] _W6 = [0.1713244923791705, 0.3607615730481384, 0.4679139345726904]
cdef double[3] _X6 = [0.9324695142031522, 0.6612093864662647, 0.2386191860831970]
cdef double[6] _W12 = [0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                       0.2031674267230659, 0.2334925365383547, 0.2491470458134029]
cdef double[6] _X12 = [0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                       0.5873179542866171, 0.3678314989981802, 0.1252334085114692]
cdef double[10] _W20 = [0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                        0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                        0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                        0.1527533871307259]
cdef double[10] _X20 = [0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                        0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                        0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                        0.07652652113349733]


cdef double _bvn_upper(double dh, double dk, double r) nogil:
    """P(X > dh, Y > dk) for standard bivariate normal, |r| < 1."""
    cdef:
        int lg, i, iss
        const double* w
        const double* x
        double h, k, hk, bvn, hs, asr, sn, a_s, a, bs, c, d, b, sp, xs, rs, ep, asr2
    if fabs(r) < 0.3:
        lg = 3; w = &_W6[0]; x = &_X6[0]
    elif fabs(r) < 0.75:
        lg = 6; w = &_W12[0]; x = &_X12[0]
    else:
        lg = 10; w = &_W20[0]; x = &_X20[0]
    h = dh; k = dk; hk = h * k; bvn = 0.0
    if fabs(r) < 0.925:
        hs = (h * h + k * k) / 2.0
        asr = asin(r)
        for i in range(lg):
            sn = sin(asr * (1.0 - x[i]) / 2.0)
            bvn += w[i] * exp((sn * hk - hs) / (1.0 - sn * sn))
            sn = sin(asr * (1.0 + x[i]) / 2.0)
            bvn += w[i] * exp((sn * hk - hs) / (1.0 - sn * sn))
        bvn = bvn * asr / (4.0 * pi) + _ndtr(-h) * _ndtr(-k)
    else:
        if r < 0.0:
            k = -k
            hk = -hk
        if fabs(r) < 1.0:
            a_s = (1.0 - r) * (1.0 + r)
            a = sqrt(a_s)
            bs = (h - k) * (h - k)
            c = (4.0 - hk) / 8.0
            d = (12.0 - hk) / 16.0
            asr2 = -(bs / a_s + hk) / 2.0
            if asr2 > -100.0:
                bvn = a * exp(asr2) * (1.0 - c * (bs - a_s) * (1.0 - d * bs / 5.0) / 3.0
                                       + c * d * a_s * a_s / 5.0)
            if -hk < 100.0:
                b = sqrt(bs)
                sp = sqrt(2.0 * pi) * _ndtr(-b / a)
                bvn -= exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            a = a / 2.0
            for i in range(lg):
                for iss in range(-1, 2, 2):
                    xs = (a * (iss * x[i] + 1.0)) ** 2
                    rs = sqrt(1.0 - xs)
                    asr2 = -(bs / xs + hk) / 2.0
                    if asr2 > -100.0:
                        sp = (1.0 + c * xs * (1.0 + d * xs))
                        ep = exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                        bvn += a * w[i] * exp(asr2) * (ep - sp)
            bvn = -bvn / (2.0 * pi)
        if r > 0.0:
            bvn += _ndtr(-fmax(h, k))
        if r < 0.0:
            bvn = -bvn + fmax(0.0, _ndtr(-h) - _ndtr(-k))
    return fmax(0.0, fmin(1.0, bvn))


cdef inline double c_bvn_cdf(double a, double b, double r) nogil:
    return _bvn_upper(-a, -b, r)


# ---------------------------------------------------------------------------
# copulas: scalar cores
# ---------------------------------------------------------------------------


cdef inline double _log_abs_expm1(double x) nogil:
    if x > 0.0:
        return x + log1p(-exp(-x))
    return log1p(-exp(x))


cdef double c_frank_cdf(double r, double u, double v) nogil:
    cdef double q1, q2, q3, q4, m, nt
    if fabs(r) < _FRANK_INDEP:
        return u * v
    if fabs(r) < _FRANK_SERIES:
        return u * v + 0.5 * r * u * v * (1.0 - u) * (1.0 - v)
    if u == 0.0 or v == 0.0:
        return 0.0
    if u == 1.0:
        return v
    if v == 1.0:
        return u
    q1 = -r; q2 = -r * (u + v); q3 = -r * u; q4 = -r * v
    m = fmax(fmax(q1, q2), fmax(q3, q4))
    nt = exp(q1 - m) + exp(q2 - m) - exp(q3 - m) - exp(q4 - m)
    return fmax(0.0, fmin(1.0, -(m + log(fabs(nt)) - _log_abs_expm1(-r)) / r))


cdef double c_frank_pu(double r, double u, double v) nogil:
    cdef double q1, q2, q3, q4, m, nt
    if fabs(r) < _FRANK_INDEP:
        return v
    if fabs(r) < _FRANK_SERIES:
        return v + 0.5 * r * v * (1.0 - v) * (1.0 - 2.0 * u)
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 1.0
    q1 = -r; q2 = -r * (u + v); q3 = -r * u; q4 = -r * v
    m = fmax(fmax(q1, q2), fmax(q3, q4))
    nt = exp(q1 - m) + exp(q2 - m) - exp(q3 - m) - exp(q4 - m)
    return fmax(0.0, fmin(1.0, expm1(q4) * exp(q3 - m) / nt))


cdef double c_frank_dens(double r, double u, double v) nogil:
    cdef double q1, q2, q3, q4, m, nt, sign_d, out
    if fabs(r) < _FRANK_INDEP:
        return 1.0
    if fabs(r) < _FRANK_SERIES:
        return 1.0 + 0.5 * r * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)
    q1 = -r; q2 = -r * (u + v); q3 = -r * u; q4 = -r * v
    m = fmax(fmax(q1, q2), fmax(q3, q4))
    nt = exp(q1 - m) + exp(q2 - m) - exp(q3 - m) - exp(q4 - m)
    sign_d = -1.0 if r > 0.0 else 1.0
    out = -r * sign_d * exp(_log_abs_expm1(-r) + q3 + q4 - 2.0 * m) / (nt * nt)
    if not isfinite(out):
        return 0.0
    return out


cdef double c_frank_d2u(double r, double u, double v) nogil:
    cdef double pu
    if fabs(r) < _FRANK_INDEP:
        return 0.0
    if fabs(r) < _FRANK_SERIES:
        return -r * v * (1.0 - v)
    pu = c_frank_pu(r, u, v)
    return -r * pu * (1.0 - pu)


cdef double c_gauss_cdf(double r, double u, double v) nogil:
    if r == 0.0:
        return u * v
    if u == 0.0 or v == 0.0:
        return 0.0
    if u == 1.0:
        return v
    if v == 1.0:
        return u
    return c_bvn_cdf(c_ndtri(u), c_ndtri(v), r)


cdef double c_gauss_pu(double r, double u, double v) nogil:
    cdef double s, lim0
    if r == 0.0:
        return v
    s = sqrt(1.0 - r * r)
    lim0 = 1.0 if r > 0.0 else 0.0
    if u == 0.0:
        return lim0
    if u == 1.0:
        return 1.0 - lim0
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 1.0
    return _ndtr((c_ndtri(v) - r * c_ndtri(u)) / s)


cdef double c_gauss_dens(double r, double u, double v) nogil:
    cdef double s2, x, y
    if r == 0.0:
        return 1.0
    if u <= 0.0 or u >= 1.0 or v <= 0.0 or v >= 1.0:
        return 0.0
    s2 = 1.0 - r * r
    x = c_ndtri(u); y = c_ndtri(v)
    return exp(-(r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * s2)) / sqrt(s2)


cdef double c_gauss_d2u(double r, double u, double v) nogil:
    cdef double s, x, y, out
    if r == 0.0:
        return 0.0
    if u <= 0.0 or u >= 1.0 or v <= 0.0 or v >= 1.0:
        return 0.0
    s = sqrt(1.0 - r * r)
    x = c_ndtri(u); y = c_ndtri(v)
    out = -(r / s) * _npdf((y - r * x) / s) / _npdf(x)
    if not isfinite(out):
        return 0.0
    return out


cdef inline void _gumbel_logs(double r, double u, double v, double* log_r_big,
                              double* log_ut, double* log_vt) nogil:
    cdef double a, b, m
    log_ut[0] = log(-log(u))
    log_vt[0] = log(-log(v))
    a = r * log_ut[0]
    b = r * log_vt[0]
    m = fmax(a, b)
    log_r_big[0] = (m + log1p(exp(fmin(a, b) - m))) / r


cdef double c_gumbel_cdf(double r, double u, double v) nogil:
    cdef double lr, lu, lv
    if r < 1.0 + _GUMBEL_INDEP:
        return u * v
    if u == 0.0 or v == 0.0:
        return 0.0
    if u == 1.0:
        return v
    if v == 1.0:
        return u
    _gumbel_logs(r, u, v, &lr, &lu, &lv)
    return fmax(0.0, fmin(1.0, exp(-exp(lr))))


cdef double c_gumbel_pu(double r, double u, double v) nogil:
    cdef double lr, lu, lv, big_r
    if r < 1.0 + _GUMBEL_INDEP:
        return v
    if u == 0.0:
        return 1.0
    if u == 1.0:
        return 0.0
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 1.0
    _gumbel_logs(r, u, v, &lr, &lu, &lv)
    big_r = exp(lr)
    return fmax(0.0, fmin(1.0, exp(-big_r + (1.0 - r) * lr + (r - 1.0) * lu - log(u))))


cdef double c_gumbel_dens(double r, double u, double v) nogil:
    cdef double lr, lu, lv, big_r
    if r < 1.0 + _GUMBEL_INDEP:
        return 1.0
    if u <= 0.0 or u >= 1.0 or v <= 0.0 or v >= 1.0:
        return 0.0
    _gumbel_logs(r, u, v, &lr, &lu, &lv)
    big_r = exp(lr)
    return exp(-big_r + (r - 1.0) * (lu + lv) - log(u) - log(v)
               + (1.0 - 2.0 * r) * lr + log(big_r + r - 1.0))


cdef double c_gumbel_d2u(double r, double u, double v) nogil:
    cdef double lr, lu, lv, big_r, t1, t2, t3, t4, out
    if r < 1.0 + _GUMBEL_INDEP:
        return 0.0
    if u <= 0.0 or u >= 1.0 or v <= 0.0 or v >= 1.0:
        return 0.0
    _gumbel_logs(r, u, v, &lr, &lu, &lv)
    big_r = exp(lr)
    t1 = exp((2.0 - 2.0 * r) * lr + (2.0 * r - 2.0) * lu)
    t2 = (r - 1.0) * exp((1.0 - 2.0 * r) * lr + (2.0 * r - 2.0) * lu)
    t3 = (r - 1.0) * exp((1.0 - r) * lr + (r - 2.0) * lu)
    t4 = exp((1.0 - r) * lr + (r - 1.0) * lu)
    out = exp(-big_r) * (t1 + t2 - t3 - t4) / (u * u)
    if not isfinite(out):
        return 0.0
    return out


# family dispatch (scalar)

cdef double c_cop_cdf(int fam, double r, double u, double v) nogil:
    if fam == 0:
        return c_frank_cdf(r, u, v)
    if fam == 1:
        return c_gauss_cdf(r, u, v)
    return c_gumbel_cdf(r, u, v)


cdef double c_cop_pu(int fam, double r, double u, double v) nogil:
    if fam == 0:
        return c_frank_pu(r, u, v)
    if fam == 1:
        return c_gauss_pu(r, u, v)
    return c_gumbel_pu(r, u, v)


cdef double c_cop_pv(int fam, double r, double u, double v) nogil:
    return c_cop_pu(fam, r, v, u)


cdef double c_cop_dens(int fam, double r, double u, double v) nogil:
    if fam == 0:
        return c_frank_dens(r, u, v)
    if fam == 1:
        return c_gauss_dens(r, u, v)
    return c_gumbel_dens(r, u, v)


cdef double c_cop_d2u(int fam, double r, double u, double v) nogil:
    if fam == 0:
        return c_frank_d2u(r, u, v)
    if fam == 1:
        return c_gauss_d2u(r, u, v)
    return c_gumbel_d2u(r, u, v)


cdef double c_cop_d2v(int fam, double r, double u, double v) nogil:
    return c_cop_d2u(fam, r, v, u)


# ---------------------------------------------------------------------------
# python-visible vectorized wrappers
# ---------------------------------------------------------------------------


ctypedef double (*unary_t)(double, double) nogil


cdef _apply_lh(unary_t fn, object t, double lam):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.ascontiguousarray(
        np.atleast_1d(np.asarray(t, dtype=np.float64)).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(arr)
    cdef Py_ssize_t i, n = arr.shape[0]
    with nogil:
        for i in range(n):
            out[i] = fn(arr[i], lam)
    res = out.reshape(np.shape(t))
    return res if res.ndim else float(res)


def lh_logpdf(t, double lam):
    return _apply_lh(c_lh_logpdf, t, lam)


def lh_pdf(t, double lam):
    return _apply_lh(c_lh_pdf, t, lam)


def lh_cdf(t, double lam):
    return _apply_lh(c_lh_cdf, t, lam)


def lh_logsf(t, double lam):
    return _apply_lh(c_lh_logsf, t, lam)


def lh_sf(t, double lam):
    return np.exp(_apply_lh(c_lh_logsf, t, lam))


def lh_g(t, double lam):
    return _apply_lh(c_lh_g, t, lam)


ctypedef double (*cop_t)(int, double, double, double) nogil


cdef _apply_cop(cop_t fn, int fam, double r, object u, object v):
    bu, bv = np.broadcast_arrays(np.asarray(u, dtype=np.float64),
                                 np.asarray(v, dtype=np.float64))
    shape = bu.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] au = np.ascontiguousarray(np.atleast_1d(bu).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(np.atleast_1d(bv).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(au)
    cdef Py_ssize_t i, n = au.shape[0]
    with nogil:
        for i in range(n):
            out[i] = fn(fam, r, au[i], av[i])
    res = out.reshape(shape)
    return res if res.ndim else float(res)


def cop_cdf(int family, double r, u, v):
    return _apply_cop(c_cop_cdf, family, r, u, v)


def cop_pu(int family, double r, u, v):
    return _apply_cop(c_cop_pu, family, r, u, v)


def cop_pv(int family, double r, u, v):
    return _apply_cop(c_cop_pv, family, r, u, v)


def cop_dens(int family, double r, u, v):
    return _apply_cop(c_cop_dens, family, r, u, v)


def cop_d2u(int family, double r, u, v):
    return _apply_cop(c_cop_d2u, family, r, u, v)


def cop_d2v(int family, double r, u, v):
    return _apply_cop(c_cop_d2v, family, r, u, v)


def bvn_cdf(a, b, double rho):
    if not -1.0 < rho < 1.0:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    ba, bb = np.broadcast_arrays(np.asarray(a, dtype=np.float64),
                                 np.asarray(b, dtype=np.float64))
    shape = ba.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aa = np.ascontiguousarray(np.atleast_1d(ba).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ab = np.ascontiguousarray(np.atleast_1d(bb).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(aa)
    cdef Py_ssize_t i, n = aa.shape[0]
    cdef double x, y
    with nogil:
        for i in range(n):
            x = aa[i]; y = ab[i]
            if x == INFINITY and y == INFINITY:
                out[i] = 1.0
            elif x == -INFINITY or y == -INFINITY:
                out[i] = 0.0
            elif x == INFINITY:
                out[i] = _ndtr(y)
            elif y == INFINITY:
                out[i] = _ndtr(x)
            else:
                out[i] = c_bvn_cdf(x, y, rho)
    res = out.reshape(shape)
    return res if res.ndim else float(res)


# ---------------------------------------------------------------------------
# fused likelihood kernels
# ---------------------------------------------------------------------------


def loglik_terms(hz, log_jump, xb, wb, delta, xi, double lam_t, double lam_c,
                 int family, double r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ahz = np.ascontiguousarray(hz, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alj = np.ascontiguousarray(log_jump, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axb = np.ascontiguousarray(xb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] awb = np.ascontiguousarray(wb, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ad = np.ascontiguousarray(delta, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ax = np.ascontiguousarray(xi, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ahz)
    cdef Py_ssize_t i, n = ahz.shape[0]
    cdef double x1, x2, u, v, term, surv
    with nogil:
        for i in range(n):
            x1 = ahz[i] - axb[i]
            x2 = ahz[i] - awb[i]
            u = c_lh_cdf(x1, lam_t)
            v = c_lh_cdf(x2, lam_c)
            if ad[i] == 1:
                term = (c_lh_logpdf(x1, lam_t)
                        + log1p(-c_cop_pu(family, r, u, v)) + alj[i])
            elif ax[i] == 1:
                term = (c_lh_logpdf(x2, lam_c)
                        + log1p(-c_cop_pv(family, r, u, v)) + alj[i])
            else:
                surv = 1.0 - u - v + c_cop_cdf(family, r, u, v)
                term = log(surv) if surv > 0.0 else -INFINITY
            out[i] = term if isfinite(term) else -INFINITY
    return out


def loglik_total(hz, log_jump, xb, wb, delta, xi, double lam_t, double lam_c,
                 int family, double r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] terms = loglik_terms(
        hz, log_jump, xb, wb, delta, xi, lam_t, lam_c, family, r)
    cdef double total = 0.0
    cdef Py_ssize_t i, n = terms.shape[0]
    for i in range(n):
        if terms[i] == -INFINITY:
            return -INFINITY
        total += terms[i]
    return total


def omega_s(x1, x2, double lam_t, double lam_c, int family, double r):
    bx1, bx2 = np.broadcast_arrays(np.asarray(x1, dtype=np.float64),
                                   np.asarray(x2, dtype=np.float64))
    shape = bx1.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a1 = np.ascontiguousarray(np.atleast_1d(bx1).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a2 = np.ascontiguousarray(np.atleast_1d(bx2).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] om = np.empty_like(a1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sv = np.empty_like(a1)
    cdef Py_ssize_t i, n = a1.shape[0]
    cdef double u, v, f1, f2
    with nogil:
        for i in range(n):
            u = c_lh_cdf(a1[i], lam_t)
            v = c_lh_cdf(a2[i], lam_c)
            f1 = c_lh_pdf(a1[i], lam_t)
            f2 = c_lh_pdf(a2[i], lam_c)
            om[i] = (f1 * (1.0 - c_cop_pu(family, r, u, v))
                     + f2 * (1.0 - c_cop_pv(family, r, u, v)))
            sv[i] = 1.0 - u - v + c_cop_cdf(family, r, u, v)
    if len(shape) == 0:
        return float(om[0]), float(sv[0])
    return om.reshape(shape), sv.reshape(shape)


cdef inline void _psi_parts(double x1, double x2, double lam_t, double lam_c,
                            int family, double r, double* out) nogil:
    """Fills out[0..9]: u v f1 f2 g1 g2 pu pv dens d2u d2v (11 values)."""
    out[0] = c_lh_cdf(x1, lam_t)
    out[1] = c_lh_cdf(x2, lam_c)
    out[2] = c_lh_pdf(x1, lam_t)
    out[3] = c_lh_pdf(x2, lam_c)
    out[4] = c_lh_g(x1, lam_t)
    out[5] = c_lh_g(x2, lam_c)
    out[6] = c_cop_pu(family, r, out[0], out[1])
    out[7] = c_cop_pv(family, r, out[0], out[1])
    out[8] = c_cop_dens(family, r, out[0], out[1])
    out[9] = c_cop_d2u(family, r, out[0], out[1])
    out[10] = c_cop_d2v(family, r, out[0], out[1])


def psi_values(hz, xb, wb, zeta, double lam_t, double lam_c, int family, double r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ahz = np.ascontiguousarray(hz, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axb = np.ascontiguousarray(xb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] awb = np.ascontiguousarray(wb, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] az = np.ascontiguousarray(zeta, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ahz)
    cdef Py_ssize_t i, n = ahz.shape[0]
    cdef double x1, x2, omega, d_omega, surv
    cdef double p[11]
    with nogil:
        for i in range(n):
            x1 = ahz[i] - axb[i]
            x2 = ahz[i] - awb[i]
            _psi_parts(x1, x2, lam_t, lam_c, family, r, p)
            if az[i] == 1:
                omega = p[2] * (1.0 - p[6]) + p[3] * (1.0 - p[7])
                d_omega = (p[2] * p[4] * (1.0 - p[6]) + p[3] * p[5] * (1.0 - p[7])
                           - p[2] * p[2] * p[9] - p[3] * p[3] * p[10]
                           - 2.0 * p[2] * p[3] * p[8])
                out[i] = -d_omega / omega
            else:
                omega = p[2] * (1.0 - p[6]) + p[3] * (1.0 - p[7])
                surv = 1.0 - p[0] - p[1] + c_cop_cdf(family, r, p[0], p[1])
                out[i] = omega / surv
    return out


def psi_values_split(hz, xb, wb, delta, xi, double lam_t, double lam_c,
                     int family, double r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ahz = np.ascontiguousarray(hz, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axb = np.ascontiguousarray(xb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] awb = np.ascontiguousarray(wb, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ad = np.ascontiguousarray(delta, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ax = np.ascontiguousarray(xi, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ahz)
    cdef Py_ssize_t i, n = ahz.shape[0]
    cdef double x1, x2, omega, surv
    cdef double p[11]
    with nogil:
        for i in range(n):
            x1 = ahz[i] - axb[i]
            x2 = ahz[i] - awb[i]
            _psi_parts(x1, x2, lam_t, lam_c, family, r, p)
            if ad[i] == 1:
                out[i] = -p[4] + (p[9] * p[2] + p[8] * p[3]) / (1.0 - p[6])
            elif ax[i] == 1:
                out[i] = -p[5] + (p[10] * p[3] + p[8] * p[2]) / (1.0 - p[7])
            else:
                omega = p[2] * (1.0 - p[6]) + p[3] * (1.0 - p[7])
                surv = 1.0 - p[0] - p[1] + c_cop_cdf(family, r, p[0], p[1])
                out[i] = omega / surv
    return out


def fv_curve(hv, xb, wb, double lam_t, double lam_c, int family, double r):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ahv = np.ascontiguousarray(hv, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axb = np.ascontiguousarray(xb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] awb = np.ascontiguousarray(wb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ahv)
    cdef Py_ssize_t i, j, nv = ahv.shape[0], n = axb.shape[0]
    cdef double acc, u, v
    with nogil:
        for i in range(nv):
            acc = 0.0
            for j in range(n):
                u = c_lh_cdf(ahv[i] - axb[j], lam_t)
                v = c_lh_cdf(ahv[i] - awb[j], lam_c)
                acc += u + v - c_cop_cdf(family, r, u, v)
            out[i] = acc / n
    return out
