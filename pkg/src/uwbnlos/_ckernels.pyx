# cython: language_level=3
"""Compiled numerical kernels; mirrors ``_pykernels`` function for function."""

from libc.math cimport exp, fabs, log, log1p, pow

import numpy as np

cdef double EULER_GAMMA = 0.5772156649015329
cdef double HALF_LOG_2PI = 0.9189385332046728
cdef double STIRLING_MIN_ARG = 8.0

cdef double[29] LGAMMA1P_SERIES = [
    0.8224670334241132, -0.40068563438653143, 0.27058080842778454,
    -0.20738555102867398, 0.1695571769974082, -0.1440498967688461,
    0.12550966952474304, -0.11133426586956469, 0.1000994575127818,
    -0.09095401714582904, 0.083353840546109, -0.0769325164113522,
    0.07143294629536133, -0.06666870588242046, 0.06250095514121304,
    -0.058823978658684585, 0.055555767627403614, -0.05263167937961666,
    0.05000004769810169, -0.047619070330142226, 0.04545455629320467,
    -0.04347826605304026, 0.04166666915034121, -0.04000000119214014,
    0.03846153903467518, -0.037037037312989324, 0.035714285847333355,
    -0.034482758684919304, 0.03333333336437758,
]

cdef double[10] STIRLING_SERIES = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
]


cdef inline double _lgamma1p_small(double z) nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(28, -1, -1):
        acc = acc * z + LGAMMA1P_SERIES[i]
    return z * (acc * z - EULER_GAMMA)


cdef inline double _stirling(double x) nogil:
    cdef double inv = 1.0 / x
    cdef double inv2 = inv * inv
    cdef double acc = 0.0
    cdef int i
    for i in range(9, -1, -1):
        acc = acc * inv2 + STIRLING_SERIES[i]
    return (x - 0.5) * log(x) - x + HALF_LOG_2PI + acc * inv


cdef double c_log_gamma(double x) nogil:
    cdef double z, prod
    if x < 0.75:
        return c_log_gamma(x + 1.0) - log(x)
    if x < 1.25:
        return _lgamma1p_small(x - 1.0)
    if 1.75 <= x < 2.25:
        z = x - 2.0
        return log1p(z) + _lgamma1p_small(z)
    if x >= STIRLING_MIN_ARG:
        return _stirling(x)
    prod = 1.0
    while x < STIRLING_MIN_ARG:
        prod *= x
        x += 1.0
    return _stirling(x) - log(prod)


cdef double c_kurtosis(double beta) nogil:
    return exp(c_log_gamma(5.0 / beta) + c_log_gamma(1.0 / beta)
               - 2.0 * c_log_gamma(3.0 / beta)) - 3.0


def log_gamma(double x):
    return c_log_gamma(x)


def ggd_excess_kurtosis(double beta):
    return c_kurtosis(beta)


def ggd_variance_factor(double beta):
    return exp(c_log_gamma(3.0 / beta) - c_log_gamma(1.0 / beta))


def invert_kurtosis(double target, double lo, double hi, double xtol, int maxiter):
    cdef int it = 0
    cdef double mid, fm
    while hi - lo > xtol and it < maxiter:
        mid = 0.5 * (lo + hi)
        fm = c_kurtosis(mid) - target
        it += 1
        if fm == 0.0:
            return mid, it
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), it


def ggd_log_pdf(x, double mu, double alpha, double beta):
    arr = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    cdef double[::1] xv = flat
    cdef double[::1] ov = out
    cdef double log_norm = log(beta) - log(2.0 * alpha) - c_log_gamma(1.0 / beta)
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef double u
    with nogil:
        if beta == 2.0:
            for i in range(n):
                u = (xv[i] - mu) / alpha
                ov[i] = log_norm - u * u
        elif beta == 1.0:
            for i in range(n):
                ov[i] = log_norm - fabs(xv[i] - mu) / alpha
        else:
            for i in range(n):
                ov[i] = log_norm - pow(fabs(xv[i] - mu) / alpha, beta)
    return out.reshape(arr.shape)


def rolling_variance(values, int window):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=float)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = n - window + 1
    out = np.empty(m if m > 0 else 0)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double mean, ss, d
    with nogil:
        for i in range(m):
            mean = 0.0
            for j in range(i, i + window):
                mean += v[j]
            mean /= window
            ss = 0.0
            for j in range(i, i + window):
                d = v[j] - mean
                ss += d * d
            ov[i] = ss / (window - 1)
    return out


def best_threshold(scores, positive):
    s = np.asarray(scores, dtype=float)
    p = np.asarray(positive, dtype=bool)
    order = np.argsort(s)  # runs of equal scores are consumed whole, so stability is irrelevant
    cdef double[::1] ss = np.ascontiguousarray(s[order])
    cdef unsigned char[::1] pp = np.ascontiguousarray(p[order]).view(np.uint8)
    cdef Py_ssize_t n = ss.shape[0]
    cdef Py_ssize_t i = 0
    cdef double n_pos = 0.0
    for i in range(n):
        n_pos += pp[i]
    # candidate 0: nothing predicted positive
    cdef double tp = 0.0, pred = 0.0
    cdef double best = 0.0, f1
    cdef Py_ssize_t best_end = 0  # number of sorted rows predicted positive
    i = 0
    while i < n:
        # consume one run of equal scores
        tp += pp[i]
        pred += 1.0
        i += 1
        while i < n and ss[i] == ss[i - 1]:
            tp += pp[i]
            pred += 1.0
            i += 1
        f1 = 2.0 * tp / (pred + n_pos)
        if f1 > best:
            best = f1
            best_end = i
    if best_end == 0:
        return float(ss[0] - max(1.0, fabs(ss[0]))), best
    if best_end == n:
        return float(ss[n - 1] + max(1.0, fabs(ss[n - 1]))), best
    cdef double a = ss[best_end - 1], b = ss[best_end]
    cdef double mid = a + 0.5 * (b - a)
    if mid <= a:
        mid = b
    return float(mid), best
