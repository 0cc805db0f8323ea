"""Pure-Python numerical kernels.

Reference implementation of everything in ``_ckernels.pyx``. The two
modules expose the same functions with the same results (to rounding);
``uwbnlos._kernels`` picks one at import time.
"""

import math

import numpy as np

EULER_GAMMA = 0.5772156649015329
HALF_LOG_2PI = 0.9189385332046728

# (-1)^k zeta(k) / k for k = 2..30: Taylor coefficients of log Gamma(1 + z).
LGAMMA1P_SERIES = (
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
)

# B_2k / (2k (2k - 1)) for k = 1..10: Stirling series for log Gamma.
STIRLING_SERIES = (
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
)

STIRLING_MIN_ARG = 8.0


def _lgamma1p_small(z):
    # log Gamma(1 + z) for |z| <= 0.25
    acc = 0.0
    for c in reversed(LGAMMA1P_SERIES):
        acc = acc * z + c
    return z * (acc * z - EULER_GAMMA)


def _stirling(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(STIRLING_SERIES):
        acc = acc * inv2 + c
    return (x - 0.5) * math.log(x) - x + HALF_LOG_2PI + acc * inv


def log_gamma(x):
    """log Gamma(x) for x > 0. No range check; see ``distributions.log_gamma``."""
    x = float(x)
    if x < 0.75:
        return log_gamma(x + 1.0) - math.log(x)
    if x < 1.25:
        return _lgamma1p_small(x - 1.0)
    if 1.75 <= x < 2.25:
        z = x - 2.0
        return math.log1p(z) + _lgamma1p_small(z)
    if x >= STIRLING_MIN_ARG:
        return _stirling(x)
    prod = 1.0
    while x < STIRLING_MIN_ARG:
        prod *= x
        x += 1.0
    return _stirling(x) - math.log(prod)


def ggd_excess_kurtosis(beta):
    lg = log_gamma
    return math.exp(lg(5.0 / beta) + lg(1.0 / beta) - 2.0 * lg(3.0 / beta)) - 3.0


def ggd_variance_factor(beta):
    """Gamma(3/beta) / Gamma(1/beta), so that variance = alpha**2 * factor."""
    return math.exp(log_gamma(3.0 / beta) - log_gamma(1.0 / beta))


def invert_kurtosis(target, lo, hi, xtol, maxiter):
    """Bisection for beta in [lo, hi] with ggd_excess_kurtosis(beta) == target.

    The kurtosis is decreasing in beta; the caller guarantees the target is
    bracketed. Returns (beta, iterations).
    """
    it = 0
    while hi - lo > xtol and it < maxiter:
        mid = 0.5 * (lo + hi)
        fm = ggd_excess_kurtosis(mid) - target
        it += 1
        if fm == 0.0:
            return mid, it
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), it


def ggd_log_pdf(x, mu, alpha, beta):
    x = np.asarray(x, dtype=float)
    log_norm = math.log(beta) - math.log(2.0 * alpha) - log_gamma(1.0 / beta)
    return log_norm - (np.abs(x - mu) / alpha) ** beta


def rolling_variance(values, window):
    values = np.ascontiguousarray(values, dtype=float)
    windows = np.lib.stride_tricks.sliding_window_view(values, window)
    return windows.var(axis=1, ddof=1)


def best_threshold(scores, positive):
    """Sweep every distinct decision threshold and return the best F1.

    ``positive`` marks the anomalous class; a row is predicted positive iff
    its score is below the threshold. Candidates are a sentinel below the
    minimum, midpoints between consecutive distinct scores, and a sentinel
    above the maximum. Ties go to the smallest threshold.
    Returns (threshold, f1).
    """
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    uniq, inverse = np.unique(scores, return_inverse=True)
    k = uniq.size
    pos_at = np.bincount(inverse, weights=positive, minlength=k)
    all_at = np.bincount(inverse, minlength=k)
    # candidate j predicts positive for every score <= uniq[j - 1]
    tp = np.concatenate(([0.0], np.cumsum(pos_at)))
    pred = np.concatenate(([0.0], np.cumsum(all_at).astype(float)))
    f1 = 2.0 * tp / (pred + n_pos)
    j = int(np.argmax(f1))
    return _candidate(uniq, j), float(f1[j])


def _candidate(uniq, j):
    k = uniq.size
    if j == 0:
        return float(uniq[0] - max(1.0, abs(uniq[0])))
    if j == k:
        return float(uniq[-1] + max(1.0, abs(uniq[-1])))
    a, b = float(uniq[j - 1]), float(uniq[j])
    mid = a + 0.5 * (b - a)
    if mid <= a:
        mid = b
    return mid
