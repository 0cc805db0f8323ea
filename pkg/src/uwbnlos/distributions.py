"""Gaussian and generalized Gaussian densities with moment-based fitting.

The generalized Gaussian (GGD) density is

    p(x) = beta / (2 alpha Gamma(1/beta)) * exp(-(|x - mu| / alpha)**beta)

with variance ``alpha**2 Gamma(3/beta) / Gamma(1/beta)`` and excess kurtosis
``Gamma(5/beta) Gamma(1/beta) / Gamma(3/beta)**2 - 3``. The shape is fitted
by matching the sample excess kurtosis (bisection on the decreasing map
beta -> kurtosis), then the scale by matching the sample variance.

Estimators come in two modes:

``"standard"``
    mean divides by M, variance and fourth moment by M - 1.
``"paper-literal"``
    every sum, the mean included, divides by M - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaincinv

from . import _kernels
from .errors import ArgumentError, DegenerateFitError

BETA_MIN = 0.15
BETA_MAX = 20.0
KAPPA_MARGIN = 1e-9
BISECTION_XTOL = 1e-12
BISECTION_MAXITER = 200
LOG_GAMMA_DOMAIN = (0.05, 400.0)
ESTIMATORS = ("standard", "paper-literal")

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianParams:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2)):
            raise ArgumentError("Gaussian parameters must be finite")
        if self.sigma2 <= 0:
            raise ArgumentError(f"sigma2 must be > 0, got {self.sigma2}")


@dataclass(frozen=True)
class GgdParams:
    mu: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.mu, self.alpha, self.beta)):
            raise ArgumentError("GGD parameters must be finite")
        if self.alpha <= 0 or self.beta <= 0:
            raise ArgumentError(
                f"alpha and beta must be > 0, got alpha={self.alpha}, beta={self.beta}"
            )

    @property
    def variance(self) -> float:
        return moments_from_params(self.alpha, self.beta)[0]


@dataclass(frozen=True)
class MomentEstimates:
    mean: float
    variance: float
    kurtosis: float  # excess


@dataclass(frozen=True)
class GgdFitReport:
    moments: MomentEstimates
    kurtosis_used: float
    clamped: bool
    estimator: str


def log_gamma(x: float) -> float:
    """log Gamma(x) on [0.05, 400], relative error below 1e-12."""
    lo, hi = LOG_GAMMA_DOMAIN
    if not (lo <= x <= hi):
        raise ArgumentError(f"log_gamma argument {x} outside [{lo}, {hi}]")
    return _kernels.log_gamma(float(x))


def gd_log_pdf(x, params: GaussianParams):
    x = np.asarray(x, dtype=float)
    out = -0.5 * (_LOG_2PI + math.log(params.sigma2)) - (x - params.mu) ** 2 / (
        2.0 * params.sigma2
    )
    return out if out.ndim else float(out)


def gd_pdf(x, params: GaussianParams):
    return np.exp(gd_log_pdf(x, params))


def ggd_log_pdf(x, params: GgdParams):
    out = _kernels.ggd_log_pdf(x, params.mu, params.alpha, params.beta)
    return out if np.ndim(out) else float(out)


def ggd_pdf(x, params: GgdParams):
    return np.exp(ggd_log_pdf(x, params))


def moments_from_params(alpha: float, beta: float) -> tuple[float, float]:
    """(variance, excess kurtosis) of a GGD with scale ``alpha`` and shape ``beta``."""
    if alpha <= 0 or beta <= 0:
        raise ArgumentError("alpha and beta must be > 0")
    sigma2 = alpha * alpha * _kernels.ggd_variance_factor(beta)
    return sigma2, _kernels.ggd_excess_kurtosis(beta)


def kurtosis_of_shape(beta: float) -> float:
    return _kernels.ggd_excess_kurtosis(float(beta))


KAPPA_LOW = kurtosis_of_shape(BETA_MAX) + KAPPA_MARGIN
KAPPA_HIGH = kurtosis_of_shape(BETA_MIN) - KAPPA_MARGIN


def clamp_kurtosis(kappa: float) -> tuple[float, bool]:
    """Clip an excess kurtosis into the range attainable for beta in [0.15, 20]."""
    if not math.isfinite(kappa):
        raise ArgumentError(f"kurtosis must be finite, got {kappa}")
    clipped = min(max(kappa, KAPPA_LOW), KAPPA_HIGH)
    return clipped, clipped != kappa


def invert_kurtosis(kappa_hat: float) -> float:
    """Shape beta whose GGD excess kurtosis equals ``kappa_hat`` (after clamping)."""
    target, _ = clamp_kurtosis(kappa_hat)
    beta, _ = _kernels.invert_kurtosis(
        target, BETA_MIN, BETA_MAX, BISECTION_XTOL, BISECTION_MAXITER
    )
    return beta


def alpha_from_variance(sigma2: float, beta: float) -> float:
    if sigma2 <= 0 or beta <= 0:
        raise ArgumentError("sigma2 and beta must be > 0")
    return math.sqrt(sigma2 / _kernels.ggd_variance_factor(beta))


def _as_samples(samples, minimum):
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < minimum:
        raise ArgumentError(f"need at least {minimum} samples, got {x.size}")
    if not np.isfinite(x).all():
        raise ArgumentError("samples must be finite")
    return x


def _mean(x, estimator):
    if estimator == "standard":
        return float(x.mean())
    if estimator == "paper-literal":
        return float(x.sum() / (x.size - 1))
    raise ArgumentError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")


def fit_gd(samples: Sequence[float], estimator: str = "standard") -> GaussianParams:
    x = _as_samples(samples, 2)
    mu = _mean(x, estimator)
    sigma2 = float(((x - mu) ** 2).sum() / (x.size - 1))
    if not sigma2 > 0:
        raise DegenerateFitError("zero variance: all samples identical")
    return GaussianParams(mu, sigma2)


def estimate_moments(samples: Sequence[float], estimator: str = "standard") -> MomentEstimates:
    """Mean, variance and excess kurtosis, each sum divided by M - 1 (mean per mode)."""
    x = _as_samples(samples, 4)
    mu = _mean(x, estimator)
    d2 = (x - mu) ** 2
    m2 = float(d2.sum() / (x.size - 1))
    if not m2 > 0:
        raise DegenerateFitError("zero variance: all samples identical")
    m4 = float((d2 * d2).sum() / (x.size - 1))
    return MomentEstimates(mu, m2, m4 / (m2 * m2) - 3.0)


def fit_ggd(
    samples: Sequence[float], estimator: str = "standard"
) -> tuple[GgdParams, GgdFitReport]:
    """Moment-matching GGD fit: kurtosis gives beta, variance then gives alpha."""
    m = estimate_moments(samples, estimator)
    kappa, clamped = clamp_kurtosis(m.kurtosis)
    beta = invert_kurtosis(kappa)
    alpha = alpha_from_variance(m.variance, beta)
    return GgdParams(m.mean, alpha, beta), GgdFitReport(m, kappa, clamped, estimator)


def sample_ggd(params: GgdParams, n: int, seed: int) -> np.ndarray:
    """Draw ``mu + sign * alpha * G**(1/beta)`` with ``G ~ Gamma(1/beta, 1)``."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.gamma(1.0 / params.beta, 1.0, size=n)
    sign = rng.integers(0, 2, size=n) * 2 - 1
    return params.mu + sign * params.alpha * g ** (1.0 / params.beta)


def ggd_abs_quantile(alpha: float, beta: float, q: float) -> float:
    """q-quantile of ``|X - mu|`` for X ~ GGD; ``(|X - mu| / alpha)**beta ~ Gamma(1/beta)``."""
    return alpha * float(gammaincinv(1.0 / beta, q)) ** (1.0 / beta)


def alpha_for_abs_quantile(beta: float, q: float, value: float) -> float:
    """Scale alpha that puts the q-quantile of ``|X - mu|`` at ``value``."""
    return value / ggd_abs_quantile(1.0, beta, q)
