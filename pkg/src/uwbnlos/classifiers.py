"""Gaussian naive Bayes baseline and GD/GGD likelihood anomaly detectors."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .distributions import (
    GaussianParams,
    GgdFitReport,
    GgdParams,
    fit_gd,
    fit_ggd,
    gd_log_pdf,
    ggd_log_pdf,
)
from .errors import ArgumentError, DegenerateFitError, ModelStateError
from .features import DEFAULT_WINDOW
from .model import ClassLabel, as_labels

FAMILIES = ("gd", "ggd")


def _default_names(n):
    return tuple(f"x{i}" for i in range(n))


def _as_matrix(features) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ArgumentError("features must be a 2-D matrix")
    return X


@dataclass(frozen=True)
class NbModel:
    """Per-class priors and per-(class, feature) Gaussian likelihoods."""

    priors: tuple[float, float]  # (LoS, NLoS)
    params: tuple[tuple[GaussianParams, ...], tuple[GaussianParams, ...]]
    feature_names: tuple[str, ...]
    window: int = DEFAULT_WINDOW
    estimator: str = "standard"

    def __post_init__(self):
        if any(p <= 0 for p in self.priors) or abs(sum(self.priors) - 1.0) > 1e-12:
            raise ArgumentError("priors must be positive and sum to 1")
        n = len(self.feature_names)
        if any(len(ps) != n for ps in self.params):
            raise ArgumentError("one parameter set per (class, feature) pair")


@dataclass(frozen=True)
class AnomalyModel:
    """Independent per-feature densities fitted on LoS rows, plus a threshold.

    ``epsilon`` is a log-likelihood level; rows scoring strictly below it
    are NLoS. It is None until chosen.
    """

    family: str
    params: tuple[Union[GaussianParams, GgdParams], ...]
    feature_names: tuple[str, ...]
    window: int = DEFAULT_WINDOW
    estimator: str = "standard"
    epsilon: Optional[float] = None
    fit_reports: tuple[GgdFitReport, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if len(self.params) != len(self.feature_names):
            raise ArgumentError("parameter count must equal feature count")
        want = GaussianParams if self.family == "gd" else GgdParams
        if not all(isinstance(p, want) for p in self.params):
            raise ArgumentError(f"{self.family} model needs {want.__name__} parameters")
        if self.epsilon is not None and not math.isfinite(self.epsilon):
            raise ArgumentError("epsilon must be finite")

    def with_epsilon(self, epsilon: float) -> "AnomalyModel":
        return dataclasses.replace(self, epsilon=float(epsilon))


def fit_nb(
    features,
    labels: Sequence,
    feature_names: Optional[Sequence[str]] = None,
    window: int = DEFAULT_WINDOW,
    estimator: str = "standard",
) -> NbModel:
    X = _as_matrix(features)
    y = as_labels(labels)
    if len(y) != X.shape[0]:
        raise ArgumentError("features and labels differ in length")
    names = tuple(feature_names) if feature_names is not None else _default_names(X.shape[1])
    counts = [int((y == c).sum()) for c in (0, 1)]
    if min(counts) == 0:
        raise ArgumentError("both LoS and NLoS rows are required")
    params = []
    for c in (ClassLabel.LOS, ClassLabel.NLOS):
        rows = X[y == c]
        per_feature = []
        for j, name in enumerate(names):
            try:
                per_feature.append(fit_gd(rows[:, j], estimator))
            except ArgumentError as exc:
                raise DegenerateFitError(
                    f"class {c.name}, feature {name}: {exc}"
                ) from exc
        params.append(tuple(per_feature))
    total = sum(counts)
    return NbModel(
        (counts[0] / total, counts[1] / total), tuple(params), names, window, estimator
    )


def nb_log_joint(model: NbModel, x) -> np.ndarray:
    """log P(l) + sum_i log P(x_i | l) for each class, shape (..., 2)."""
    X = np.asarray(x, dtype=float)
    out = []
    for c in (0, 1):
        s = math.log(model.priors[c])
        for j, p in enumerate(model.params[c]):
            s = s + gd_log_pdf(X[..., j], p)
        out.append(s)
    return np.stack(np.broadcast_arrays(*out), axis=-1)


def nb_posterior(model: NbModel, x) -> np.ndarray:
    """Posterior (LoS, NLoS) probabilities, normalized in log space."""
    lj = nb_log_joint(model, x)
    return np.exp(lj - logsumexp(lj, axis=-1, keepdims=True))


def nb_classify(model: NbModel, x):
    """Most probable class; an exact tie goes to LoS."""
    lj = nb_log_joint(model, x)
    labels = (lj[..., 1] > lj[..., 0]).astype(int)
    if labels.ndim == 0:
        return ClassLabel(int(labels))
    return labels


def fit_anomaly(
    features,
    family: str,
    feature_names: Optional[Sequence[str]] = None,
    window: int = DEFAULT_WINDOW,
    estimator: str = "standard",
) -> AnomalyModel:
    """Fit one density per feature column on LoS-only rows; epsilon stays unset."""
    X = _as_matrix(features)
    names = tuple(feature_names) if feature_names is not None else _default_names(X.shape[1])
    if len(names) != X.shape[1]:
        raise ArgumentError("feature_names length differs from column count")
    if family not in FAMILIES:
        raise ArgumentError(f"family must be one of {FAMILIES}, got {family!r}")
    params, reports = [], []
    for j, name in enumerate(names):
        try:
            if family == "gd":
                params.append(fit_gd(X[:, j], estimator))
            else:
                p, rep = fit_ggd(X[:, j], estimator)
                params.append(p)
                reports.append(rep)
        except DegenerateFitError as exc:
            raise DegenerateFitError(f"feature {name}: {exc}") from exc
    return AnomalyModel(family, tuple(params), names, window, estimator, None, tuple(reports))


def anomaly_score(model: AnomalyModel, x):
    """Sum of per-feature log densities; lower means more anomalous."""
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != len(model.params):
        raise ArgumentError(
            f"expected {len(model.params)} features, got {X.shape[-1]}"
        )
    logpdf = gd_log_pdf if model.family == "gd" else ggd_log_pdf
    score = sum(logpdf(X[..., j], p) for j, p in enumerate(model.params))
    return float(score) if np.ndim(score) == 0 else score


def select_epsilon(scores: Sequence[float], labels: Sequence) -> tuple[float, float]:
    """Threshold maximizing F1 (NLoS positive, predicted iff score < epsilon).

    Returns ``(epsilon, f1)``. Ties go to the smallest epsilon.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = as_labels(labels)
    if s.size != y.size:
        raise ArgumentError("scores and labels differ in length")
    if not np.isfinite(s).all():
        raise ArgumentError("scores must be finite")
    if y.size == 0 or y.min() == y.max():
        raise ArgumentError("both LoS and NLoS labels are required to select epsilon")
    eps, f1 = _kernels.best_threshold(s, y == 1)
    return float(eps), float(f1)


def classify_anomaly(model: AnomalyModel, x):
    """NLoS iff the score is strictly below epsilon."""
    if model.epsilon is None:
        raise ModelStateError("anomaly model has no epsilon; select or set one first")
    score = anomaly_score(model, x)
    labels = np.asarray(score) < model.epsilon
    if labels.ndim == 0:
        return ClassLabel(int(labels))
    return labels.astype(int)
