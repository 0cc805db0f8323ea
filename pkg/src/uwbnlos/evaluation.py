"""Metrics, dataset splitting and the NB / GD / GGD comparison experiment."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .classifiers import (
    AnomalyModel,
    NbModel,
    anomaly_score,
    classify_anomaly,
    fit_anomaly,
    fit_nb,
    nb_classify,
    select_epsilon,
)
from .errors import ArgumentError
from .features import DEFAULT_WINDOW, extract_features, normalize_selection
from .model import Dataset, as_labels
from .simulator import ScenarioSpec, synthesize_dataset

REPORT_FORMAT = "uwbnlos-report"
REPORT_VERSION = 1
MODEL_NAMES = ("naive_bayes", "gd_anomaly", "ggd_anomaly")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float


def confusion_matrix(predicted: Sequence, truth: Sequence) -> ConfusionMatrix:
    """Counts with NLoS (1) as the positive class."""
    p = as_labels(predicted)
    t = as_labels(truth)
    if p.size != t.size:
        raise ArgumentError(f"length mismatch: {p.size} predictions, {t.size} labels")
    if p.size == 0:
        raise ArgumentError("empty input")
    return ConfusionMatrix(
        tp=int(((p == 1) & (t == 1)).sum()),
        fp=int(((p == 1) & (t == 0)).sum()),
        fn=int(((p == 0) & (t == 1)).sum()),
        tn=int(((p == 0) & (t == 0)).sum()),
    )


def metrics(cm: ConfusionMatrix) -> Metrics:
    if cm.total == 0:
        raise ArgumentError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(accuracy, precision, recall, f1)


def split_indices(
    labels: Sequence, train_fraction: float, seed: int, stratified: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, exhaustive (train, rest) row positions, each sorted.

    Stratified splits round each class's train share to the nearest row.
    ``labels`` may hold -1 for unlabeled rows when not stratified.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ArgumentError("train_fraction must be in (0, 1)")
    y = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    if stratified:
        if not (np.any(y == 0) and np.any(y == 1)) or np.any((y != 0) & (y != 1)):
            raise ArgumentError("stratified split needs fully labeled data with both classes")
        groups = [np.flatnonzero(y == c) for c in (0, 1)]
    else:
        groups = [np.arange(y.size)]
    train, rest = [], []
    for g in groups:
        perm = rng.permutation(g)
        k = int(np.floor(train_fraction * g.size + 0.5))
        train.append(perm[:k])
        rest.append(perm[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(rest))


def split_dataset(
    dataset: Dataset, train_fraction: float, seed: int, stratified: bool = True
) -> tuple[Dataset, Dataset]:
    tr, va = split_indices(dataset.labels(), train_fraction, seed, stratified)
    return dataset.subset(tr), dataset.subset(va)


def three_way_split(labels, fractions=(0.6, 0.2, 0.2), seed: int = 0):
    """Stratified (train, validation, test) row positions."""
    f_train, f_val, f_test = fractions
    if min(fractions) <= 0 or abs(f_train + f_val + f_test - 1.0) > 1e-9:
        raise ArgumentError("split fractions must be positive and sum to 1")
    y = np.asarray(labels, dtype=int)
    train, rest = split_indices(y, f_train, seed, True)
    val_rel, test_rel = split_indices(y[rest], f_val / (f_val + f_test), seed + 1, True)
    return train, rest[val_rel], rest[test_rel]


@dataclass(frozen=True)
class ExperimentConfig:
    features: tuple[str, ...] = ("first_path_power", "power_difference", "range_variance")
    window: int = DEFAULT_WINDOW
    fractions: tuple[float, float, float] = (0.6, 0.2, 0.2)
    split_seed: int = 0
    estimator: str = "standard"

    def __post_init__(self):
        object.__setattr__(self, "features", normalize_selection(self.features))
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))


def _cm_dict(cm):
    return dataclasses.asdict(cm)


def _params_dict(model):
    if isinstance(model, NbModel):
        return {
            "priors": {"los": model.priors[0], "nlos": model.priors[1]},
            "los": {n: dataclasses.asdict(p) for n, p in zip(model.feature_names, model.params[0])},
            "nlos": {n: dataclasses.asdict(p) for n, p in zip(model.feature_names, model.params[1])},
        }
    out = {n: dataclasses.asdict(p) for n, p in zip(model.feature_names, model.params)}
    return out


def _evaluate(pred, truth):
    cm = confusion_matrix(pred, truth)
    return {"confusion_matrix": _cm_dict(cm), "metrics": dataclasses.asdict(metrics(cm))}


def _scenario_dict(scenario: ScenarioSpec):
    d = dataclasses.asdict(scenario)
    d["true_distances"] = list(scenario.true_distances)
    return d


def run_experiment(
    scenario: ScenarioSpec,
    config: ExperimentConfig = ExperimentConfig(),
    dataset: Optional[Dataset] = None,
) -> dict:
    """Train and compare the NB, GD-anomaly and GGD-anomaly detectors.

    The dataset (synthesized from ``scenario`` unless given) is split
    stratified into train / validation / test. NB trains on all train rows;
    the anomaly models fit on the LoS train rows only and choose epsilon on
    the validation rows. All three are scored on the test rows.
    """
    start = time.perf_counter()
    source = "provided" if dataset is not None else "synthesized"
    if dataset is None:
        dataset = synthesize_dataset(scenario)
    y = as_labels([s.label for s in dataset.samples])
    X = extract_features(dataset, config.features, config.window)
    train, val, test = three_way_split(y, config.fractions, config.split_seed)
    names = config.features

    models: dict[str, dict] = {}
    nb = fit_nb(X[train], y[train], names, config.window, config.estimator)
    models["naive_bayes"] = {
        "params": _params_dict(nb),
        **_evaluate(nb_classify(nb, X[test]), y[test]),
    }

    los_train = train[y[train] == 0]
    los_test = test[y[test] == 0]
    for family in ("gd", "ggd"):
        model: AnomalyModel = fit_anomaly(
            X[los_train], family, names, config.window, config.estimator
        )
        eps, val_f1 = select_epsilon(anomaly_score(model, X[val]), y[val])
        model = model.with_epsilon(eps)
        entry = {
            "params": _params_dict(model),
            "epsilon": eps,
            "validation_f1": val_f1,
            "heldout_los_mean_loglik": float(np.mean(anomaly_score(model, X[los_test]))),
            **_evaluate(classify_anomaly(model, X[test]), y[test]),
        }
        if family == "ggd":
            entry["clamped"] = [r.clamped for r in model.fit_reports]
        models[f"{family}_anomaly"] = entry

    index = np.array([s.index for s in dataset.samples])
    report = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "kernel_backend": _kernels.BACKEND,
        "scenario": _scenario_dict(scenario),
        "experiment": {
            "features": list(config.features),
            "window": config.window,
            "fractions": list(config.fractions),
            "split_seed": config.split_seed,
            "estimator": config.estimator,
        },
        "dataset": {
            "source": source,
            "rows": len(dataset),
            "n_los": int((y == 0).sum()),
            "n_nlos": int((y == 1).sum()),
        },
        "splits": {
            "train": index[train].tolist(),
            "validation": index[val].tolist(),
            "test": index[test].tolist(),
        },
        "models": models,
    }
    report["runtime_s"] = time.perf_counter() - start
    return report


def summary_rows(report: dict) -> list[tuple[str, float, float, float, float]]:
    """(model, accuracy, precision, recall, f1) per model, in fixed order."""
    rows = []
    for name in MODEL_NAMES:
        m = report["models"][name]["metrics"]
        rows.append((name, m["accuracy"], m["precision"], m["recall"], m["f1"]))
    return rows
