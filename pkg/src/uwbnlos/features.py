"""NLoS-discriminating features computed from raw ranging diagnostics."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ArgumentError, DomainError
from .model import Dataset, FeatureVector, RangingSample, UwbConfig

FEATURE_NAMES = (
    "first_path_power",
    "rx_power",
    "power_difference",
    "range_variance",
    "distance_error",
)

DEFAULT_WINDOW = 20
CIR_SCALE = 2.0**17


def first_path_power_db(f1, f2, f3, preamble_count, offset):
    """Array form of the first-path power level in dBm."""
    f1, f2, f3 = (np.asarray(a, dtype=float) for a in (f1, f2, f3))
    n = np.asarray(preamble_count, dtype=float)
    energy = f1 * f1 + f2 * f2 + f3 * f3
    if np.any(n < 1):
        raise DomainError("preamble count must be >= 1")
    if np.any(energy <= 0):
        raise DomainError("first-path amplitudes are all zero (log of zero)")
    return 10.0 * np.log10(energy / (n * n)) - offset


def rx_power_db(cir_power, preamble_count, offset):
    """Array form of the received power level in dBm."""
    c = np.asarray(cir_power, dtype=float)
    n = np.asarray(preamble_count, dtype=float)
    if np.any(n < 1):
        raise DomainError("preamble count must be >= 1")
    if np.any(c <= 0):
        raise DomainError("CIR power must be > 0 (log of zero)")
    return 10.0 * np.log10(c * CIR_SCALE / (n * n)) - offset


def first_path_power(sample: RangingSample, config: UwbConfig) -> float:
    """First-path power level (dBm) from the three first-path harmonics.

    ``10 log10((F1^2 + F2^2 + F3^2) / N^2) - A`` with N the preamble
    accumulation count and A the PRF-dependent offset in ``config``.
    """
    return float(
        first_path_power_db(
            sample.fp_amp_1,
            sample.fp_amp_2,
            sample.fp_amp_3,
            sample.preamble_count,
            config.power_offset,
        )
    )


def rx_power(sample: RangingSample, config: UwbConfig) -> float:
    """Received power level (dBm): ``10 log10(CIR_P * 2^17 / N^2) - A``."""
    return float(rx_power_db(sample.cir_power, sample.preamble_count, config.power_offset))


def power_difference(rx: float, fp: float) -> float:
    return rx - fp


def rolling_range_variance(distances: Sequence[float], window: int) -> np.ndarray:
    """Unbiased variance of each length-``window`` run of consecutive distances.

    Element i covers ``distances[i : i + window]``, so the output is
    ``window - 1`` shorter than the input.
    """
    if int(window) != window or window < 2:
        raise ArgumentError(f"window must be an integer >= 2, got {window}")
    values = np.asarray(distances, dtype=float)
    if values.ndim != 1 or values.size < window:
        raise ArgumentError(
            f"need at least {window} distances for the variance window, got {values.size}"
        )
    out = _kernels.rolling_variance(values, int(window))
    # rounding can leave -0.0 or tiny negatives on constant windows
    return np.maximum(out, 0.0)


def distance_error(estimated: float, truth: float) -> float:
    """Ranging error, ``estimated - truth``; NLoS bias shows up positive."""
    if not (math.isfinite(estimated) and math.isfinite(truth)) or truth < 0:
        raise ArgumentError("distance_error needs finite inputs and truth >= 0")
    return estimated - truth


def backfilled_range_variance(distances, window: int) -> np.ndarray:
    """Per-sample range variance; the first ``window - 1`` rows reuse the first value."""
    var = rolling_range_variance(distances, window)
    return np.concatenate((np.full(window - 1, var[0]), var))


def _check_selection(selection: Iterable[str]) -> tuple[str, ...]:
    names = tuple(selection)
    if not names:
        raise ArgumentError("feature selection is empty")
    unknown = [n for n in names if n not in FEATURE_NAMES]
    if unknown:
        raise ArgumentError(f"unknown feature(s): {', '.join(unknown)}")
    if len(set(names)) != len(names):
        raise ArgumentError("feature selection has duplicates")
    return names


def normalize_selection(selection: Iterable[str]) -> tuple[str, ...]:
    """Validate a selection; a set is put into canonical order."""
    if isinstance(selection, (set, frozenset)):
        selection = [n for n in FEATURE_NAMES if n in selection] + sorted(
            n for n in selection if n not in FEATURE_NAMES
        )
    return _check_selection(selection)


def _per_sample(fn, samples, config, name):
    out = np.empty(len(samples))
    for i, s in enumerate(samples):
        try:
            out[i] = fn(s, config)
        except DomainError as exc:
            raise DomainError(f"sample {s.index}: {name}: {exc}") from exc
    return out


def extract_features(
    dataset: Dataset,
    selection: Iterable[str] = ("first_path_power", "range_variance"),
    window: int = DEFAULT_WINDOW,
) -> np.ndarray:
    """Feature matrix with one row per sample and one column per selected name.

    Columns follow the order of ``selection`` (sets use the canonical order
    of ``FEATURE_NAMES``).
    """
    names = normalize_selection(selection)
    samples = dataset.samples
    cfg = dataset.config
    cache: dict[str, np.ndarray] = {}

    def get(name):
        if name in cache:
            return cache[name]
        if name == "first_path_power":
            col = _per_sample(first_path_power, samples, cfg, name)
        elif name == "rx_power":
            col = _per_sample(rx_power, samples, cfg, name)
        elif name == "power_difference":
            col = get("rx_power") - get("first_path_power")
        elif name == "range_variance":
            col = backfilled_range_variance(dataset.column("estimated_distance"), window)
        else:
            est = dataset.column("estimated_distance")
            truth = dataset.column("true_distance")
            missing = np.flatnonzero(np.isnan(truth))
            if missing.size:
                idx = samples[int(missing[0])].index
                raise ArgumentError(f"sample {idx}: distance_error needs true_distance")
            col = est - truth
        cache[name] = col
        return col

    if not samples:
        return np.empty((0, len(names)))
    return np.column_stack([get(n) for n in names])


def feature_vectors(dataset: Dataset, window: int = DEFAULT_WINDOW) -> list[FeatureVector]:
    """All features per sample as :class:`FeatureVector` records."""
    names = ["first_path_power", "rx_power", "power_difference", "range_variance"]
    has_truth = all(s.true_distance is not None for s in dataset.samples)
    if has_truth:
        names.append("distance_error")
    X = extract_features(dataset, names, window)
    return [
        FeatureVector(*(float(v) for v in row[:4]), float(row[4]) if has_truth else None)
        for row in X
    ]
