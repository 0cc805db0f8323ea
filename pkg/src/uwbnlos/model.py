"""Domain types shared by every module: kit configuration, samples, datasets."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ArgumentError

# First-path / RX power offset for a 16 MHz PRF.
POWER_OFFSET_PRF16 = 113.77


class ClassLabel(enum.IntEnum):
    """Propagation condition. NLOS is the positive (anomalous) class."""

    LOS = 0
    NLOS = 1


@dataclass(frozen=True)
class UwbConfig:
    """Radio configuration. Defaults are the MDEK1001 kit settings."""

    data_rate: float = 6.8  # Mbps
    center_frequency: float = 3993.6  # MHz
    bandwidth: float = 499.2  # MHz
    channel: int = 2
    prf: float = 16.0  # MHz
    power_offset: float = POWER_OFFSET_PRF16  # dBm, "A" in the power formulas

    def __post_init__(self):
        if not (self.prf > 0 and self.bandwidth > 0 and self.center_frequency > 0):
            raise ArgumentError("prf, bandwidth and center_frequency must be positive")
        if self.prf == 16.0 and self.power_offset != POWER_OFFSET_PRF16:
            raise ArgumentError(
                f"power_offset must be {POWER_OFFSET_PRF16} for a 16 MHz PRF, "
                f"got {self.power_offset}"
            )


@dataclass(frozen=True)
class RangingSample:
    """One ranging measurement with the diagnostics reported by the chip.

    Construction does not validate; use :func:`validate_dataset`.
    """

    index: int
    estimated_distance: float  # m
    true_distance: Optional[float]  # m
    fp_amp_1: float
    fp_amp_2: float
    fp_amp_3: float
    cir_power: float
    preamble_count: int
    label: Optional[ClassLabel] = None


@dataclass(frozen=True)
class FeatureVector:
    first_path_power: float  # dBm
    rx_power: float  # dBm
    power_difference: float  # dB
    range_variance: float  # m^2
    distance_error: Optional[float] = None  # m


@dataclass(frozen=True)
class Dataset:
    config: UwbConfig
    samples: tuple[RangingSample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    @property
    def size(self) -> int:
        return len(self.samples)

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        """Numeric column as a float array; missing optional values become NaN."""
        out = np.empty(len(self.samples))
        for i, s in enumerate(self.samples):
            v = getattr(s, name)
            out[i] = np.nan if v is None else float(v)
        return out

    def labels(self) -> np.ndarray:
        """Labels as an int array, -1 for unlabeled rows."""
        return np.array(
            [-1 if s.label is None else int(s.label) for s in self.samples], dtype=int
        )

    @property
    def is_labeled(self) -> bool:
        return all(s.label is not None for s in self.samples)

    def subset(self, positions: Iterable[int]) -> "Dataset":
        """Rows at the given positions, in the given order."""
        return Dataset(self.config, tuple(self.samples[int(i)] for i in positions))


@dataclass(frozen=True)
class Violation:
    index: int
    rule: str


def _finite(v) -> bool:
    return v is not None and math.isfinite(v)


def validate_sample(s: RangingSample) -> list[str]:
    problems = []
    if not isinstance(s.preamble_count, (int, np.integer)) or isinstance(
        s.preamble_count, bool
    ):
        problems.append("preamble_count must be an integer")
    elif s.preamble_count < 1:
        problems.append("preamble_count >= 1")
    for name in ("fp_amp_1", "fp_amp_2", "fp_amp_3"):
        v = getattr(s, name)
        if not _finite(v) or v < 0:
            problems.append(f"{name} >= 0")
    if not _finite(s.cir_power) or s.cir_power < 0:
        problems.append("cir_power >= 0")
    if not _finite(s.estimated_distance) or s.estimated_distance < 0:
        problems.append("estimated_distance >= 0")
    if s.true_distance is not None and (
        not _finite(s.true_distance) or s.true_distance < 0
    ):
        problems.append("true_distance >= 0")
    if s.label is not None and s.label not in (ClassLabel.LOS, ClassLabel.NLOS):
        problems.append("label in {0, 1}")
    return problems


def validate_dataset(dataset: Dataset) -> list[Violation]:
    """Every broken sample invariant, as (sample index, rule) pairs."""
    report = []
    for s in dataset.samples:
        report.extend(Violation(s.index, rule) for rule in validate_sample(s))
    return report


def as_labels(values: Sequence) -> np.ndarray:
    """Coerce a label sequence to an int array of 0/1, rejecting anything else."""
    if any(v is None for v in values):
        raise ArgumentError("unlabeled rows are not allowed here")
    arr = np.asarray([int(v) for v in values], dtype=int)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ArgumentError("labels must be 0 (LoS) or 1 (NLoS)")
    return arr
