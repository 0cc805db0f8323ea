"""Synthetic IR-UWB ranging data.

Two tiers:

* waveform level: a train of Gaussian-doublet pulses through a multipath
  channel with white Gaussian noise, then leading-edge time-of-arrival
  detection and conversion to distance. Slow and exact; used to check
  ranging behaviour.
* feature level: draws first-path power, power difference and ranging
  error straight from per-class distributions and back-solves the raw chip
  diagnostics. Fast; used for classifier experiments.

Times are in nanoseconds and sample rates in GHz throughout.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import signal

from .distributions import GgdParams, alpha_for_abs_quantile
from .errors import ArgumentError, DetectionError
from .features import CIR_SCALE
from .model import ClassLabel, Dataset, RangingSample, UwbConfig

SPEED_OF_LIGHT = 299_792_458.0  # m/s
C_M_PER_NS = SPEED_OF_LIGHT * 1e-9

DEFAULT_SAMPLE_RATE = 64.0  # GHz
DEFAULT_PULSE_WIDTH = 0.5  # ns
DEFAULT_LEADING_EDGE = 0.3


def gaussian_doublet(t, width: float = DEFAULT_PULSE_WIDTH):
    """Second-derivative Gaussian pulse with unit energy (integral of p**2 is 1).

    ``p(t) = k (1 - 4 pi (t/w)**2) exp(-2 pi (t/w)**2)``; the energy of the
    unnormalized shape is ``3 w / 8``.
    """
    if width <= 0:
        raise ArgumentError("pulse width must be > 0")
    u = np.asarray(t, dtype=float) / width
    u2 = 4.0 * math.pi * u * u
    out = (1.0 - u2) * np.exp(-0.5 * u2) / math.sqrt(0.375 * width)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PulseSpec:
    energy: float = 1.0
    pulse_width: float = DEFAULT_PULSE_WIDTH  # ns
    period: float = 62.5  # ns, one pulse per 1/(16 MHz)
    pulse_count: int = 2

    def __post_init__(self):
        if self.energy <= 0:
            raise ArgumentError("pulse energy must be > 0")
        if self.pulse_count < 1:
            raise ArgumentError("pulse_count must be >= 1")
        if not self.period > self.pulse_width:
            raise ArgumentError("pulse period must exceed the pulse width")


def transmit_signal(spec: PulseSpec, t):
    """``sqrt(E) * sum_{k=1}^{K-1} p(t - k T_p)``.

    The sum starts at k = 1 and stops at K - 1, so a train of ``K`` has
    ``K - 1`` pulses and the first one is centred at ``T_p``.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k in range(1, spec.pulse_count):
        out = out + gaussian_doublet(t - k * spec.period, spec.pulse_width)
    out = math.sqrt(spec.energy) * out
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ChannelSpec:
    """Discrete multipath channel ``sum_n a_n p(t - tau_n)`` plus AWGN.

    ``noise_psd`` is the two-sided level N0/2; sampled at ``fs`` the noise
    variance per sample is ``noise_psd * fs``.
    """

    amplitudes: tuple[float, ...]
    delays: tuple[float, ...]  # ns, strictly increasing
    noise_psd: float = 0.0
    los: bool = True
    nlos_excess_delay_mean: float = 0.0  # ns

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))
        if len(self.amplitudes) < 1 or len(self.amplitudes) != len(self.delays):
            raise ArgumentError("need at least one path and one delay per amplitude")
        if any(b <= a for a, b in zip(self.delays, self.delays[1:])):
            raise ArgumentError("path delays must be strictly increasing")
        if self.noise_psd < 0:
            raise ArgumentError("noise_psd must be >= 0")

    @property
    def path_count(self) -> int:
        return len(self.amplitudes)


def exponential_channel(
    first_delay: float,
    los: bool = True,
    seed: int = 0,
    path_count: int = 6,
    mean_spacing: float = 1.5,
    decay: float = 4.0,
    nlos_first_gain: float = 0.15,
    nlos_excess_delay_mean: float = 1.0,
    noise_psd: float = 0.0,
) -> ChannelSpec:
    """Random channel with an exponentially decaying power-delay profile.

    NLoS channels push the direct path back by an exponential excess delay
    and attenuate it to ``nlos_first_gain``.
    """
    if path_count < 1:
        raise ArgumentError("path_count must be >= 1")
    rng = np.random.default_rng(seed)
    tau0 = first_delay
    if not los and nlos_excess_delay_mean > 0:
        tau0 += rng.exponential(nlos_excess_delay_mean)
    gaps = rng.exponential(mean_spacing, size=path_count - 1) + 1e-3
    delays = tau0 + np.concatenate(([0.0], np.cumsum(gaps)))
    amps = np.exp(-(delays - tau0) / decay)
    if path_count > 1:
        amps[1:] *= rng.uniform(0.3, 1.0, size=path_count - 1)
    if not los:
        amps[0] *= nlos_first_gain
    return ChannelSpec(
        tuple(amps), tuple(delays), noise_psd, los, nlos_excess_delay_mean if not los else 0.0
    )


def received_signal(
    tx: Callable, channel: ChannelSpec, t, sample_rate: float, seed: Optional[int] = None
) -> np.ndarray:
    """Multipath copy of the waveform ``tx`` on the time grid ``t``, plus noise.

    ``tx`` is a callable of time so fractional path delays are exact.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for a, tau in zip(channel.amplitudes, channel.delays):
        out = out + a * np.asarray(tx(t - tau))
    if channel.noise_psd > 0:
        rng = np.random.default_rng(seed)
        out = out + rng.normal(0.0, math.sqrt(channel.noise_psd * sample_rate), t.shape)
    return out


def _template(width, sample_rate):
    half = int(math.ceil(5.0 * width * sample_rate))
    return gaussian_doublet(np.arange(-half, half + 1) / sample_rate, width)


def _leading_edge(envelope, fraction):
    peak = float(envelope.max())
    if not peak > 0:
        raise DetectionError("waveform has no energy")
    thr = fraction * peak
    i = int(np.argmax(envelope > thr))
    if i == 0:
        return 0.0
    lo, hi = envelope[i - 1], envelope[i]
    return (i - 1) + (thr - lo) / (hi - lo)


def _envelope(rx, template):
    mf = signal.correlate(rx, template, mode="same")
    return np.abs(signal.hilbert(mf))


@functools.lru_cache(maxsize=32)
def _edge_offset(width, sample_rate, fraction):
    # ns from the leading-edge crossing to the pulse centre for a clean pulse
    tmpl = _template(width, sample_rate)
    n = 8 * tmpl.size
    centre = n // 2
    ref = gaussian_doublet((np.arange(n) - centre) / sample_rate, width)
    return (centre - _leading_edge(_envelope(ref, tmpl), fraction)) / sample_rate


def estimate_toa(
    rx,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    leading_edge_fraction: float = DEFAULT_LEADING_EDGE,
    pulse_width: float = DEFAULT_PULSE_WIDTH,
    t0: float = 0.0,
) -> float:
    """Arrival time (ns) of the first path by leading-edge detection.

    The waveform is matched-filtered against the pulse, its Hilbert envelope
    is taken, and the first crossing of ``leading_edge_fraction`` times the
    envelope peak is located with linear interpolation. The fixed lag
    between that crossing and the pulse centre is added back, so a clean
    pulse centred at ``tau`` returns ``tau``. ``t0`` is the time of sample 0.
    """
    if not 0.0 < leading_edge_fraction < 1.0:
        raise ArgumentError("leading_edge_fraction must be in (0, 1)")
    rx = np.asarray(rx, dtype=float)
    if rx.size == 0:
        raise ArgumentError("empty waveform")
    if not np.any(rx):
        raise DetectionError("all-zero waveform")
    env = _envelope(rx, _template(pulse_width, sample_rate))
    crossing = _leading_edge(env, leading_edge_fraction) / sample_rate
    return t0 + crossing + _edge_offset(pulse_width, sample_rate, leading_edge_fraction)


def distance_from_toa(tau: float) -> float:
    """Distance in metres for a propagation time in nanoseconds."""
    if tau < 0:
        raise ArgumentError("propagation time must be >= 0")
    return C_M_PER_NS * tau


def toa_from_distance(distance: float) -> float:
    return distance / C_M_PER_NS


def waveform_range(
    true_distance: float,
    channel: Optional[ChannelSpec] = None,
    pulse: PulseSpec = PulseSpec(),
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    leading_edge_fraction: float = DEFAULT_LEADING_EDGE,
    seed: Optional[int] = None,
) -> float:
    """Estimated distance from one simulated pulse exchange.

    ``channel`` delays are relative to the direct-path flight time; the
    default is a single unit-gain path. Only the first pulse of the train is
    used as the timing reference.
    """
    tau = toa_from_distance(true_distance)
    if channel is None:
        channel = ChannelSpec((1.0,), (0.0,))
    absolute = ChannelSpec(
        channel.amplitudes,
        tuple(d + tau for d in channel.delays),
        channel.noise_psd,
        channel.los,
        channel.nlos_excess_delay_mean,
    )
    single = PulseSpec(pulse.energy, pulse.pulse_width, pulse.period, 2)
    span = pulse.period + absolute.delays[-1] + 10.0 * pulse.pulse_width + 20.0
    t = np.arange(int(math.ceil(span * sample_rate))) / sample_rate
    rx = received_signal(
        functools.partial(transmit_signal, single), absolute, t, sample_rate, seed
    )
    toa = estimate_toa(rx, sample_rate, leading_edge_fraction, pulse.pulse_width)
    return distance_from_toa(max(toa - pulse.period, 0.0))


@dataclass(frozen=True)
class ClassProfile:
    """Feature-level generator settings for one class."""

    first_path_power: GgdParams  # dBm
    power_difference: GgdParams  # dB
    preamble_count: int = 1000

    def __post_init__(self):
        if self.preamble_count < 1:
            raise ArgumentError("preamble_count must be >= 1")


def gaussian_profile(mu, sigma):
    return GgdParams(mu, sigma * math.sqrt(2.0), 2.0)


DEFAULT_LOS_PROFILE = ClassProfile(gaussian_profile(-80.0, 1.5), gaussian_profile(4.0, 1.0))
DEFAULT_NLOS_PROFILE = ClassProfile(gaussian_profile(-92.0, 2.5), gaussian_profile(10.0, 2.0))


@dataclass(frozen=True)
class ScenarioSpec:
    """Description of a synthetic labelled experiment.

    LoS ranging error is zero-mean GGD with shape ``los_error_beta`` and its
    scale set so the ``error_quantile`` quantile of ``|error|`` equals
    ``los_error_bound``. NLoS error adds an exponential bias with mean
    ``nlos_bias_mean``. Rows are laid out LoS first, then NLoS; within a
    class the true distance cycles through ``true_distances`` in contiguous
    blocks.
    """

    n_los: int = 500
    n_nlos: int = 50
    seed: int = 0
    true_distances: tuple[float, ...] = (3.0,)
    config: UwbConfig = field(default_factory=UwbConfig)
    los: ClassProfile = DEFAULT_LOS_PROFILE
    nlos: ClassProfile = DEFAULT_NLOS_PROFILE
    los_error_beta: float = 1.5
    los_error_bound: float = 0.09  # m
    error_quantile: float = 0.99
    nlos_bias_mean: float = 0.03  # m

    def __post_init__(self):
        object.__setattr__(self, "true_distances", tuple(float(d) for d in self.true_distances))
        if self.n_los < 0 or self.n_nlos < 0 or self.n_los + self.n_nlos < 1:
            raise ArgumentError("need n_los + n_nlos >= 1 and both non-negative")
        if not self.true_distances or any(d <= 0 for d in self.true_distances):
            raise ArgumentError("true distances must be positive")
        if self.los_error_beta <= 0 or self.los_error_bound <= 0:
            raise ArgumentError("LoS error shape and bound must be > 0")
        if not 0.0 < self.error_quantile < 1.0:
            raise ArgumentError("error_quantile must be in (0, 1)")
        if self.nlos_bias_mean < 0:
            raise ArgumentError("nlos_bias_mean must be >= 0")

    @property
    def los_error(self) -> GgdParams:
        beta = self.los_error_beta
        return GgdParams(
            0.0, alpha_for_abs_quantile(beta, self.error_quantile, self.los_error_bound), beta
        )


def _draw_ggd(rng, p: GgdParams, n):
    g = rng.gamma(1.0 / p.beta, 1.0, size=n)
    sign = rng.integers(0, 2, size=n) * 2 - 1
    return p.mu + sign * p.alpha * g ** (1.0 / p.beta)


def _block_distances(distances: Sequence[float], n):
    if n == 0:
        return np.empty(0)
    block = math.ceil(n / len(distances))
    return np.repeat(np.asarray(distances), block)[:n]


def synthesize_dataset(scenario: ScenarioSpec) -> Dataset:
    """Labelled dataset from the feature-level generator; deterministic per seed."""
    rng = np.random.default_rng(scenario.seed)
    A = scenario.config.power_offset
    err_params = scenario.los_error
    samples = []
    index = 0
    for label, n, profile in (
        (ClassLabel.LOS, scenario.n_los, scenario.los),
        (ClassLabel.NLOS, scenario.n_nlos, scenario.nlos),
    ):
        if n == 0:
            continue
        truth = _block_distances(scenario.true_distances, n)
        err = _draw_ggd(rng, err_params, n)
        if label == ClassLabel.NLOS and scenario.nlos_bias_mean > 0:
            err = err + rng.exponential(scenario.nlos_bias_mean, size=n)
        est = np.maximum(truth + err, 0.0)
        fp = _draw_ggd(rng, profile.first_path_power, n)
        diff = _draw_ggd(rng, profile.power_difference, n)
        N = float(profile.preamble_count)
        fp_energy = N * N * 10.0 ** ((fp + A) / 10.0)
        shares = rng.dirichlet((6.0, 4.0, 3.0), size=n)
        amps = np.sqrt(shares * fp_energy[:, None])
        cir = N * N * 10.0 ** ((fp + diff + A) / 10.0) / CIR_SCALE
        for i in range(n):
            samples.append(
                RangingSample(
                    index=index,
                    estimated_distance=float(est[i]),
                    true_distance=float(truth[i]),
                    fp_amp_1=float(amps[i, 0]),
                    fp_amp_2=float(amps[i, 1]),
                    fp_amp_3=float(amps[i, 2]),
                    cir_power=float(cir[i]),
                    preamble_count=int(profile.preamble_count),
                    label=label,
                )
            )
            index += 1
    return Dataset(scenario.config, tuple(samples))
