"""File formats: dataset CSV, feature CSV, model files, configs, reports, plot data.

All numbers are written with ``repr`` so every finite float round-trips
exactly.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
import os
from typing import Optional, Sequence, Union

import numpy as np

from .classifiers import AnomalyModel, NbModel
from .distributions import GaussianParams, GgdParams, fit_gd, fit_ggd, gd_pdf, ggd_pdf
from .errors import ArgumentError, FormatError, ParseError
from .evaluation import ExperimentConfig
from .features import normalize_selection
from .model import ClassLabel, Dataset, RangingSample, UwbConfig
from .simulator import ClassProfile, ScenarioSpec

DATASET_HEADER = (
    "index",
    "true_distance_m",
    "estimated_distance_m",
    "fp_amp1",
    "fp_amp2",
    "fp_amp3",
    "cir_power",
    "preamble_count",
    "label",
)
FEATURES_MAGIC = "# uwbnlos-features"
MODEL_MAGIC = "uwbnlos-model"
MODEL_VERSION = 1
PLOT_MAGIC = "# uwbnlos-plotdata"
PLOT_VERSION = 1
CONFIG_VERSION = 1
CURVE_POINTS = 512

PathLike = Union[str, os.PathLike]


def fmt(x: float) -> str:
    return repr(float(x))


def _label_text(label) -> str:
    return "" if label is None else str(int(label))


def _parse_label(text, lineno):
    if text == "":
        return None
    if text not in ("0", "1"):
        raise ParseError(f"line {lineno}: label must be 0, 1 or empty, got {text!r}")
    return ClassLabel(int(text))


def _parse_float(text, lineno, name):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {lineno}: {name}: not a number: {text!r}") from None


def _parse_int(text, lineno, name):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"line {lineno}: {name}: not an integer: {text!r}") from None


# -- dataset CSV ------------------------------------------------------------


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DATASET_HEADER)
    for s in dataset.samples:
        w.writerow(
            [
                s.index,
                "" if s.true_distance is None else fmt(s.true_distance),
                fmt(s.estimated_distance),
                fmt(s.fp_amp_1),
                fmt(s.fp_amp_2),
                fmt(s.fp_amp_3),
                fmt(s.cir_power),
                s.preamble_count,
                _label_text(s.label),
            ]
        )
    return buf.getvalue()


def save_dataset(dataset: Dataset, path: PathLike) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(dataset_to_csv(dataset))


def dataset_from_csv(text: str, config: Optional[UwbConfig] = None) -> Dataset:
    rows = csv.reader(io.StringIO(text))
    try:
        header = next(rows)
    except StopIteration:
        raise FormatError("empty dataset file") from None
    if tuple(header) != DATASET_HEADER:
        raise FormatError(f"unknown header: {','.join(header)}")
    samples = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(DATASET_HEADER):
            raise ParseError(
                f"line {lineno}: expected {len(DATASET_HEADER)} fields, got {len(row)}"
            )
        idx, truth, est, a1, a2, a3, cir, n, label = row
        samples.append(
            RangingSample(
                index=_parse_int(idx, lineno, "index"),
                estimated_distance=_parse_float(est, lineno, "estimated_distance_m"),
                true_distance=None if truth == "" else _parse_float(truth, lineno, "true_distance_m"),
                fp_amp_1=_parse_float(a1, lineno, "fp_amp1"),
                fp_amp_2=_parse_float(a2, lineno, "fp_amp2"),
                fp_amp_3=_parse_float(a3, lineno, "fp_amp3"),
                cir_power=_parse_float(cir, lineno, "cir_power"),
                preamble_count=_parse_int(n, lineno, "preamble_count"),
                label=_parse_label(label, lineno),
            )
        )
    return Dataset(config or UwbConfig(), tuple(samples))


def load_dataset(path: PathLike, config: Optional[UwbConfig] = None) -> Dataset:
    """Read the canonical dataset CSV. The radio config is not stored in the file."""
    with open(path, newline="") as fh:
        return dataset_from_csv(fh.read(), config)


# -- feature CSV ------------------------------------------------------------


def save_features(
    path: PathLike,
    indices: Sequence[int],
    X: np.ndarray,
    names: Sequence[str],
    labels: Sequence,
    window: int,
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"{FEATURES_MAGIC} version=1 window={int(window)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", *names, "label"])
        for i, row, lab in zip(indices, X, labels):
            w.writerow([int(i), *(fmt(v) for v in row), _label_text(lab)])


@dataclasses.dataclass(frozen=True)
class FeatureTable:
    indices: np.ndarray
    X: np.ndarray
    names: tuple[str, ...]
    labels: tuple[Optional[ClassLabel], ...]
    window: int


def load_features(path: PathLike) -> FeatureTable:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        parts = first.split()
        if not first.startswith(FEATURES_MAGIC) or len(parts) != 4:
            raise FormatError(f"{path}: not a feature file")
        meta = dict(p.split("=", 1) for p in parts[2:] if "=" in p)
        if meta.get("version") != "1":
            raise FormatError(f"{path}: unsupported feature file version {meta.get('version')}")
        window = _parse_int(meta.get("window", ""), 1, "window")
        rows = csv.reader(fh)
        header = next(rows, None)
        if not header or header[0] != "index" or header[-1] != "label" or len(header) < 3:
            raise FormatError(f"{path}: bad feature header")
        names = normalize_selection(header[1:-1])
        idx, data, labels = [], [], []
        for lineno, row in enumerate(rows, start=3):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            idx.append(_parse_int(row[0], lineno, "index"))
            data.append([_parse_float(v, lineno, n) for v, n in zip(row[1:-1], names)])
            labels.append(_parse_label(row[-1], lineno))
    X = np.array(data, dtype=float).reshape(len(data), len(names))
    return FeatureTable(np.array(idx, dtype=int), X, names, tuple(labels), window)


# -- model files ------------------------------------------------------------


def _kv(params) -> str:
    return " ".join(f"{k}={fmt(v)}" for k, v in dataclasses.asdict(params).items())


def model_to_text(model: Union[AnomalyModel, NbModel]) -> str:
    lines = [MODEL_MAGIC, f"version {MODEL_VERSION}"]
    if isinstance(model, AnomalyModel):
        lines += [
            "kind anomaly",
            f"family {model.family}",
            f"estimator {model.estimator}",
            f"window {model.window}",
            f"features {','.join(model.feature_names)}",
            f"epsilon {'none' if model.epsilon is None else fmt(model.epsilon)}",
        ]
        lines += [f"param {n} {_kv(p)}" for n, p in zip(model.feature_names, model.params)]
    elif isinstance(model, NbModel):
        lines += [
            "kind nb",
            f"estimator {model.estimator}",
            f"window {model.window}",
            f"features {','.join(model.feature_names)}",
            f"prior los {fmt(model.priors[0])}",
            f"prior nlos {fmt(model.priors[1])}",
        ]
        for cname, ps in zip(("los", "nlos"), model.params):
            lines += [f"param {cname} {n} {_kv(p)}" for n, p in zip(model.feature_names, ps)]
    else:
        raise ArgumentError(f"cannot save {type(model).__name__}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_model(model: Union[AnomalyModel, NbModel], path: PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_text(model))


def _parse_params(tokens, cls, lineno):
    fields = [f.name for f in dataclasses.fields(cls)]
    values = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in fields or key in values:
            raise FormatError(f"line {lineno}: bad parameter {tok!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise FormatError(f"line {lineno}: bad number {val!r}") from None
    if set(values) != set(fields):
        raise FormatError(f"line {lineno}: expected parameters {fields}")
    try:
        return cls(**values)
    except ArgumentError as exc:
        raise FormatError(f"line {lineno}: {exc}") from None


def model_from_text(text: str) -> Union[AnomalyModel, NbModel]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MODEL_MAGIC:
        raise FormatError("not a model file")
    if len(lines) < 2 or lines[1].strip() != f"version {MODEL_VERSION}":
        raise FormatError(f"unsupported model version line: {lines[1] if len(lines) > 1 else ''!r}")
    if lines[-1].strip() != "end":
        raise FormatError("model file is truncated (no end marker)")
    header: dict[str, str] = {}
    priors: dict[str, float] = {}
    params: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(lines[2:-1], start=3):
        tokens = line.split()
        if not tokens:
            continue
        key = tokens[0]
        if key == "param":
            params.append((lineno, tokens[1:]))
        elif key == "prior" and len(tokens) == 3 and tokens[1] in ("los", "nlos"):
            try:
                priors[tokens[1]] = float(tokens[2])
            except ValueError:
                raise FormatError(f"line {lineno}: bad prior") from None
        elif key in ("kind", "family", "estimator", "window", "features", "epsilon") and len(tokens) == 2:
            if key in header:
                raise FormatError(f"line {lineno}: duplicate {key}")
            header[key] = tokens[1]
        else:
            raise FormatError(f"line {lineno}: unexpected line {line!r}")
    try:
        names = tuple(header["features"].split(","))
        window = int(header["window"])
        estimator = header["estimator"]
        kind = header["kind"]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"missing or bad header field: {exc}") from None
    try:
        if kind == "anomaly":
            family = header.get("family")
            cls = GaussianParams if family == "gd" else GgdParams
            by_name = {}
            for lineno, toks in params:
                if len(toks) < 1 or toks[0] not in names or toks[0] in by_name:
                    raise FormatError(f"line {lineno}: bad param line")
                by_name[toks[0]] = _parse_params(toks[1:], cls, lineno)
            if set(by_name) != set(names):
                raise FormatError("missing parameters for some features")
            eps_text = header.get("epsilon")
            if eps_text is None:
                raise FormatError("missing epsilon line")
            eps = None if eps_text == "none" else float(eps_text)
            return AnomalyModel(
                family, tuple(by_name[n] for n in names), names, window, estimator, eps
            )
        if kind == "nb":
            by_class: dict[str, dict] = {"los": {}, "nlos": {}}
            for lineno, toks in params:
                if len(toks) < 2 or toks[0] not in by_class or toks[1] not in names:
                    raise FormatError(f"line {lineno}: bad param line")
                by_class[toks[0]][toks[1]] = _parse_params(toks[2:], GaussianParams, lineno)
            if any(set(d) != set(names) for d in by_class.values()):
                raise FormatError("missing parameters for some (class, feature) pairs")
            if set(priors) != {"los", "nlos"}:
                raise FormatError("missing priors")
            return NbModel(
                (priors["los"], priors["nlos"]),
                tuple(tuple(by_class[c][n] for n in names) for c in ("los", "nlos")),
                names,
                window,
                estimator,
            )
    except (ArgumentError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from None
    raise FormatError(f"unknown model kind {kind!r}")


def load_model(path: PathLike) -> Union[AnomalyModel, NbModel]:
    with open(path) as fh:
        return model_from_text(fh.read())


# -- scenario / experiment config --------------------------------------------

_SCENARIO_KEYS = {
    "n_los": int,
    "n_nlos": int,
    "seed": int,
    "los_error_beta": float,
    "los_error_bound": float,
    "error_quantile": float,
    "nlos_bias_mean": float,
}
_UWB_KEYS = {
    "data_rate": float,
    "center_frequency": float,
    "bandwidth": float,
    "channel": int,
    "prf": float,
    "power_offset": float,
}


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _convert(section, key, value, conv):
    try:
        return conv(value)
    except ValueError:
        raise FormatError(f"[{section}] {key}: bad value {value!r}") from None


def _profile_from(section, base: ClassProfile) -> ClassProfile:
    fp = dataclasses.asdict(base.first_path_power)
    pd = dataclasses.asdict(base.power_difference)
    preamble = base.preamble_count
    for key, value in section.items():
        if key == "preamble_count":
            preamble = _convert(section.name, key, value, int)
            continue
        feature, _, field_name = key.partition(".")
        target = {"first_path_power": fp, "power_difference": pd}.get(feature)
        if target is None or field_name not in ("mu", "alpha", "beta", "sigma"):
            raise FormatError(f"[{section.name}] unknown key {key!r}")
        v = _convert(section.name, key, value, float)
        if field_name == "sigma":
            # Gaussian shorthand: beta = 2, alpha = sigma * sqrt(2)
            target["alpha"], target["beta"] = v * math.sqrt(2.0), 2.0
        else:
            target[field_name] = v
    try:
        return ClassProfile(GgdParams(**fp), GgdParams(**pd), preamble)
    except ArgumentError as exc:
        raise FormatError(f"[{section.name}] {exc}") from None


def config_from_text(text: str) -> tuple[ScenarioSpec, ExperimentConfig]:
    """Parse an INI-style scenario/experiment file.

    Sections: ``[uwbnlos]`` (optional ``version = 1``), ``[scenario]``,
    ``[uwb]``, ``[los]``, ``[nlos]``, ``[experiment]``. Missing keys take
    library defaults; unknown sections or keys are rejected.
    """
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise FormatError(f"config parse error: {exc}") from None
    allowed = {"uwbnlos", "scenario", "uwb", "los", "nlos", "experiment"}
    unknown = set(cp.sections()) - allowed
    if unknown:
        raise FormatError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    if cp.has_section("uwbnlos"):
        version = cp["uwbnlos"].get("version", str(CONFIG_VERSION))
        if version != str(CONFIG_VERSION) or set(cp["uwbnlos"]) - {"version"}:
            raise FormatError(f"unsupported config version {version!r}")

    uwb_kwargs = {}
    if cp.has_section("uwb"):
        for key, value in cp["uwb"].items():
            if key not in _UWB_KEYS:
                raise FormatError(f"[uwb] unknown key {key!r}")
            uwb_kwargs[key] = _convert("uwb", key, value, _UWB_KEYS[key])
    base = ScenarioSpec()
    sc_kwargs: dict = {}
    if cp.has_section("scenario"):
        for key, value in cp["scenario"].items():
            if key == "true_distances":
                sc_kwargs[key] = _convert("scenario", key, value, _floats)
            elif key in _SCENARIO_KEYS:
                sc_kwargs[key] = _convert("scenario", key, value, _SCENARIO_KEYS[key])
            else:
                raise FormatError(f"[scenario] unknown key {key!r}")
    try:
        if uwb_kwargs:
            sc_kwargs["config"] = UwbConfig(**uwb_kwargs)
        if cp.has_section("los"):
            sc_kwargs["los"] = _profile_from(cp["los"], base.los)
        if cp.has_section("nlos"):
            sc_kwargs["nlos"] = _profile_from(cp["nlos"], base.nlos)
        scenario = ScenarioSpec(**sc_kwargs)
    except ArgumentError as exc:
        raise FormatError(f"invalid scenario: {exc}") from None

    ex_kwargs: dict = {}
    if cp.has_section("experiment"):
        for key, value in cp["experiment"].items():
            if key == "features":
                ex_kwargs[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key in ("window", "split_seed"):
                ex_kwargs[key] = _convert("experiment", key, value, int)
            elif key == "fractions":
                ex_kwargs[key] = _convert("experiment", key, value, _floats)
            elif key == "estimator":
                ex_kwargs[key] = value.strip()
            else:
                raise FormatError(f"[experiment] unknown key {key!r}")
    try:
        experiment = ExperimentConfig(**ex_kwargs)
    except ArgumentError as exc:
        raise FormatError(f"invalid experiment config: {exc}") from None
    return scenario, experiment


def load_config(path: PathLike) -> tuple[ScenarioSpec, ExperimentConfig]:
    with open(path) as fh:
        return config_from_text(fh.read())


# -- reports ----------------------------------------------------------------


def report_to_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def save_report(report: dict, path: PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(report_to_text(report))


def load_report(path: PathLike) -> dict:
    with open(path) as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not a report: {exc}") from None
    if report.get("format") != "uwbnlos-report" or report.get("version") != 1:
        raise FormatError(f"{path}: unsupported report format/version")
    return report


# -- plot data --------------------------------------------------------------


def plot_data_text(
    samples: Sequence[float], gd: GaussianParams, ggd: GgdParams, bins: int = 30
) -> str:
    """Histogram of ``samples`` plus fitted GD and GGD curves as plain text.

    Two sections. ``[histogram]`` rows are ``bin_center,density`` with the
    density normalized to unit area. ``[curves]`` rows are
    ``x,gd_pdf,ggd_pdf`` on 512 points spanning the data range widened by
    three fitted standard deviations on each side.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 10:
        raise ArgumentError("need at least 10 samples for plot data")
    if bins < 5:
        raise ArgumentError("need at least 5 bins")
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise ArgumentError("degenerate data range")
    density, edges = np.histogram(x, bins=bins, range=(lo, hi), density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    sd = math.sqrt(gd.sigma2)
    grid = np.linspace(lo - 3.0 * sd, hi + 3.0 * sd, CURVE_POINTS)
    lines = [
        f"{PLOT_MAGIC} {PLOT_VERSION}",
        f"# gd {_kv(gd)}",
        f"# ggd {_kv(ggd)}",
        f"# bin_width={fmt(edges[1] - edges[0])} samples={x.size}",
        "[histogram]",
        "bin_center,density",
    ]
    lines += [f"{fmt(c)},{fmt(d)}" for c, d in zip(centers, density)]
    lines += ["[curves]", "x,gd_pdf,ggd_pdf"]
    lines += [
        f"{fmt(g)},{fmt(a)},{fmt(b)}" for g, a, b in zip(grid, gd_pdf(grid, gd), ggd_pdf(grid, ggd))
    ]
    return "\n".join(lines) + "\n"


def emit_plot_data(
    samples: Sequence[float],
    gd: Optional[GaussianParams] = None,
    ggd: Optional[GgdParams] = None,
    bins: int = 30,
    path: Optional[PathLike] = None,
    estimator: str = "standard",
) -> str:
    """Write plot data for ``samples``; missing fits are computed from the samples."""
    if gd is None:
        gd = fit_gd(samples, estimator)
    if ggd is None:
        ggd, _ = fit_ggd(samples, estimator)
    text = plot_data_text(samples, gd, ggd, bins)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def parse_plot_data(text: str) -> dict[str, np.ndarray]:
    """Read plot data back into ``{"histogram": (k, 2), "curves": (512, 3)}`` arrays."""
    lines = text.splitlines()
    if not lines or lines[0] != f"{PLOT_MAGIC} {PLOT_VERSION}":
        raise FormatError("not a plot data file")
    out: dict[str, list] = {}
    current = None
    for line in lines[1:]:
        if line.startswith("#") or not line:
            continue
        if line.startswith("["):
            current = line.strip("[]")
            out[current] = []
            continue
        if current is None:
            raise FormatError("data before first section")
        if line[0].isalpha():
            continue  # column header
        out[current].append([float(v) for v in line.split(",")])
    return {k: np.array(v) for k, v in out.items()}
