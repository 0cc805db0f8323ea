"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data/format error,
3 numeric/degenerate-fit error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from . import io as uio
from .classifiers import (
    AnomalyModel,
    anomaly_score,
    classify_anomaly,
    fit_anomaly,
    fit_nb,
    nb_classify,
    nb_posterior,
    select_epsilon,
)
from .distributions import ESTIMATORS
from .errors import ArgumentError, ModelStateError, UwbError
from .evaluation import ExperimentConfig, run_experiment, summary_rows
from .features import DEFAULT_WINDOW, FEATURE_NAMES, extract_features
from .model import POWER_OFFSET_PRF16, ClassLabel, Dataset, UwbConfig, validate_dataset
from .simulator import ScenarioSpec, synthesize_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _radio_config(args) -> UwbConfig:
    offset = args.power_offset
    if offset is None:
        if args.prf != 16.0:
            raise ArgumentError("--power-offset is required when --prf is not 16")
        offset = POWER_OFFSET_PRF16
    return UwbConfig(prf=args.prf, power_offset=offset)


def _add_radio(p):
    p.add_argument("--prf", type=float, default=16.0, help="pulse repetition frequency, MHz (default 16)")
    p.add_argument(
        "--power-offset",
        type=float,
        default=None,
        help="power offset A in dBm (default 113.77, required when --prf is not 16)",
    )


def _selection(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _load_checked(path, config) -> Dataset:
    ds = uio.load_dataset(path, config)
    bad = validate_dataset(ds)
    if bad:
        v = bad[0]
        raise ArgumentError(f"{path}: sample {v.index} violates {v.rule} ({len(bad)} violations)")
    return ds


def cmd_simulate(args) -> int:
    scenario = uio.load_config(args.config)[0] if args.config else ScenarioSpec()
    overrides = {
        k: v
        for k, v in (("n_los", args.n_los), ("n_nlos", args.n_nlos), ("seed", args.seed))
        if v is not None
    }
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    ds = synthesize_dataset(scenario)
    uio.save_dataset(ds, args.output)
    print(f"wrote {len(ds)} rows to {args.output}")
    return EXIT_OK


def cmd_features(args) -> int:
    ds = _load_checked(args.input, _radio_config(args))
    names = _selection(args.select)
    X = extract_features(ds, names, args.window)
    uio.save_features(
        args.output, [s.index for s in ds.samples], X, names, [s.label for s in ds.samples], args.window
    )
    print(f"wrote {X.shape[0]} x {X.shape[1]} features to {args.output}")
    return EXIT_OK


def _training_rows(table: uio.FeatureTable) -> np.ndarray:
    labels = table.labels
    if any(lab is not None for lab in labels):
        rows = np.array([lab == ClassLabel.LOS for lab in labels])
        if not rows.any():
            raise ArgumentError("no LoS rows to fit on")
        return table.X[rows]
    return table.X


def cmd_fit(args) -> int:
    table = uio.load_features(args.input)
    model = fit_anomaly(_training_rows(table), args.family, table.names, table.window, args.estimator)
    if args.epsilon is not None:
        model = model.with_epsilon(args.epsilon)
    elif args.validation:
        val = uio.load_features(args.validation)
        if val.names != table.names:
            raise ArgumentError("validation features differ from training features")
        eps, f1 = select_epsilon(anomaly_score(model, val.X), val.labels)
        model = model.with_epsilon(eps)
        print(f"selected epsilon={eps!r} (validation F1={f1:.4f})")
    uio.save_model(model, args.output)
    print(f"wrote {args.family} model to {args.output}")
    return EXIT_OK


def cmd_train_nb(args) -> int:
    table = uio.load_features(args.input)
    model = fit_nb(table.X, table.labels, table.names, table.window, args.estimator)
    uio.save_model(model, args.output)
    print(f"wrote naive Bayes model to {args.output}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = uio.load_model(args.model)
    ds = _load_checked(args.input, _radio_config(args))
    X = extract_features(ds, model.feature_names, model.window)
    if isinstance(model, AnomalyModel):
        if args.epsilon is not None:
            model = model.with_epsilon(args.epsilon)
        if model.epsilon is None:
            raise ModelStateError("model has no epsilon; pass --epsilon")
        scores = anomaly_score(model, X)
        pred = classify_anomaly(model, X)
    else:
        scores = nb_posterior(model, X)[:, 1]
        pred = nb_classify(model, X)
    labeled = Dataset(
        ds.config,
        tuple(dataclasses.replace(s, label=ClassLabel(int(p))) for s, p in zip(ds.samples, pred)),
    )
    uio.save_dataset(labeled, args.output)
    if args.scores:
        column = "score" if isinstance(model, AnomalyModel) else "posterior_nlos"
        with open(args.scores, "w") as fh:
            fh.write(f"index,{column},predicted_label\n")
            for s, sc, p in zip(ds.samples, scores, pred):
                fh.write(f"{s.index},{uio.fmt(sc)},{int(p)}\n")
    print(f"classified {len(ds)} rows: {int(np.sum(pred))} NLoS")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.config:
        scenario, experiment = uio.load_config(args.config)
    else:
        scenario, experiment = ScenarioSpec(), ExperimentConfig()
    dataset = _load_checked(args.dataset, scenario.config) if args.dataset else None
    report = run_experiment(scenario, experiment, dataset)
    uio.save_report(report, args.output)
    print(f"{'model':<12} {'accuracy':>9} {'precision':>9} {'recall':>9} {'f1':>9}")
    for name, acc, prec, rec, f1 in summary_rows(report):
        print(f"{name:<12} {acc:>9.4f} {prec:>9.4f} {rec:>9.4f} {f1:>9.4f}")
    print(f"report written to {args.output}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    ds = _load_checked(args.input, _radio_config(args))
    X = extract_features(ds, ["distance_error"])
    labels = ds.labels()
    if args.klass == "los":
        X = X[labels == 0]
    elif args.klass == "nlos":
        X = X[labels == 1]
    uio.emit_plot_data(X[:, 0], bins=args.bins, path=args.output, estimator=args.estimator)
    print(f"wrote plot data for {X.shape[0]} errors to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="uwbnlos",
        description="NLoS detection for UWB ranging with GD/GGD anomaly models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({_kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    p = sub.add_parser("simulate", help="synthesize a labelled dataset CSV")
    p.add_argument("-c", "--config", help="scenario config file (INI)")
    p.add_argument("--n-los", type=int)
    p.add_argument("--n-nlos", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("features", help="dataset CSV -> feature CSV")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument(
        "--select",
        default="first_path_power,power_difference,range_variance",
        help=f"comma-separated subset of: {', '.join(FEATURE_NAMES)}. "
        "distance_error is estimated - true (positive = overestimate)",
    )
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="range-variance window (default 20)")
    _add_radio(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("fit", help="feature CSV -> anomaly model (fits on LoS rows)")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--family", choices=("gd", "ggd"), default="ggd")
    p.add_argument("--estimator", choices=ESTIMATORS, default="standard")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--epsilon", type=float, help="explicit log-likelihood threshold")
    g.add_argument("--validation", help="labelled feature CSV used to select epsilon by F1")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("train-nb", help="labelled feature CSV -> naive Bayes model")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--estimator", choices=ESTIMATORS, default="standard")
    p.set_defaults(func=cmd_train_nb)

    p = sub.add_parser("classify", help="model + dataset CSV -> dataset CSV with predicted labels")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--epsilon", type=float, help="override the model threshold")
    p.add_argument("--scores", help="also write per-row scores to this CSV")
    _add_radio(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="run the NB / GD / GGD comparison and write a report")
    p.add_argument("-c", "--config", help="scenario/experiment config file (INI)")
    p.add_argument("--dataset", help="use this labelled dataset CSV instead of synthesizing")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plotdata", help="dataset CSV -> error histogram with fitted GD/GGD curves")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--class", dest="klass", choices=("los", "nlos", "all"), default="all")
    p.add_argument("--estimator", choices=ESTIMATORS, default="standard")
    _add_radio(p)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("help", help="show help for a command")
    p.add_argument("topic", nargs="?")
    p.set_defaults(func=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.command == "help":
        if args.topic:
            sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
            if args.topic not in sub.choices:
                print(f"unknown command {args.topic!r}", file=sys.stderr)
                return EXIT_USAGE
            sub.choices[args.topic].print_help()
        else:
            parser.print_help()
        return EXIT_OK
    try:
        return args.func(args)
    except UwbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
