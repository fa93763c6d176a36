"""Command-line entry points.

Grammar: attentiv <train|evaluate|crossval|roc|extract|serve|replay> [flags].
Flags are kebab-case. --seed is mandatory where training happens so runs
are reproducible by construction. Any package error maps to a documented
exit code with the error class printed on standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dsp
from .classifiers import ALGORITHMS, predict, train
from .dataset import load_dataset, load_raw_samples
from .errors import AttentivError, ParameterError
from .evaluation import (confusion, correlation_matrix, cross_validate,
                         metrics, roc_curve, stratified_split, subject_split)
from .features import FeatureMatrix, apply_scaler, build_matrix, fit_scaler
from .model_file import load_model, read_header, save_model
from .stream.client import replay as replay_stream
from .stream.server import SessionServer
from .stream.session import SessionEngine
from . import reports

DEFAULT_PORT = int(os.environ.get("ATTENTIV_PORT", "7128"))


def _data_path(path) -> Path:
    """Relative paths fall back to ATTENTIV_DATA_DIR when not found."""
    p = Path(path)
    base = os.environ.get("ATTENTIV_DATA_DIR")
    if base and not p.is_absolute() and not p.exists():
        return Path(base) / p
    return p


def _feature_list(value):
    return [name.strip() for name in value.split(",")] if value else None


def _load_matrix(args):
    schema = _feature_list(getattr(args, "schema", None))
    dataset = load_dataset(_data_path(args.dataset), schema=schema)
    return build_matrix(dataset, _feature_list(args.features),
                        target=args.target), dataset


def cmd_train(args) -> int:
    matrix, _ = _load_matrix(args)
    scaler = fit_scaler(matrix)
    model = train(args.algorithm, apply_scaler(matrix, scaler),
                  seed=args.seed, c=args.c, n_trees=args.trees,
                  bags=args.bags)
    save_model(model, scaler, args.model_out,
               metadata={"seed": args.seed, "rows": matrix.n})
    print(f"trained {args.algorithm} on {matrix.n} rows -> {args.model_out}")
    return 0


def _evaluation_rows(args):
    """Scaled evaluation rows, their labels, the model, and its name."""
    if args.model:
        algorithm, names = read_header(_data_path(args.model))
        model, scaler = load_model(_data_path(args.model))
        schema = _feature_list(getattr(args, "schema", None))
        dataset = load_dataset(_data_path(args.dataset), schema=schema)
        matrix = build_matrix(dataset, list(names), target=args.target)
        scaled = apply_scaler(matrix, scaler)
        return scaled, matrix, model, algorithm, dataset

    if not args.algorithm:
        raise ParameterError("provide --model or --algorithm")
    matrix, dataset = _load_matrix(args)
    if args.by_subject:
        train_idx, test_idx = subject_split(
            dataset.column("subject_id"), args.split, args.seed)
    else:
        train_idx, test_idx = stratified_split(matrix.labels, args.split,
                                               args.seed)
    train_part = matrix.take(train_idx)
    scaler = fit_scaler(train_part)
    model = train(args.algorithm, apply_scaler(train_part, scaler),
                  seed=args.seed, c=args.c, n_trees=args.trees,
                  bags=args.bags)
    test_part = matrix.take(test_idx)
    return (apply_scaler(test_part, scaler), matrix, model,
            args.algorithm, dataset)


def cmd_evaluate(args) -> int:
    scaled, matrix, model, algorithm, _ = _evaluation_rows(args)
    preds = predict(model, scaled)
    cm = confusion(scaled.labels, [p.label for p in preds])
    report = metrics(cm)
    reports.write_metrics(report, cm, algorithm, args.out_dir,
                          figures=args.figures)
    corr, _degenerate = correlation_matrix(matrix)
    reports.write_correlation(corr, matrix.feature_names, args.out_dir,
                              figures=args.figures)
    print(reports.metrics_table(report, algorithm), end="")
    print(f"reports -> {args.out_dir}")
    return 0


def cmd_crossval(args) -> int:
    matrix, _ = _load_matrix(args)
    result = cross_validate(matrix, args.algorithm, k=args.k,
                            seed=args.seed, c=args.c, n_trees=args.trees,
                            bags=args.bags)
    reports.write_crossval(result, args.algorithm, args.k, args.out_dir,
                           figures=args.figures)
    print(f"{args.k}-fold {args.algorithm}: "
          f"mean accuracy {result.mean_accuracy:.4f} "
          f"(std {result.std_accuracy:.4f}) -> {args.out_dir}")
    return 0


def cmd_roc(args) -> int:
    scaled, _, model, algorithm, _ = _evaluation_rows(args)
    scores = model.decision_scores(scaled.rows)
    roc = roc_curve(scaled.labels, scores)
    reports.write_roc(roc, algorithm, args.out_dir, figures=args.figures)
    print(f"{algorithm} auc {roc.auc:.4f} -> {args.out_dir}")
    return 0


def cmd_extract(args) -> int:
    samples = load_raw_samples(_data_path(args.input))
    by_channel = {}
    for tick, channel, value in samples:
        by_channel.setdefault(channel, []).append(
            dsp.RawSample(tick, value, channel))
    rows = []
    for channel in sorted(by_channel):
        rows.extend(dsp.extract_feature_rows(
            by_channel[channel], cutoff_hz=args.cutoff, w=args.window,
            hop=args.hop))
    reports.write_feature_rows(rows, args.output, figures=args.figures)
    print(f"{len(rows)} windows -> {args.output}")
    return 0


def cmd_serve(args) -> int:
    engine = SessionEngine(capacity=args.capacity)
    for entry in args.model or []:
        name, _, path = entry.partition("=")
        if not path:
            name, path = Path(entry).stem, entry
        model, scaler = load_model(_data_path(path))
        engine.register_model(name, model, scaler)
    if not engine.model_ids():
        raise ParameterError("serve needs at least one --model NAME=PATH")
    server = SessionServer((args.host, args.port), engine)
    print(f"serving {engine.model_ids()} on "
          f"{args.host}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_replay(args) -> int:
    samples = load_raw_samples(_data_path(args.input))
    observers = [int(r) for r in args.observer_ratings.split(",")] \
        if args.observer_ratings else []
    summary, predictions = replay_stream(
        samples, args.host, args.port, args.model_id,
        rate=args.rate, batch_size=args.batch, trim=args.trim,
        self_rating=args.self_rating, observer_ratings=observers,
        acclimation_s=args.acclimation)
    if args.predictions_out:
        lines = ["window_start,label,score,scoring,"
                 + ",".join(dsp.BAND_FEATURES)]
        for p in predictions:
            bands = ",".join(repr(p["bands"][n]) for n in dsp.BAND_FEATURES)
            lines.append(f"{p['window_start']},{p['label']},"
                         f"{p['score']!r},{p['scoring']},{bands}")
        Path(args.predictions_out).write_text("\n".join(lines) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _add_dataset_flags(sub, with_target=True):
    sub.add_argument("--dataset", required=True, help="labeled CSV file")
    sub.add_argument("--features", default=None,
                     help="comma-separated column selection")
    sub.add_argument("--schema", default=None,
                     help="comma-separated schema override for the CSV")
    if with_target:
        sub.add_argument("--target", choices=("predefined", "user"),
                         default="predefined",
                         help="which label column trains/evaluates")


def _add_hyper_flags(sub):
    sub.add_argument("--c", type=float, default=1.0,
                     help="soft-margin penalty")
    sub.add_argument("--trees", type=int, default=100,
                     help="forest size")
    sub.add_argument("--bags", type=int, default=3,
                     help="bootstrap members per ensemble algorithm")


def _add_report_flags(sub):
    sub.add_argument("--out-dir", default="reports",
                     help="directory for report files")
    sub.add_argument("--no-figures", dest="figures", action="store_false",
                     help="skip rendering figures next to the reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attentiv",
        description="EEG attention classification toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("train", help="fit a model and write it to disk")
    _add_dataset_flags(p)
    _add_hyper_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_train)

    p = commands.add_parser(
        "evaluate", help="score a model or a fresh split-trained one")
    _add_dataset_flags(p)
    _add_hyper_flags(p)
    _add_report_flags(p)
    p.add_argument("--model", default=None, help="saved model file")
    p.add_argument("--algorithm", choices=ALGORITHMS, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.2,
                   help="held-out fraction when training fresh")
    p.add_argument("--by-subject", action="store_true",
                   help="hold out whole subjects instead of rows")
    p.set_defaults(func=cmd_evaluate)

    p = commands.add_parser("crossval", help="stratified k-fold accuracy")
    _add_dataset_flags(p)
    _add_hyper_flags(p)
    _add_report_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_crossval)

    p = commands.add_parser("roc", help="threshold sweep and AUC export")
    _add_dataset_flags(p)
    _add_hyper_flags(p)
    _add_report_flags(p)
    p.add_argument("--model", default=None)
    p.add_argument("--algorithm", choices=ALGORITHMS, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.2)
    p.add_argument("--by-subject", action="store_true")
    p.set_defaults(func=cmd_roc)

    p = commands.add_parser(
        "extract", help="raw samples to band-energy features")
    p.add_argument("--input", required=True,
                   help="CSV with timestamp,channel,value header")
    p.add_argument("--output", required=True)
    p.add_argument("--cutoff", type=float, default=dsp.DEFAULT_CUTOFF_HZ)
    p.add_argument("--window", type=int, default=dsp.WINDOW_LEN)
    p.add_argument("--hop", type=int, default=None)
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=cmd_extract)

    p = commands.add_parser("serve", help="run the live session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--model", action="append",
                   help="NAME=PATH of a model to register (repeatable)")
    p.add_argument("--capacity", type=int, default=1280,
                   help="per-session sample buffer capacity")
    p.set_defaults(func=cmd_serve)

    p = commands.add_parser(
        "replay", help="stream a recorded file into a running service")
    p.add_argument("--input", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--model-id", default="default")
    p.add_argument("--rate", type=float, default=1.0,
                   help="pacing multiplier over real time (0 = no pacing)")
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--trim", action="store_true",
                   help="exclude the first and last 30 s of the recording")
    p.add_argument("--self-rating", type=int, default=5)
    p.add_argument("--observer-ratings", default="",
                   help="comma-separated 1..10 values")
    p.add_argument("--acclimation", type=int, default=0)
    p.add_argument("--predictions-out", default=None)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AttentivError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
