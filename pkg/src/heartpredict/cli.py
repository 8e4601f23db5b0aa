"""Command-line interface.

Subcommands: preprocess, select-features, train, evaluate, predict, stream,
report, bench-opt. Exit codes: 0 on success, 1 on usage errors, 2 on data
or runtime errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import benchmarks, dataio, pipeline
from .config import ExperimentConfig, apply_overrides, load_config
from .cuttlefish import CuttlefishConfig, run_cuttlefish
from .dataio import DataError
from .elephant_herd import HerdConfig, run_elephant_herd
from .metrics import (
    MetricsReport,
    compute_metrics,
    confusion,
    metrics_lines,
    report_table,
)
from .pipeline import PipelineError, TrainedModel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heartpredict",
        description="Heart-disease prediction: preprocessing, feature "
        "selection, training, evaluation and stream scoring.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def config_options(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", required=True, help="TOML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override the seed")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override any config key (repeatable)",
        )

    sp = sub.add_parser("preprocess", help="impute, deduplicate and report")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--report", default=None, help="also write the report here")
    sp.add_argument("--impute-k", type=int, default=5)

    sp = sub.add_parser("select-features", help="run wrapper feature selection")
    config_options(sp)

    sp = sub.add_parser("train", help="run the full training pipeline")
    config_options(sp)

    sp = sub.add_parser("evaluate", help="cross-validated evaluation of a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", default=None, help="CSV path (defaults to config)")
    sp.add_argument("--config", default=None)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--outdir", default=".")

    sp = sub.add_parser("predict", help="batch-score a CSV file")
    sp.add_argument("--model", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", default="-", help="alert JSONL path, - for stdout")

    sp = sub.add_parser("stream", help="score newline-delimited JSON records")
    sp.add_argument("--model", required=True)

    sp = sub.add_parser("report", help="render key=value metric lines as a table")
    sp.add_argument("--metrics", required=True, help="key=value lines file")
    sp.add_argument("--format", choices=("table", "kv"), default="table")

    sp = sub.add_parser("bench-opt", help="run an optimizer on a benchmark")
    sp.add_argument("--optimizer", choices=("herd", "cuttlefish"), default="herd")
    sp.add_argument("--function", choices=sorted(benchmarks.CONTINUOUS), default="sphere")
    sp.add_argument("--dim", type=int, default=10)
    sp.add_argument("--generations", type=int, default=100)
    sp.add_argument("--population", type=int, default=20)
    sp.add_argument("--clans", type=int, default=3)
    sp.add_argument("--clan-size", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--history", default=None, help="write (generation, best) here")
    return parser


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config)
    return apply_overrides(cfg, args.set, args.seed)


def _write_history(path: str, values: list[float]) -> None:
    with open(path, "w") as fh:
        for i, v in enumerate(values):
            fh.write(f"{i}\t{v!r}\n")


def _cmd_preprocess(args) -> int:
    ds = dataio.parse_csv(args.input)
    clean, report = pipeline.preprocess(ds, args.impute_k)
    dataio.write_csv(clean, args.output)
    for line in report.lines():
        print(line)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write("\n".join(report.lines()) + "\n")
    return 0


def _cmd_select_features(args) -> int:
    cfg = _experiment(args)
    ds = dataio.parse_csv(cfg.dataset)
    clean, _ = pipeline.preprocess(ds, cfg.impute_k)
    mask, history = pipeline.select_features(clean, cfg)
    names = [a.name for a in clean.predictors]
    print("selected=" + ",".join(names[i] for i in mask.indices))
    print(f"selected_count={mask.count}")
    print(f"best_fitness={history[-1]!r}")
    os.makedirs(cfg.outdir, exist_ok=True)
    _write_history(os.path.join(cfg.outdir, "selection_history.txt"), history)
    return 0


def _cmd_train(args) -> int:
    cfg = _experiment(args)
    model = pipeline.train_pipeline(cfg)
    print(f"model={os.path.join(cfg.outdir, 'model.json')}")
    print("selected=" + ",".join(model.mask_names))
    print(f"config_hash={model.metadata['config_hash']}")
    return 0


def _cmd_evaluate(args) -> int:
    model = TrainedModel.load(args.model)
    data_path = args.data
    if data_path is None:
        if args.config is None:
            raise DataError("evaluate needs --data or --config")
        data_path = load_config(args.config).dataset
    ds = dataio.parse_csv(data_path)
    impute_k = int(model.metadata.get("train_params", {}).get("impute_k", 5))
    clean, _ = pipeline.preprocess(ds, impute_k)
    result = pipeline.evaluate(model, clean, args.folds)
    table = report_table(result.table_rows())
    print(table, end="")
    kv: list[str] = []
    for label, rep in result.table_rows():
        kv.extend(metrics_lines(label, rep))
    os.makedirs(args.outdir, exist_ok=True)
    with open(os.path.join(args.outdir, "evaluation_report.txt"), "w") as fh:
        fh.write(table)
    with open(os.path.join(args.outdir, "evaluation_metrics.txt"), "w") as fh:
        fh.write("\n".join(kv) + "\n")
    return 0


def _cmd_predict(args) -> int:
    model = TrainedModel.load(args.model)
    ds = dataio.parse_csv(args.input)
    labels, scores = pipeline.batch_predict(model, ds)
    sink = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        for i, (label, score) in enumerate(zip(labels, scores), start=1):
            event = {
                "id": f"record-{i}",
                "label": label,
                "score": score,
                "severity": "ABNORMAL" if label == 1 else "NORMAL",
            }
            sink.write(json.dumps(event) + "\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    truths = [int(v) for v in dataio.label_vector(ds)]
    rep = compute_metrics(confusion(labels, truths))
    print(report_table([("predict", rep)]), end="", file=sys.stderr)
    return 0


def _cmd_stream(args) -> int:
    model = TrainedModel.load(args.model)
    summary = pipeline.predict_stream(model, sys.stdin, sys.stdout)
    for line in summary.lines():
        print(line, file=sys.stderr)
    return 0


def _parse_kv_lines(path: str) -> list[tuple[str, MetricsReport]]:
    rows: dict[str, dict[str, float | None]] = {}
    order: list[str] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or "=" not in line or "." not in line.split("=", 1)[0]:
                continue
            dotted, value = line.split("=", 1)
            label, metric = dotted.rsplit(".", 1)
            if label not in rows:
                rows[label] = {}
                order.append(label)
            rows[label][metric] = None if value == "undefined" else float(value)
    field_names = list(MetricsReport.__dataclass_fields__)
    out = []
    for label in order:
        values = {name: rows[label].get(name) for name in field_names}
        out.append((label, MetricsReport(**values)))
    return out


def _cmd_report(args) -> int:
    rows = _parse_kv_lines(args.metrics)
    if not rows:
        raise DataError(f"no metric lines found in {args.metrics}")
    if args.format == "table":
        print(report_table(rows), end="")
    else:
        for label, rep in rows:
            for line in metrics_lines(label, rep):
                print(line)
    return 0


def _cmd_bench_opt(args) -> int:
    if args.optimizer == "herd":
        objective = benchmarks.CONTINUOUS[args.function]
        cfg = HerdConfig(
            clans=args.clans,
            clan_size=args.clan_size,
            max_generations=args.generations,
            seed=args.seed,
        )
        best, history = run_elephant_herd(objective, args.dim, cfg)
        print(f"function={args.function}")
        print(f"best_fitness={history[-1]!r}")
        print("best_position=" + ",".join(repr(float(v)) for v in best))
    else:
        planted = tuple(range(0, args.dim, max(1, args.dim // 3)))[:3] or (0,)
        objective = benchmarks.planted_subset_objective(planted, args.dim)
        cfg = CuttlefishConfig(
            population=args.population,
            generations=args.generations,
            seed=args.seed,
        )
        mask, history = run_cuttlefish(objective, args.dim, cfg)
        print(f"planted={','.join(str(i) for i in planted)}")
        print(f"selected={','.join(str(i) for i in mask.indices)}")
        print(f"best_fitness={history[-1]!r}")
    if args.history:
        _write_history(args.history, history)
    return 0


_COMMANDS = {
    "preprocess": _cmd_preprocess,
    "select-features": _cmd_select_features,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "stream": _cmd_stream,
    "report": _cmd_report,
    "bench-opt": _cmd_bench_opt,
}


def cli(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (DataError, PipelineError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli())
