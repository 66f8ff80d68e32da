"""Command-line entry point: ``roughness <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import FEATURES, PrintSample, Provenance
from .errors import (EXIT_CODES, EmptyDatasetError, IngestIOError, ParameterError,
                     RoughnessError, SchemaError)
from .evaluation import (DEFAULT_K, DEFAULT_SEED, SignificanceRanking, cross_validate,
                         error_histogram, holdout_evaluate, rank_by_correlation, rank_by_wrapper)
from .ingest import bundled_experimental_path, load_csv
from .metrics import MetricSet
from .models import load_model, make_config, make_model, resolve_kind, save_model

DATA_DIR_ENV = "ROUGHNESS_DATA_DIR"
LITERATURE_FILE = "literature.csv"
MODEL_ORDER = ("zero_r", "linear", "smo_reg", "decision_stump", "random_forest")
MODEL_LABELS = {"zero_r": "ZeroR", "linear": "LR", "smo_reg": "SMOreg",
                "decision_stump": "DS", "random_forest": "RF"}
GRID_LIMIT = 2_000_000

# flag name -> (model kind, config field)
HYPER_FLAGS = {
    "n_trees": ("random_forest", "n_trees"),
    "feature_subset_size": ("random_forest", "feature_subset_size"),
    "min_leaf": ("random_forest", "min_leaf"),
    "n_jobs": ("random_forest", "n_jobs"),
    "C": ("smo_reg", "C"),
    "epsilon": ("smo_reg", "epsilon"),
    "tolerance": ("smo_reg", "tolerance"),
    "max_iter": ("smo_reg", "max_iter"),
    "attribute_selection": ("linear", "attribute_selection"),
}


def _data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def default_train_path() -> Path:
    return _data_dir() / LITERATURE_FILE


def _model_params(args: argparse.Namespace, kind: str) -> dict:
    params = {}
    for flag, (owner, name) in HYPER_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None and owner == kind:
            params[name] = value
    return params


def _config(args, kind: str):
    params = _model_params(args, kind)
    if kind == "random_forest":
        params["seed"] = args.seed
    return make_config(kind, params)


# ---------------------------------------------------------------- formatting

def metrics_table(rows: Sequence[tuple[str, MetricSet]], fmt: str) -> str:
    if fmt == "markdown":
        out = ["| Model | Correlation | RAE (%) | MAPE (%) |", "|---|---:|---:|---:|"]
        out += [f"| {name} | {m.correlation:.2f} | {m.rae_pct:.2f} | {m.mape_pct:.2f} |"
                for name, m in rows]
        return "\n".join(out) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "correlation", "rae_pct", "mape_pct", "n"])
    for name, m in rows:
        w.writerow([name, repr(m.correlation), repr(m.rae_pct), repr(m.mape_pct), m.n])
    return buf.getvalue()


def ranking_table(ranking: SignificanceRanking, fmt: str) -> str:
    if fmt == "markdown":
        out = [f"| Feature | Score ({ranking.method}) |", "|---|---:|"]
        out += [f"| {name} | {score:.2f} |" for name, score in ranking.entries]
        return "\n".join(out) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "feature", "score", "method"])
    for i, (name, score) in enumerate(ranking.entries, 1):
        w.writerow([i, name, repr(float(score)), ranking.method])
    return buf.getvalue()


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "actual", "forecast", "abs_error"])
    for r in records:
        w.writerow([r.sample_index, repr(r.actual), repr(r.forecast), repr(r.abs_error)])
    return buf.getvalue()


def _ext(fmt: str) -> str:
    return "md" if fmt == "markdown" else "csv"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IngestIOError(f"cannot write {path}: {exc}") from exc


def _emit_eval(args, kind: str, prefix: str, metrics: MetricSet, records) -> None:
    table = metrics_table([(MODEL_LABELS[kind], metrics)], args.format)
    sys.stdout.write(table)
    if args.out:
        out = Path(args.out)
        _write(out / f"{prefix}_metrics.{_ext(args.format)}", table)
        _write(out / f"{prefix}_records.csv", records_csv(records))
        _write(out / f"{prefix}_histogram.txt",
               error_histogram(records, args.bin_width).to_text())


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    status = 0
    for path in args.paths:
        _, report = _load_report(path, args.provenance)
        print(f"{path}: {report.accepted_rows} accepted, {len(report.rejected_rows)} rejected")
        for rej in report.rejected_rows:
            print(f"  {rej}")
        if not report.ok:
            status = 1
    return status


def _load_report(path, provenance):
    try:
        return load_csv(path, provenance)
    except EmptyDatasetError as exc:
        report = getattr(exc, "report", None)
        if report is None:
            raise
        return None, report


def cmd_fit(args) -> int:
    kind = resolve_kind(args.model)
    train, _ = load_csv(args.train or default_train_path(), Provenance.LITERATURE)
    model = make_model(kind, _config(args, kind), args.seed).fit_dataset(train)
    save_model(model, args.output)
    print(f"saved {kind} model trained on {len(train)} samples to {args.output}")
    return 0


def cmd_cv(args) -> int:
    kind = resolve_kind(args.model)
    train, _ = load_csv(args.train or default_train_path(), Provenance.LITERATURE)
    metrics, records = cross_validate(train, kind, _config(args, kind), args.k, args.seed)
    _emit_eval(args, kind, f"cv_{kind}", metrics, records)
    return 0


def cmd_holdout(args) -> int:
    kind = resolve_kind(args.model)
    train, _ = load_csv(args.train or default_train_path(), Provenance.LITERATURE)
    test, _ = load_csv(args.test or bundled_experimental_path(), Provenance.EXPERIMENTAL)
    metrics, records = holdout_evaluate(train, test, kind, _config(args, kind), args.seed)
    _emit_eval(args, kind, f"holdout_{kind}", metrics, records)
    return 0


def cmd_rank(args) -> int:
    train, _ = load_csv(args.train or default_train_path(), Provenance.LITERATURE)
    if args.method == "pearson":
        ranking = rank_by_correlation(train)
    else:
        kind = resolve_kind(args.model)
        ranking = rank_by_wrapper(train, kind, _config(args, kind), args.seed, args.k)
    table = ranking_table(ranking, args.format)
    sys.stdout.write(table)
    if args.out:
        _write(Path(args.out) / f"rank_{args.method}.{_ext(args.format)}", table)
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model_file)
    ds, report = load_csv(args.input, Provenance.EXPERIMENTAL, require_ra=False)
    if not report.ok:
        for rej in report.rejected_rows:
            print(f"{args.input}: {rej}", file=sys.stderr)
        return SchemaError.exit_code
    preds = model.predict(ds.features())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", *FEATURES, "ra_pred_um"])
    for i, (x, p) in enumerate(zip(ds.features(), preds)):
        w.writerow([i, *(repr(float(v)) for v in x), repr(float(p))])
    if args.output:
        _write(Path(args.output), buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def grid_values(spec: dict) -> list[float]:
    """Values for one feature from {"value"}, {"values"} or {"min","max","step"}."""
    if "value" in spec:
        return [float(spec["value"])]
    if "values" in spec:
        values = sorted(float(v) for v in spec["values"])
        if not values:
            raise ParameterError("empty value list in grid")
        return values
    try:
        lo, hi, step = float(spec["min"]), float(spec["max"]), float(spec["step"])
    except KeyError as exc:
        raise ParameterError(f"grid entry needs min, max and step: missing {exc}") from None
    if hi < lo:
        raise ParameterError(f"grid max {hi} below min {lo}")
    if hi == lo:
        return [lo]
    if not step > 0:
        raise ParameterError(f"grid step must be > 0, got {step}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def optimize_grid(model, grid: dict) -> tuple[dict[str, float], float, int]:
    """Exhaustive search for the lowest predicted Ra.

    Points are visited in lexicographic order (features in schema order,
    values ascending) and the first minimum wins.
    """
    missing = [f for f in FEATURES if f not in grid]
    unknown = [k for k in grid if k not in FEATURES]
    if unknown:
        raise ParameterError(f"unknown grid feature(s): {', '.join(unknown)}")
    if missing:
        raise ParameterError(f"grid must fix every feature; missing {', '.join(missing)}")
    axes = [grid_values(grid[f]) for f in FEATURES]
    size = int(np.prod([len(a) for a in axes]))
    if size == 0:
        raise ParameterError("empty grid")
    if size > GRID_LIMIT:
        raise ParameterError(f"grid has {size} points, limit is {GRID_LIMIT}")
    if any(v != int(v) for v in axes[-1]):
        raise ParameterError("grid shape values must be integer codes")
    try:
        PrintSample(*(min(a) for a in axes))
        PrintSample(*(max(a) for a in axes))
    except RoughnessError as exc:
        raise ParameterError(f"grid leaves ingestion bounds: {exc}") from None
    points = np.array(list(itertools.product(*axes)), dtype=np.float64)
    preds = model.predict(points)
    best = int(np.argmin(preds))
    return dict(zip(FEATURES, points[best].tolist())), float(preds[best]), size


def cmd_optimize(args) -> int:
    model = load_model(args.model_file)
    try:
        grid = json.loads(Path(args.grid).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IngestIOError(f"cannot read grid file {args.grid}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"grid file is not valid JSON: {exc}") from exc
    params, ra, size = optimize_grid(model, grid)
    print(json.dumps({"parameters": params, "predicted_ra_um": ra, "grid_points": size},
                     indent=2))
    return 0


def cmd_reproduce(args) -> int:
    """Correlation ranking, wrapper ranking, CV and holdout tables in one report."""
    train, _ = load_csv(args.train or default_train_path(), Provenance.LITERATURE)
    test, _ = load_csv(args.test or bundled_experimental_path(), Provenance.EXPERIMENTAL)
    out = Path(args.out or "reproduction")
    fmt = args.format
    sections = []

    pearson = rank_by_correlation(train)
    sections.append(("Feature correlation with Ra", ranking_table(pearson, fmt)))
    rf_cfg = _config(args, "random_forest")
    wrapper = rank_by_wrapper(train, "random_forest", rf_cfg, args.seed, args.k)
    sections.append(("Wrapper significance (RF)", ranking_table(wrapper, fmt)))

    cv_rows, ho_rows = [], []
    for kind in MODEL_ORDER:
        cfg = _config(args, kind)
        m_cv, r_cv = cross_validate(train, kind, cfg, args.k, args.seed)
        m_ho, r_ho = holdout_evaluate(train, test, kind, cfg, args.seed)
        cv_rows.append((MODEL_LABELS[kind], m_cv))
        ho_rows.append((MODEL_LABELS[kind], m_ho))
        _write(out / f"cv_{kind}_records.csv", records_csv(r_cv))
        _write(out / f"holdout_{kind}_records.csv", records_csv(r_ho))
        if kind == "random_forest":
            _write(out / "cv_random_forest_histogram.txt",
                   error_histogram(r_cv, args.bin_width).to_text())
            _write(out / "holdout_random_forest_histogram.txt",
                   error_histogram(r_ho, args.bin_width).to_text())
    sections.append((f"{args.k}-fold cross-validation on the training set",
                     metrics_table(cv_rows, fmt)))
    sections.append(("Train on literature, test on experimental",
                     metrics_table(ho_rows, fmt)))

    if fmt == "markdown":
        report = "".join(f"## {title}\n\n{body}\n" for title, body in sections)
    else:
        report = "".join(f"# {title}\n{body}\n" for title, body in sections)
    _write(out / f"report.{_ext(fmt)}", report)
    sys.stdout.write(report)
    return 0


# ---------------------------------------------------------------- parser

def _exit_code_help() -> str:
    lines = ["exit codes:", "  0  success"]
    lines += [f"  {code}  {what}" for what, code in EXIT_CODES.items()]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roughness",
        description="Predict surface roughness (Ra) of material-extrusion prints.",
        epilog=_exit_code_help() + f"\n\nDefault training file: ${DATA_DIR_ENV}/{LITERATURE_FILE}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--config", help="JSON file of default flag values (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("csv", "markdown"), default="csv")
    common.add_argument("--out", help="output directory for report files")

    model_opts = argparse.ArgumentParser(add_help=False)
    model_opts.add_argument("--model", default="rf",
                            help="zeror | lr | smoreg | stump | rf (default rf)")
    model_opts.add_argument("--n-trees", dest="n_trees", type=int)
    model_opts.add_argument("--feature-subset-size", dest="feature_subset_size", type=int)
    model_opts.add_argument("--min-leaf", dest="min_leaf", type=int)
    model_opts.add_argument("--n-jobs", dest="n_jobs", type=int)
    model_opts.add_argument("--C", dest="C", type=float)
    model_opts.add_argument("--epsilon", type=float)
    model_opts.add_argument("--tolerance", type=float)
    model_opts.add_argument("--max-iter", dest="max_iter", type=int)
    model_opts.add_argument("--no-attribute-selection", dest="attribute_selection",
                            action="store_const", const=False)

    hist = argparse.ArgumentParser(add_help=False)
    hist.add_argument("--bin-width", dest="bin_width", type=float, default=1.0)

    p = sub.add_parser("validate", help="check CSV files against the schema")
    p.add_argument("paths", nargs="+")
    p.add_argument("--provenance", choices=[e.value for e in Provenance], default="literature")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fit", parents=[common, model_opts], help="train and save a model")
    p.add_argument("--train")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cv", parents=[common, model_opts, hist], help="k-fold cross-validation")
    p.add_argument("--train")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("holdout", parents=[common, model_opts, hist],
                       help="train on one file, score another")
    p.add_argument("--train")
    p.add_argument("--test", help="default: bundled experimental dataset")
    p.set_defaults(func=cmd_holdout)

    p = sub.add_parser("rank", parents=[common, model_opts], help="feature significance")
    p.add_argument("--train")
    p.add_argument("--method", choices=("pearson", "wrapper"), default="pearson")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("predict", help="predict Ra for rows of a CSV")
    p.add_argument("model_file")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("optimize", help="grid search for the lowest predicted Ra")
    p.add_argument("model_file")
    p.add_argument("grid", help='JSON: {"layer_height": {"min":..,"max":..,"step":..}, ...}')
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("reproduce", parents=[common, model_opts, hist],
                       help="run every table in one go")
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.set_defaults(func=cmd_reproduce)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        defaults = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IngestIOError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {args.config} is not valid JSON: {exc}") from exc
    # re-parse with config values as defaults so explicit flags still win
    for action in _subparser(parser, args.command)._actions:
        if action.dest in defaults:
            action.default = defaults[action.dest]
    return parser.parse_args(argv)


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except RoughnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
