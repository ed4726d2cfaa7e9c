"""Command-line front end.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .banded import banded_dtw
from .core import full_dtw
from .datasets import (
    SCHEMAS,
    gen_synth,
    load_series_csv,
    window_corpus,
    write_series_csv,
)
from .errors import ModelFormatError, SeriesFormatError
from .heatmap import heatmap_export
from .nn import TrainConfig
from .pipeline import (
    DEFAULT_PREFIX,
    FEATURE_MODES,
    WaypointModelSet,
    build_training_set,
    default_threads,
    feature_length,
    ml_dtw,
    percent_error,
    read_training_csv,
    sample_pairs,
    train_waypoint_models,
    write_training_csv,
)
from .region import DEFAULT_QUANT

log = logging.getLogger("mldtw")


class UsageError(Exception):
    pass


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v

    return conv


def _nonneg_float(name):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not v >= 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0, got {v}")
        return v

    return conv


def _load_corpus(args):
    corpus = load_series_csv(args.corpus_path, args.schema)
    if getattr(args, "window", None):
        corpus = window_corpus(corpus, args.window, args.stride or args.window)
    return corpus


def _series_arg(spec: str, schema: str):
    """``PATH`` or ``PATH:INDEX`` -> one series from a series CSV."""
    path, index = spec, 0
    head, sep, tail = spec.rpartition(":")
    if sep and tail.isdigit() and head:
        path, index = head, int(tail)
    corpus = load_series_csv(path, schema)
    if index >= len(corpus):
        raise UsageError(f"{path} holds {len(corpus)} series, index {index} out of range")
    return corpus[index]


def cmd_gen_synth(args):
    if args.freq_lo > args.freq_hi:
        raise UsageError("--freq-lo must not exceed --freq-hi")
    if args.length < 8:
        raise UsageError("--length must be >= 8")
    corpus = gen_synth(args.count, args.length, args.noise, args.seed, (args.freq_lo, args.freq_hi))
    write_series_csv(args.out, corpus)
    print(f"wrote {len(corpus)} series of length {args.length} to {args.out}")


def cmd_label(args):
    args.corpus_path = args.inp
    corpus = _load_corpus(args)
    pairs = None
    if args.max_pairs:
        total = len(corpus) * (len(corpus) - 1)
        if args.max_pairs < total:
            pairs = sample_pairs(len(corpus), args.max_pairs, np.random.default_rng(args.seed))
    rows = build_training_set(
        corpus, args.prefix, args.prefix, args.quant, pairs=pairs, mode=args.features, threads=args.threads
    )
    if not rows:
        raise RuntimeError("no labelable pairs in corpus")
    write_training_csv(args.out, rows)
    print(f"wrote {len(rows)} labeled pairs to {args.out}")


def cmd_train(args):
    rows = read_training_csv(args.inp)
    n_features = len(rows[0].features)
    if args.features == "raw":
        dim, rem = divmod(n_features, 2 * args.prefix)
    else:
        dim, rem = 1, n_features - args.prefix * args.prefix
    if rem or dim < 1 or feature_length(args.prefix, args.prefix, dim, args.features) != n_features:
        raise UsageError(
            f"{args.inp} has {n_features} features, inconsistent with --prefix {args.prefix}"
            f" and --features {args.features}"
        )
    cfg = TrainConfig(
        max_epochs=args.epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        seed=args.seed,
        hidden=(args.hidden,),
    )
    models, histories = train_waypoint_models(
        rows, cfg, args.prefix, args.prefix, args.quant, dim, args.features, Path(args.inp).stem
    )
    models.save(args.out_model)
    hist_path = args.history or f"{args.out_model}.history.csv"
    with open(hist_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["waypoint", "epoch", "loss", "accuracy", "val_loss", "val_accuracy"])
        for k, h in enumerate(histories):
            for e in range(h["epochs_run"]):
                w.writerow([k, e, h["loss"][e], h["accuracy"][e], h["val_loss"][e], h["val_accuracy"][e]])
    for k, h in enumerate(histories):
        best = h["best_epoch"]
        print(
            f"waypoint {k}: {h['labels']} labels, val acc {h['val_accuracy'][best]:.3f}"
            f" (majority {h['majority_baseline']:.3f}), {h['epochs_run']} epochs"
        )
    print(f"wrote model set to {args.out_model}, history to {hist_path}")


def cmd_compare(args):
    if args.variant == "ml" and not args.model:
        raise UsageError("--variant ml requires --model")
    A = _series_arg(args.a, args.schema)
    B = _series_arg(args.b, args.schema)
    exact = full_dtw(A, B, keep_matrix=args.variant == "full")
    extra = ""
    if args.variant == "full":
        al = exact
    elif args.variant == "band":
        al = banded_dtw(A, B, args.radius, keep_matrix=True)
    else:
        models = WaypointModelSet.load(args.model)
        al, stats = ml_dtw(A, B, models, keep_matrix=True)
        extra = f"\nml inference: {stats.inference_time:.6f} s"
    err = percent_error(al.distance, exact.distance)
    print(f"variant: {args.variant}")
    print(f"distance: {al.distance:.6g}")
    print(f"error: {err:.2f}%")
    print(f"fill time: {al.fill_time:.6f} s")
    print(f"cells: {al.cells_computed}" + extra)
    if args.heatmap:
        heatmap_export(al.matrix, args.heatmap, al.path)
        print(f"heatmap: {args.heatmap}")


def cmd_bench(args):
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    bad = [v for v in variants if v not in bench_mod.VARIANTS]
    if bad or not variants:
        raise UsageError(f"--variants must be a subset of {','.join(bench_mod.VARIANTS)}")
    if "ml" in variants and not args.model:
        raise UsageError("--variants with ml requires --model")
    args.corpus_path = args.corpus
    corpus = _load_corpus(args)
    models = WaypointModelSet.load(args.model) if "ml" in variants else None
    records, summary = bench_mod.run_bench(
        corpus, args.trials, variants, models, args.radius, args.seed, args.threads
    )
    summary.config.update({"corpus": str(args.corpus), "model": args.model, "schema": args.schema})
    trials_path = args.csv
    if trials_path is None and args.json:
        trials_path = f"{args.json}.trials.csv"
    if trials_path:
        bench_mod.write_trials_csv(trials_path, records, variants)
    if args.json:
        Path(args.json).write_text(summary.to_json() + "\n", encoding="utf-8")
    print(bench_mod.format_table(summary))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mldtw", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-synth", help="generate a synthetic sine corpus")
    g.add_argument("--count", type=_positive("--count"), default=10000)
    g.add_argument("--length", type=_positive("--length"), default=200)
    g.add_argument("--noise", type=_nonneg_float("--noise"), default=0.075)
    g.add_argument("--freq-lo", type=_nonneg_float("--freq-lo"), default=0.5)
    g.add_argument("--freq-hi", type=_nonneg_float("--freq-hi"), default=3.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_synth)

    def corpus_opts(sp):
        sp.add_argument("--schema", choices=SCHEMAS, default="univariate")
        sp.add_argument("--window", type=_positive("--window"), help="cut recordings into windows")
        sp.add_argument("--stride", type=_positive("--stride"))

    lab = sub.add_parser("label", help="label ordered pairs with full-DTW waypoints")
    lab.add_argument("--in", dest="inp", required=True)
    lab.add_argument("--out", required=True)
    lab.add_argument("--prefix", type=_positive("--prefix"), default=DEFAULT_PREFIX)
    lab.add_argument("--quant", type=_positive("--quant"), default=DEFAULT_QUANT)
    lab.add_argument("--features", choices=FEATURE_MODES, default="raw")
    lab.add_argument("--max-pairs", type=_positive("--max-pairs"))
    lab.add_argument("--seed", type=int, default=0)
    lab.add_argument("--threads", type=_positive("--threads"))
    corpus_opts(lab)
    lab.set_defaults(func=cmd_label)

    t = sub.add_parser("train", help="train the five waypoint classifiers")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--out-model", required=True)
    t.add_argument("--hidden", type=_positive("--hidden"), default=300)
    t.add_argument("--epochs", type=_positive("--epochs"), default=200)
    t.add_argument("--patience", type=_positive("--patience"), default=10)
    t.add_argument("--batch-size", type=_positive("--batch-size"), default=32)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--prefix", type=_positive("--prefix"), default=DEFAULT_PREFIX)
    t.add_argument("--quant", type=_positive("--quant"), default=DEFAULT_QUANT)
    t.add_argument("--features", choices=FEATURE_MODES, default="raw")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--history", help="per-epoch history CSV (default: <out-model>.history.csv)")
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("compare", help="align one pair with a chosen variant")
    c.add_argument("--a", required=True, help="series CSV, optionally PATH:INDEX")
    c.add_argument("--b", required=True, help="series CSV, optionally PATH:INDEX")
    c.add_argument("--variant", choices=bench_mod.VARIANTS, default="full")
    c.add_argument("--radius", type=_positive("--radius"), default=15)
    c.add_argument("--model")
    c.add_argument("--schema", choices=SCHEMAS, default="univariate")
    c.add_argument("--heatmap", help="write the cost matrix as a PGM image")
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="benchmark variants over sampled pairs")
    b.add_argument("--corpus", required=True)
    b.add_argument("--trials", type=_positive("--trials"), default=1000)
    b.add_argument("--variants", default="full,band,ml")
    b.add_argument("--model")
    b.add_argument("--radius", type=_positive("--radius"), help="band radius (default: budget-fair)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", help="summary JSON path")
    b.add_argument("--csv", help="trial CSV path (default: <json>.trials.csv)")
    b.add_argument("--threads", type=_positive("--threads"))
    corpus_opts(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    # MLDTW_THREADS wins over --threads
    if hasattr(args, "threads") and (args.threads is None or os.environ.get("MLDTW_THREADS")):
        args.threads = default_threads()
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mldtw: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, SeriesFormatError, ModelFormatError, ValueError, RuntimeError) as exc:
        print(f"mldtw: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
