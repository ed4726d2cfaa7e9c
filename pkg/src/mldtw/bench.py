"""Accuracy / runtime comparison of full, banded and learned-region DTW."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .banded import banded_dtw, sakoe_chiba_region
from .core import full_dtw
from .pipeline import (
    WaypointModelSet,
    default_threads,
    ml_dtw,
    percent_error,
    sample_pairs,
)

VARIANTS = ("full", "band", "ml")


@dataclass
class VariantResult:
    distance: float
    error: float
    fill_time: float
    cells: int


@dataclass
class TrialRecord:
    trial: int
    a: str
    b: str
    exact: float
    results: Dict[str, VariantResult] = field(default_factory=dict)
    ml_inference_time: float = math.nan

    @property
    def excluded(self) -> bool:
        return self.exact == 0


@dataclass
class BenchSummary:
    trials: int
    excluded: int
    seed: int
    radius: Optional[int]
    variants: Dict[str, Dict[str, float]]
    config: Dict[str, object]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def band_area(n: int, m: int, radius: int) -> int:
    return sakoe_chiba_region(n, m, radius).area


def budget_fair_radius(sizes: Sequence[tuple], target_area: float) -> int:
    """Radius whose mean band area over ``sizes`` is closest to ``target_area``."""
    uniq, counts = np.unique(np.asarray(sizes), axis=0, return_counts=True)
    best, best_gap = 1, math.inf
    for r in range(1, int(uniq.max()) + 1):
        mean = sum(c * band_area(int(n), int(m), r) for (n, m), c in zip(uniq, counts)) / counts.sum()
        gap = abs(mean - target_area)
        if gap < best_gap:
            best, best_gap = r, gap
        if mean > target_area:
            break
    return best


def _median(values) -> float:
    vals = [v for v in values if math.isfinite(v)]
    return float(np.median(vals)) if vals else math.nan


def run_bench(
    corpus,
    trials: int,
    variants: Sequence[str] = VARIANTS,
    models: Optional[WaypointModelSet] = None,
    radius: Optional[int] = None,
    seed: int = 0,
    threads: Optional[int] = None,
    pairs=None,
):
    """Run ``trials`` seeded pair comparisons; returns (records, summary).

    Without an explicit ``radius`` the band gets the same mean cell budget
    as the learned regions (or m // 10 when the learned variant is not run).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    variants = list(variants)
    unknown = set(variants) - set(VARIANTS)
    if unknown:
        raise ValueError(f"unknown variants {sorted(unknown)}")
    if "ml" in variants and models is None:
        raise ValueError("the ml variant needs a trained model set")
    series = list(corpus)
    if pairs is None:
        pairs = sample_pairs(len(series), trials, np.random.default_rng(seed))
    threads = threads or default_threads()

    def mapper(fn, items):
        if threads == 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))

    records = [
        TrialRecord(t, series[i].id or str(i), series[j].id or str(j), math.nan)
        for t, (i, j) in enumerate(pairs)
    ]

    def do_exact(t):
        i, j = pairs[t]
        return full_dtw(series[i], series[j])

    for rec, al in zip(records, mapper(do_exact, range(len(pairs)))):
        rec.exact = al.distance
        if "full" in variants:
            rec.results["full"] = VariantResult(al.distance, 0.0, al.fill_time, al.cells_computed)

    if "ml" in variants:

        def do_ml(t):
            i, j = pairs[t]
            return ml_dtw(series[i], series[j], models)

        for rec, (al, stats) in zip(records, mapper(do_ml, range(len(pairs)))):
            rec.results["ml"] = VariantResult(
                al.distance, percent_error(al.distance, rec.exact), al.fill_time, al.cells_computed
            )
            rec.ml_inference_time = stats.inference_time

    if "band" in variants:
        sizes = [(len(series[i]), len(series[j])) for i, j in pairs]
        if radius is None:
            if "ml" in variants:
                target = float(np.mean([r.results["ml"].cells for r in records]))
                radius = budget_fair_radius(sizes, target)
            else:
                radius = max(1, int(np.mean([m for _, m in sizes])) // 10)

        def do_band(t):
            i, j = pairs[t]
            return banded_dtw(series[i], series[j], radius)

        for rec, al in zip(records, mapper(do_band, range(len(pairs)))):
            rec.results["band"] = VariantResult(
                al.distance, percent_error(al.distance, rec.exact), al.fill_time, al.cells_computed
            )

    summary = summarize(records, variants, seed, radius, {"threads": threads})
    return records, summary


def summarize(records: List[TrialRecord], variants, seed, radius, config) -> BenchSummary:
    kept = [r for r in records if not r.excluded]
    out = {}
    for v in variants:
        out[v] = {
            "median_error": _median(r.results[v].error for r in kept),
            "median_fill_time": _median(r.results[v].fill_time for r in records),
            "median_cells": _median(r.results[v].cells for r in records),
        }
    if "ml" in variants:
        out["ml"]["median_inference_time"] = _median(r.ml_inference_time for r in records)
    cfg = dict(config)
    cfg["variants"] = list(variants)
    return BenchSummary(len(records), len(records) - len(kept), seed, radius, out, cfg)


def trial_columns(variants) -> List[str]:
    cols = ["trial", "a", "b", "exact"]
    for v in variants:
        cols += [f"{v}_distance", f"{v}_error", f"{v}_fill_time", f"{v}_cells"]
    if "ml" in variants:
        cols.append("ml_inference_time")
    return cols


def write_trials_csv(path, records: List[TrialRecord], variants) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trial_columns(variants))
        for r in records:
            row = [r.trial, r.a, r.b, repr(r.exact)]
            for v in variants:
                res = r.results[v]
                row += [repr(res.distance), repr(res.error), repr(res.fill_time), res.cells]
            if "ml" in variants:
                row.append(repr(r.ml_inference_time))
            writer.writerow(row)


def format_table(summary: BenchSummary) -> str:
    """Aligned text table: one line per variant with median error, time and cells."""
    lines = [
        f"trials: {summary.trials} (excluded from error medians: {summary.excluded})"
        + (f", band radius: {summary.radius}" if summary.radius is not None else ""),
        f"{'variant':<8} {'median error %':>15} {'median fill s':>14} {'median cells':>13}",
    ]
    for v, stats in summary.variants.items():
        lines.append(
            f"{v:<8} {stats['median_error']:>15.2f} {stats['median_fill_time']:>14.6f}"
            f" {stats['median_cells']:>13.0f}"
        )
    if "ml" in summary.variants:
        lines.append(f"ml inference (median): {summary.variants['ml']['median_inference_time']:.6f} s")
    return "\n".join(lines)
