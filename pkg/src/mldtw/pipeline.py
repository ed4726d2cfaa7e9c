"""End-to-end learned search: labeling, training, prediction and constrained fill."""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .banded import SearchRegion, constrained_dtw
from .core import WarpPath, as_series, full_dtw
from .errors import DegenerateLabelsError, DimensionMismatchError, ModelFormatError
from .model_io import dump_model_set, parse_model_set
from .nn import DenseNet, Scaler, TrainConfig, scaler_fit, train_classifier
from .region import (
    DEFAULT_QUANT,
    N_WAYPOINTS,
    Waypoint,
    build_region,
    quantize,
    waypoint_columns,
)

log = logging.getLogger(__name__)

DEFAULT_PREFIX = 30
MIN_REGION_LENGTH = 7
FEATURES_RAW = "raw"
FEATURES_BLOCK = "matrix-block"
FEATURE_MODES = (FEATURES_RAW, FEATURES_BLOCK)
_MODE_CODE = {FEATURES_RAW: 0, FEATURES_BLOCK: 1}


def default_threads() -> int:
    env = os.environ.get("MLDTW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def extract_features(A, B, L: int = DEFAULT_PREFIX, W: int = DEFAULT_PREFIX, mode: str = FEATURES_RAW):
    """First L points of A then first W points of B, flattened point by point.

    ``matrix-block`` mode instead returns the L x W top-left block of the
    accumulated cost matrix, column by column.
    """
    A, B = as_series(A), as_series(B)
    if len(A) < L or len(B) < W:
        raise ValueError(f"series of length {len(A)}/{len(B)} shorter than prefix {L}/{W}")
    if mode == FEATURES_RAW:
        return np.concatenate((A.values[:L].ravel(), B.values[:W].ravel()))
    if mode == FEATURES_BLOCK:
        if A.dim != B.dim:
            raise DimensionMismatchError("series dims differ")
        block = _kernels.fill_full(A.values[:L], B.values[:W])[1:, 1:]
        return block.T.ravel()
    raise ValueError(f"unknown feature mode {mode!r}")


def feature_length(L: int, W: int, dim: int, mode: str = FEATURES_RAW) -> int:
    return dim * (L + W) if mode == FEATURES_RAW else L * W


def _quantize_below(x: float, q: int, limit: int) -> int:
    v = quantize(x, q)
    if v > limit:
        v = (limit // q) * q
    return v


def extract_waypoints(path: WarpPath, n: int, m: int, q: int = DEFAULT_QUANT) -> List[Waypoint]:
    """Five quantized (row, col) points on the path at columns round(k*m/6).

    Row is the floor-mean of the 0-based path rows at that column. Values are
    rounded to the nearest multiple of ``q`` without passing the last index.
    """
    arr = path.as_array() - 1
    out = []
    for c in waypoint_columns(m):
        rows = arr[arr[:, 1] == c, 0]
        mean_row = int(rows.sum()) // len(rows)
        out.append(Waypoint(_quantize_below(mean_row, q, n - 1), _quantize_below(c, q, m - 1)))
    return out


@dataclass
class LabeledRow:
    features: np.ndarray
    waypoints: List[Waypoint]
    pair: Tuple[int, int] = (-1, -1)


def _ordered_pairs(k: int):
    return [(i, j) for i in range(k) for j in range(k) if i != j]


def sample_pairs(k: int, count: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Uniform sample without replacement over the k*(k-1) ordered pairs."""
    total = k * (k - 1)
    if count > total:
        raise ValueError(f"only {total} ordered pairs available, asked for {count}")
    picks = rng.choice(total, size=count, replace=False)
    out = []
    for p in picks:
        i, r = divmod(int(p), k - 1)
        out.append((i, r if r < i else r + 1))
    return out


def label_pair(A, B, L: int, W: int, q: int, mode: str = FEATURES_RAW) -> LabeledRow:
    al = full_dtw(A, B)
    return LabeledRow(
        extract_features(A, B, L, W, mode),
        extract_waypoints(al.path, len(A), len(B), q),
    )


def build_training_set(
    corpus,
    L: int = DEFAULT_PREFIX,
    W: int = DEFAULT_PREFIX,
    q: int = DEFAULT_QUANT,
    pairs: Optional[Sequence[Tuple[int, int]]] = None,
    mode: str = FEATURES_RAW,
    threads: Optional[int] = None,
) -> List[LabeledRow]:
    """Label ordered pairs (every i != j unless ``pairs`` is given) with full DTW.

    Pairs involving a series too short for the prefixes or the region
    construction are skipped and counted in the log.
    """
    series = list(corpus)
    if len(series) < 2:
        raise ValueError("corpus needs at least 2 series")
    if len({s.dim for s in series}) != 1:
        raise ValueError("corpus series must share one dim")
    if pairs is None:
        pairs = _ordered_pairs(len(series))
    ok = [len(s) >= max(L, W, MIN_REGION_LENGTH) for s in series]
    usable = [(i, j) for i, j in pairs if ok[i] and ok[j]]
    skipped = len(pairs) - len(usable)
    if skipped:
        log.warning("skipped %d pairs with undersized series", skipped)

    def work(pair):
        i, j = pair
        row = label_pair(series[i], series[j], L, W, q, mode)
        row.pair = (i, j)
        return row

    threads = threads or default_threads()
    if threads == 1:
        return [work(p) for p in usable]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(work, usable))


def training_header(n_features: int) -> List[str]:
    cols = [f"f{k}" for k in range(n_features)]
    for k in range(N_WAYPOINTS):
        cols += [f"wp{k}_row", f"wp{k}_col"]
    return cols


def write_training_csv(path, rows: Sequence[LabeledRow]) -> None:
    n_features = len(rows[0].features)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(training_header(n_features))
        for row in rows:
            vals = [format(v, ".17g") for v in row.features]
            for wp in row.waypoints:
                vals += [str(wp.row), str(wp.col)]
            writer.writerow(vals)


def read_training_csv(path) -> List[LabeledRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty training file") from None
        n_features = len(header) - 2 * N_WAYPOINTS
        if n_features < 1 or header != training_header(n_features):
            raise ValueError(f"{path}: header does not match the training schema")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} columns, got {len(rec)}")
            try:
                feats = np.array([float(v) for v in rec[:n_features]])
                ints = [int(v) for v in rec[n_features:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            wps = [Waypoint(ints[2 * k], ints[2 * k + 1]) for k in range(N_WAYPOINTS)]
            rows.append(LabeledRow(feats, wps))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


@dataclass
class WaypointModelSet:
    models: List[Tuple[DenseNet, Scaler]]
    prefix_a: int = DEFAULT_PREFIX
    prefix_b: int = DEFAULT_PREFIX
    quant: int = DEFAULT_QUANT
    dim: int = 1
    feature_mode: str = FEATURES_RAW
    dataset_id: str = ""

    def __post_init__(self):
        if len(self.models) != N_WAYPOINTS:
            raise ValueError(f"need {N_WAYPOINTS} models, got {len(self.models)}")
        dims = {net.input_dim for net, _ in self.models}
        if len(dims) != 1:
            raise ValueError("all waypoint models must share one feature_dim")
        expected = feature_length(self.prefix_a, self.prefix_b, self.dim, self.feature_mode)
        if dims.pop() != expected:
            raise ValueError(f"models expect a different feature length than {expected}")

    def to_bytes(self) -> bytes:
        header = {
            "prefix_a": self.prefix_a,
            "prefix_b": self.prefix_b,
            "quant": self.quant,
            "dim": self.dim,
            "feature_mode": _MODE_CODE[self.feature_mode],
            "dataset_id": self.dataset_id,
        }
        return dump_model_set(header, self.models)

    @classmethod
    def from_bytes(cls, data: bytes) -> "WaypointModelSet":
        header, models = parse_model_set(data)
        mode = {v: k for k, v in _MODE_CODE.items()}.get(header["feature_mode"])
        if mode is None:
            raise ModelFormatError(f"unknown feature mode code {header['feature_mode']}")
        return cls(
            models,
            header["prefix_a"],
            header["prefix_b"],
            header["quant"],
            header["dim"],
            mode,
            header["dataset_id"],
        )

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "WaypointModelSet":
        return cls.from_bytes(Path(path).read_bytes())


def position_labels(rows: Sequence[LabeledRow], k: int):
    """Label alphabet (sorted) and per-row label indices for waypoint position k."""
    wps = [tuple(r.waypoints[k]) for r in rows]
    label_map = sorted(set(wps))
    index = {wp: i for i, wp in enumerate(label_map)}
    return label_map, np.array([index[wp] for wp in wps], dtype=np.int64)


def train_waypoint_models(
    rows: Sequence[LabeledRow],
    cfg: Optional[TrainConfig] = None,
    L: int = DEFAULT_PREFIX,
    W: int = DEFAULT_PREFIX,
    q: int = DEFAULT_QUANT,
    dim: int = 1,
    mode: str = FEATURES_RAW,
    dataset_id: str = "",
):
    """Train one classifier per waypoint position; returns (model set, histories).

    Classifier k uses seed ``cfg.seed + k``.
    """
    cfg = cfg or TrainConfig()
    X = np.stack([r.features for r in rows])
    scaler = scaler_fit(X)
    Xs = scaler.transform(X)
    models, histories = [], []
    for k in range(N_WAYPOINTS):
        label_map, y = position_labels(rows, k)
        if len(label_map) < 2:
            raise DegenerateLabelsError(f"waypoint {k} has a single label {label_map[0]}")
        kcfg = TrainConfig(**{**cfg.__dict__, "seed": cfg.seed + k})
        net, hist = train_classifier(Xs, y, kcfg, label_map=label_map)
        hist["majority_baseline"] = float(np.bincount(y).max() / len(y))
        hist["labels"] = len(label_map)
        log.info(
            "waypoint %d: %d labels, best val acc %.3f after %d epochs",
            k,
            len(label_map),
            hist["val_accuracy"][hist["best_epoch"]],
            hist["epochs_run"],
        )
        models.append((net, scaler))
        histories.append(hist)
    return WaypointModelSet(models, L, W, q, dim, mode, dataset_id), histories


def predict_waypoints(A, B, models: WaypointModelSet):
    """Five predicted waypoints and six confidences (anchor 1.0 first)."""
    A, B = as_series(A), as_series(B)
    if A.dim != models.dim or B.dim != models.dim:
        raise DimensionMismatchError(f"models were trained on dim {models.dim}")
    x = extract_features(A, B, models.prefix_a, models.prefix_b, models.feature_mode)
    waypoints, confidences = [], [1.0]
    for net, scaler in models.models:
        probs = net.predict_proba(scaler.transform(x[None, :]))[0]
        k = int(np.argmax(probs))
        waypoints.append(Waypoint(*net.label_map[k]))
        confidences.append(float(probs[k]))
    return waypoints, confidences


@dataclass
class RegionStats:
    area: int
    confidences: List[float]
    inference_time: float
    fill_time: float
    waypoints: List[Waypoint] = field(default_factory=list)


def ml_region(A, B, models: WaypointModelSet):
    """Predict waypoints and build the search region.

    Returns (region, waypoints, confidences, elapsed seconds).
    """
    A, B = as_series(A), as_series(B)
    t0 = time.perf_counter()
    waypoints, confidences = predict_waypoints(A, B, models)
    region = build_region(waypoints, confidences, len(A), len(B))
    elapsed = time.perf_counter() - t0
    return region, waypoints, confidences, elapsed


def ml_dtw(A, B, models: WaypointModelSet, keep_matrix: bool = False):
    """Learned-region DTW. Returns (Alignment, RegionStats).

    Inference (feature extraction, prediction, region construction) is timed
    separately from the matrix fill + backtrack.
    """
    A, B = as_series(A), as_series(B)
    if len(A) < max(models.prefix_a, MIN_REGION_LENGTH) or len(B) < max(models.prefix_b, MIN_REGION_LENGTH):
        raise ValueError("series shorter than the model prefixes")
    region, waypoints, confidences, t_inf = ml_region(A, B, models)
    al = constrained_dtw(A, B, region, keep_matrix=keep_matrix)
    stats = RegionStats(region.area, confidences, t_inf, al.fill_time, waypoints)
    return al, stats


def ground_truth_region(path: WarpPath, n: int, m: int, q: int = DEFAULT_QUANT) -> SearchRegion:
    """Region built from the labeled waypoints of a known path, all confidences 1."""
    wps = extract_waypoints(path, n, m, q)
    return build_region(wps, [1.0] * (N_WAYPOINTS + 1), n, m)


def percent_error(d: float, d_exact: float) -> float:
    """100 * (d - d_exact) / d_exact; ``inf`` when the exact distance is 0 but d is not."""
    if d_exact == 0:
        return 0.0 if d == 0 else math.inf
    return 100.0 * (d - d_exact) / d_exact
