"""Synthetic sine corpus, series CSV reading/writing, accelerometer magnitude."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .core import TimeSeries
from .errors import EmptyFileError, NonNumericCellError, RaggedRowError

log = logging.getLogger(__name__)

SYNTH_FREQ_RANGE = (0.5, 3.0)
SCHEMAS = ("univariate", "xy", "xyz_magnitude")
_SCHEMA_COLS = {"univariate": 1, "xy": 2, "xyz_magnitude": 4}
_DEFAULT_HEADER = {1: "value", 2: "x,y"}


@dataclass
class Corpus:
    series: List[TimeSeries]
    dim: int
    source: str = "synth"
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.series:
            raise ValueError("corpus is empty")
        if any(s.dim != self.dim for s in self.series):
            raise ValueError("corpus series must share one dim")

    def __len__(self):
        return len(self.series)

    def __getitem__(self, k):
        return self.series[k]

    def __iter__(self):
        return iter(self.series)


def gen_synth(
    count: int = 10000,
    length: int = 200,
    noise_frac: float = 0.075,
    seed: int = 0,
    freq_range=SYNTH_FREQ_RANGE,
) -> Corpus:
    """Unit sine waves with random frequency and phase plus uniform noise.

    Series k is ``sin(2*pi*f_k*t/length + phi_k) + U(-noise_frac, noise_frac)``
    with ``f_k`` uniform over ``freq_range`` cycles per window and ``phi_k``
    uniform over [0, 2*pi).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if length < 8:
        raise ValueError("length must be >= 8")
    if not noise_frac >= 0:
        raise ValueError("noise_frac must be >= 0")
    rng = np.random.default_rng(seed)
    freqs = rng.uniform(freq_range[0], freq_range[1], size=count)
    phases = rng.uniform(0.0, 2 * np.pi, size=count)
    noise = rng.uniform(-noise_frac, noise_frac, size=(count, length)) if noise_frac else None
    t = np.arange(length)
    series = []
    for k in range(count):
        x = np.sin(2 * np.pi * freqs[k] * t / length + phases[k])
        if noise is not None:
            x = x + noise[k]
        series.append(TimeSeries(x, id=f"synth-{k}"))
    return Corpus(series, 1, "synth", seed)


def synth_frequencies(count: int, seed: int, freq_range=SYNTH_FREQ_RANGE) -> np.ndarray:
    """The frequencies :func:`gen_synth` draws for the same (count, seed)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(freq_range[0], freq_range[1], size=count)


def acc_magnitude(ax, ay, az):
    return np.sqrt(np.square(ax) + np.square(ay) + np.square(az))


def _parse_cells(cells, lineno):
    try:
        return [float(c) for c in cells]
    except ValueError:
        bad = next(c for c in cells if not _is_number(c))
        raise NonNumericCellError(f"non-numeric cell {bad.strip()!r}", lineno) from None


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def load_series_csv(path, schema: str = "univariate") -> Corpus:
    """Read blank-line-separated blocks of rows, one block per series.

    ``univariate`` rows hold one value, ``xy`` rows two, ``xyz_magnitude``
    rows ``time,ax,ay,az`` and are reduced to acceleration magnitude. A
    header line is optional except for ``xyz_magnitude``, where it is
    required.
    """
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    ncols = _SCHEMA_COLS[schema]
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise EmptyFileError("file contains no data")

    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1
    first = [c.strip() for c in lines[start].split(",")]
    has_header = not all(_is_number(c) for c in first)
    if schema == "xyz_magnitude":
        if not has_header:
            raise NonNumericCellError("missing 'time,x,y,z' header", start + 1)
        if [c.lower() for c in first] != ["time", "x", "y", "z"]:
            raise NonNumericCellError(f"expected header time,x,y,z, got {lines[start]!r}", start + 1)
    if has_header:
        if len(first) != ncols:
            raise RaggedRowError(f"header has {len(first)} columns, expected {ncols}", start + 1)
        start += 1

    blocks: List[List[List[float]]] = []
    current: List[List[float]] = []
    for lineno in range(start, len(lines)):
        raw = lines[lineno]
        if not raw.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        cells = raw.split(",")
        if len(cells) != ncols:
            raise RaggedRowError(f"{len(cells)} columns, expected {ncols}", lineno + 1)
        current.append(_parse_cells(cells, lineno + 1))
    if current:
        blocks.append(current)
    if not blocks:
        raise EmptyFileError("file has a header but no rows")

    series = []
    for k, block in enumerate(blocks):
        arr = np.asarray(block, dtype=np.float64)
        if schema == "xyz_magnitude":
            arr = acc_magnitude(arr[:, 1], arr[:, 2], arr[:, 3])
        series.append(TimeSeries(arr, id=f"{Path(path).stem}-{k}"))
    dim = 2 if schema == "xy" else 1
    return Corpus(series, dim, "csv")


def write_series_csv(path, series, header: bool = True) -> None:
    """Write series as blank-line-separated blocks; values use 17 significant digits."""
    series = list(series)
    dim = series[0].dim
    if dim not in _DEFAULT_HEADER:
        raise ValueError("only dim 1 and 2 series have a CSV schema")
    chunks = []
    if header:
        chunks.append(_DEFAULT_HEADER[dim] + "\n")
    for k, s in enumerate(series):
        if k:
            chunks.append("\n")
        chunks.append("".join(",".join(format(v, ".17g") for v in row) + "\n" for row in s.values))
    Path(path).write_text("".join(chunks), encoding="utf-8")


def sliding_windows(values, length: int, stride: int) -> List[np.ndarray]:
    """Cut a long recording into fixed-length windows (for streams like WALKING)."""
    if length < 2 or stride < 1:
        raise ValueError("window length must be >= 2 and stride >= 1")
    values = np.asarray(values, dtype=np.float64)
    return [values[s : s + length] for s in range(0, len(values) - length + 1, stride)]


def window_corpus(corpus: Corpus, length: int, stride: int) -> Corpus:
    out = []
    for s in corpus:
        for k, w in enumerate(sliding_windows(s.values, length, stride)):
            out.append(TimeSeries(w, id=f"{s.id}@{k}"))
    if not out:
        raise ValueError("no series is long enough for the requested window")
    log.info("windowed %d recordings into %d series", len(corpus), len(out))
    return Corpus(out, corpus.dim, corpus.source, corpus.seed)
