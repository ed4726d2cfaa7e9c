"""Binary model files.

Single classifier (``MLDTWNN1``), little-endian::

    magic[8] feature_dim:u32 means:f64[feature_dim] stds:f64[feature_dim]
    layer_count:u32
      per layer: rows:u32 cols:u32 activation:u8 weights:f64[rows*cols] biases:f64[cols]
    label_count:u32 per label: row:i32 col:i32
    crc32:u32 over every preceding byte

Waypoint model set (``MLDTWSET``) wraps five classifier blobs::

    magic[8] prefix_a:u32 prefix_b:u32 quant:u32 dim:u32 feature_mode:u8
    id_len:u32 id:utf8[id_len] model_count:u32
      per model: blob_len:u32 blob[blob_len]
    crc32:u32
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .errors import (
    ChecksumError,
    ModelFormatError,
    ModelVersionError,
    TruncatedModelError,
)
from .nn import RELU, SOFTMAX, Dense, DenseNet, Scaler

MAGIC = b"MLDTWNN1"
SET_MAGIC = b"MLDTWSET"
_ACT_CODE = {RELU: 0, SOFTMAX: 1}
_ACT_NAME = {v: k for k, v in _ACT_CODE.items()}


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise TruncatedModelError(
                f"payload ends at byte {len(self.data)}, needed {self.pos + n}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]

    def f64s(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)


def _split_crc(data: bytes, magic: bytes) -> bytes:
    if data[: len(magic)] != magic:
        raise ModelVersionError(f"bad magic {data[:len(magic)]!r}, expected {magic!r}")
    if len(data) < len(magic) + 4:
        raise TruncatedModelError("file too short")
    body, crc = data[:-4], struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise ChecksumError("CRC32 mismatch")
    return body


def dump_model(net: DenseNet, scaler: Scaler) -> bytes:
    dim = net.input_dim
    out = bytearray(MAGIC)
    out += struct.pack("<I", dim)
    out += np.asarray(scaler.means, dtype="<f8").tobytes()
    out += np.asarray(scaler.stds, dtype="<f8").tobytes()
    out += struct.pack("<I", len(net.layers))
    for layer in net.layers:
        rows, cols = layer.weights.shape
        out += struct.pack("<IIB", rows, cols, _ACT_CODE[layer.activation])
        out += np.ascontiguousarray(layer.weights, dtype="<f8").tobytes()
        out += np.asarray(layer.biases, dtype="<f8").tobytes()
    out += struct.pack("<I", len(net.label_map))
    for row, col in net.label_map:
        out += struct.pack("<ii", int(row), int(col))
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


def parse_model(data: bytes) -> Tuple[DenseNet, Scaler, List[Tuple[int, int]]]:
    body = _split_crc(data, MAGIC)
    r = _Reader(body)
    r.take(len(MAGIC))
    dim = r.u32()
    means = r.f64s(dim)
    stds = r.f64s(dim)
    layers = []
    for _ in range(r.u32()):
        rows, cols = r.u32(), r.u32()
        code = r.u8()
        if code not in _ACT_NAME:
            raise ModelFormatError(f"unknown activation code {code}")
        W = r.f64s(rows * cols).reshape(rows, cols)
        b = r.f64s(cols)
        layers.append(Dense(W, b, _ACT_NAME[code]))
    labels = []
    for _ in range(r.u32()):
        row, col = struct.unpack("<ii", r.take(8))
        labels.append((row, col))
    if r.pos != len(body):
        raise TruncatedModelError(f"{len(body) - r.pos} unexpected trailing bytes")
    if not layers or layers[0].weights.shape[0] != dim:
        raise ModelFormatError("first layer does not match feature_dim")
    try:
        net = DenseNet(layers, labels)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
    return net, Scaler(means, stds), labels


def save_model(path, net: DenseNet, scaler: Scaler) -> None:
    Path(path).write_bytes(dump_model(net, scaler))


def load_model(path) -> Tuple[DenseNet, Scaler, List[Tuple[int, int]]]:
    return parse_model(Path(path).read_bytes())


def dump_model_set(header: dict, models) -> bytes:
    """``models`` is a sequence of (DenseNet, Scaler) pairs."""
    ident = header.get("dataset_id", "").encode("utf-8")
    out = bytearray(SET_MAGIC)
    out += struct.pack(
        "<IIIIB",
        header["prefix_a"],
        header["prefix_b"],
        header["quant"],
        header["dim"],
        header["feature_mode"],
    )
    out += struct.pack("<I", len(ident)) + ident
    out += struct.pack("<I", len(models))
    for net, scaler in models:
        blob = dump_model(net, scaler)
        out += struct.pack("<I", len(blob)) + blob
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


def parse_model_set(data: bytes):
    body = _split_crc(data, SET_MAGIC)
    r = _Reader(body)
    r.take(len(SET_MAGIC))
    prefix_a, prefix_b, quant, dim = (r.u32() for _ in range(4))
    header = {
        "prefix_a": prefix_a,
        "prefix_b": prefix_b,
        "quant": quant,
        "dim": dim,
        "feature_mode": r.u8(),
    }
    try:
        header["dataset_id"] = r.take(r.u32()).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ModelFormatError("dataset id is not valid UTF-8") from exc
    models = []
    for _ in range(r.u32()):
        net, scaler, _ = parse_model(r.take(r.u32()))
        models.append((net, scaler))
    if r.pos != len(body):
        raise TruncatedModelError(f"{len(body) - r.pos} unexpected trailing bytes")
    return header, models
