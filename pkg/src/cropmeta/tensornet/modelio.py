"""Binary model file: architecture, freeze mask, normalizer, parameters.

Layout: magic ``AGMM``, version u16, then length-prefixed blocks, each
``u32 payload length | payload | u32 CRC32``. Block 0 is a JSON meta
record (network spec, trainable flags, parameter keys and shapes),
block 1 the JSON normalizer statistics (or null), and one block of raw
little-endian float64 data follows per parameter tensor. Loading
validates every checksum before constructing anything, so a corrupt or
truncated file never yields a partial model.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cropmeta.datagen.normalize import Normalizer
from cropmeta.errors import ModelFileError
from cropmeta.tensornet.network import NetworkSpec, Parameters, forward

MODEL_MAGIC = b"AGMM"
MODEL_VERSION = 1

_PREFIX = struct.Struct("<4sH")
_U32 = struct.Struct("<I")


@dataclass
class Model:
    """A network spec with parameters and the normalizer it was trained with."""

    spec: NetworkSpec
    params: Parameters
    normalizer: Normalizer | None = None

    def predict(self, temporal, scalars, soil=None, batch_size: int = 512) -> np.ndarray:
        """De-normalized yield predictions for raw (unnormalized) inputs."""
        temporal = np.asarray(temporal, dtype=np.float64)
        scalars = np.asarray(scalars, dtype=np.float64)
        if temporal.ndim == 2:
            temporal = temporal[None]
            scalars = scalars[None]
            soil = None if soil is None else np.asarray(soil)[None]
        if self.normalizer is not None:
            temporal = self.normalizer.transform_temporal(temporal)
            scalars = self.normalizer.transform_scalars(scalars)
            if soil is not None and self.spec.include_soil:
                soil = self.normalizer.transform_soil(np.asarray(soil, dtype=np.float64))
        out = np.empty(temporal.shape[0], dtype=np.float64)
        for lo in range(0, temporal.shape[0], batch_size):
            hi = lo + batch_size
            batch_soil = None
            if self.spec.include_soil:
                batch_soil = soil[lo:hi]
            out[lo:hi] = forward(self.spec, self.params,
                                 temporal[lo:hi], scalars[lo:hi], batch_soil)
        if self.normalizer is not None:
            out = self.normalizer.inverse_target(out)
        return out


def _write_block(fh, payload: bytes) -> None:
    fh.write(_U32.pack(len(payload)))
    fh.write(payload)
    fh.write(_U32.pack(zlib.crc32(payload) & 0xFFFFFFFF))


def save_model(model: Model, path: str | Path) -> None:
    """Serialize a model; round trip is bit-exact."""
    keys = list(model.params.values.keys())
    meta = {
        "spec": model.spec.to_dict(),
        "trainable": {k: bool(v) for k, v in model.params.trainable.items()},
        "params": [{"key": k, "shape": list(model.params.values[k].shape)} for k in keys],
    }
    norm = None if model.normalizer is None else model.normalizer.to_dict()
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(MODEL_MAGIC, MODEL_VERSION))
        _write_block(fh, json.dumps(meta, sort_keys=True).encode("utf-8"))
        _write_block(fh, json.dumps(norm, sort_keys=True).encode("utf-8"))
        for key in keys:
            _write_block(fh, np.ascontiguousarray(
                model.params.values[key], dtype="<f8").tobytes())


def _read_blocks(raw: bytes, path: Path) -> list[bytes]:
    blocks = []
    offset = _PREFIX.size
    index = 0
    while offset < len(raw):
        if offset + _U32.size > len(raw):
            raise ModelFileError(f"{path}: truncated block header at block {index}")
        (length,) = _U32.unpack_from(raw, offset)
        offset += _U32.size
        end = offset + length + _U32.size
        if end > len(raw):
            raise ModelFileError(f"{path}: truncated payload in block {index}")
        payload = raw[offset:offset + length]
        (crc,) = _U32.unpack_from(raw, offset + length)
        if zlib.crc32(payload) & 0xFFFFFFFF != crc:
            raise ModelFileError(f"{path}: checksum mismatch in block {index}")
        blocks.append(payload)
        offset = end
        index += 1
    return blocks


def load_model(path: str | Path) -> Model:
    """Read a model file; raises ModelFileError on any corruption."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _PREFIX.size:
        raise ModelFileError(f"{path}: file too short for a model header")
    magic, version = _PREFIX.unpack_from(raw, 0)
    if magic != MODEL_MAGIC:
        raise ModelFileError(f"{path}: bad magic {magic!r}, expected {MODEL_MAGIC!r}")
    if version != MODEL_VERSION:
        raise ModelFileError(
            f"{path}: unsupported model version {version} (supported: {MODEL_VERSION})")
    blocks = _read_blocks(raw, path)
    if len(blocks) < 2:
        raise ModelFileError(f"{path}: expected meta and normalizer blocks")
    try:
        meta = json.loads(blocks[0].decode("utf-8"))
        norm_data = json.loads(blocks[1].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: undecodable meta block: {exc}") from exc
    spec = NetworkSpec.from_dict(meta["spec"])
    entries = meta["params"]
    if len(blocks) != 2 + len(entries):
        raise ModelFileError(
            f"{path}: expected {2 + len(entries)} blocks, found {len(blocks)}")
    values: dict[str, np.ndarray] = {}
    for entry, payload in zip(entries, blocks[2:]):
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        if len(payload) != count * 8:
            raise ModelFileError(
                f"{path}: parameter {entry['key']} has {len(payload)} bytes, "
                f"expected {count * 8}")
        values[entry["key"]] = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
    params = Parameters(values=values,
                        trainable={k: bool(v) for k, v in meta["trainable"].items()})
    normalizer = None if norm_data is None else Normalizer.from_dict(norm_data)
    return Model(spec=spec, params=params, normalizer=normalizer)
