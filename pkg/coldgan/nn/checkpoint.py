"""Versioned binary tensor checkpoints with a JSON manifest.

Layout (little-endian)::

    b"CGAN" | u32 format version
    repeated: u32 name length | UTF-8 name | u32 rank | u64 dims[rank] | f64 payload (row-major)

The manifest ``<checkpoint>.json`` lists tensor names and shapes, the training
config hash and free-form metadata.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping

import numpy as np

from coldgan.errors import DataError
from coldgan.utils.fileio import write_bytes_atomic, write_json_atomic

MAGIC = b"CGAN"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    tensors: Dict[str, np.ndarray]
    config_hash: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)


def manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def encode_tensors(tensors: Mapping[str, np.ndarray]) -> bytes:
    chunks = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    for name, tensor in tensors.items():
        encoded = name.encode("utf-8")
        array = np.ascontiguousarray(tensor, dtype="<f8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}Q", *array.shape))
        chunks.append(array.tobytes(order="C"))
    return b"".join(chunks)


def decode_tensors(payload: bytes) -> Dict[str, np.ndarray]:
    if payload[:4] != MAGIC:
        raise DataError("not a CGAN checkpoint (bad magic)")
    if len(payload) < 8:
        raise DataError("truncated checkpoint header")
    (version,) = struct.unpack_from("<I", payload, 4)
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported checkpoint format version {version}")

    tensors: Dict[str, np.ndarray] = {}
    offset = 8
    try:
        while offset < len(payload):
            (name_length,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            name = payload[offset : offset + name_length].decode("utf-8")
            offset += name_length
            (rank,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            shape = struct.unpack_from(f"<{rank}Q", payload, offset)
            offset += 8 * rank
            count = int(np.prod(shape, dtype=np.int64))
            if offset + 8 * count > len(payload):
                raise DataError(f"truncated payload for tensor {name!r}")
            data = np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
            offset += 8 * count
            tensors[name] = data.astype(np.float64).reshape(shape)
    except (struct.error, UnicodeDecodeError) as exc:
        raise DataError(f"corrupt checkpoint: {exc}") from exc
    return tensors


def write_checkpoint(
    path: Path,
    tensors: Mapping[str, np.ndarray],
    config_hash: str = "",
    metadata: Mapping[str, Any] | None = None,
) -> None:
    write_bytes_atomic(path, encode_tensors(tensors))
    write_json_atomic(
        manifest_path(path),
        {
            "magic": MAGIC.decode("ascii"),
            "format_version": FORMAT_VERSION,
            "tensors": [{"name": name, "shape": list(np.shape(tensor))} for name, tensor in tensors.items()],
            "config_hash": config_hash,
            "metadata": dict(metadata or {}),
        },
    )


def read_checkpoint(path: Path) -> Checkpoint:
    if not path.exists():
        raise DataError(f"checkpoint not found: {path}")
    tensors = decode_tensors(path.read_bytes())
    manifest_file = manifest_path(path)
    if not manifest_file.exists():
        raise DataError(f"checkpoint manifest not found: {manifest_file}")
    manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
    listed = {entry["name"]: tuple(entry["shape"]) for entry in manifest.get("tensors", [])}
    actual = {name: tensor.shape for name, tensor in tensors.items()}
    if listed != actual:
        raise DataError("checkpoint manifest does not match the tensors on disk")
    return Checkpoint(tensors=tensors, config_hash=manifest.get("config_hash", ""), metadata=manifest.get("metadata", {}))
