"""Named-tensor checkpoint container.

Layout: one UTF-8 JSON header line carrying the format name, version, and the
ordered tensor directory (name + shape), followed by each tensor's row-major
little-endian float64 payload in directory order.
"""

from __future__ import annotations

import json

import numpy as np

FORMAT_NAME = "baitline-tensors"
FORMAT_VERSION = 1


class CheckpointVersionError(RuntimeError):
    """Checkpoint has an unknown format name or unsupported version."""


def save_tensors(path, tensors: dict[str, np.ndarray]) -> None:
    names = sorted(tensors)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "tensors": [{"name": n, "shape": list(tensors[n].shape)} for n in names],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for name in names:
            arr = np.ascontiguousarray(tensors[name], dtype=np.float64)
            fh.write(arr.astype("<f8", copy=False).tobytes())


def load_tensors(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise CheckpointVersionError(f"{path}: not a tensor checkpoint") from None
        if header.get("format") != FORMAT_NAME:
            raise CheckpointVersionError(
                f"{path}: unknown checkpoint format {header.get('format')!r}"
            )
        if header.get("version") != FORMAT_VERSION:
            raise CheckpointVersionError(
                f"{path}: unsupported checkpoint version {header.get('version')!r}"
            )
        out: dict[str, np.ndarray] = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            payload = fh.read(count * 8)
            if len(payload) != count * 8:
                raise CheckpointVersionError(
                    f"{path}: truncated payload for tensor {entry['name']!r}"
                )
            out[entry["name"]] = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
    return out
