"""Versioned flat files: one JSON header line, then raw little-endian float64 arrays."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

MAGIC = "JOBSKILLS-FLAT"


def write_flat(path: str | Path, kind: str, version: int, header: dict, arrays: dict[str, np.ndarray]) -> None:
    layout = [{"name": k, "shape": list(np.shape(v))} for k, v in arrays.items()]
    head = {"magic": MAGIC, "kind": kind, "version": version, "dtype": "<f8",
            "arrays": layout, **header}
    with open(path, "wb") as fh:
        fh.write(json.dumps(head, sort_keys=True, ensure_ascii=False).encode("utf-8") + b"\n")
        for v in arrays.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def read_flat(path: str | Path, kind: str) -> tuple[dict, dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    head = json.loads(raw[:nl].decode("utf-8"))
    if head.get("magic") != MAGIC or head.get("kind") != kind:
        raise ValueError(f"{path}: not a {kind} file")
    body = raw[nl + 1:]
    arrays, offset = {}, 0
    for spec in head["arrays"]:
        n = int(np.prod(spec["shape"])) if spec["shape"] else 1
        arr = np.frombuffer(body, dtype="<f8", count=n, offset=offset).astype(np.float64)
        arrays[spec["name"]] = arr.reshape(spec["shape"])
        offset += 8 * n
    if offset != len(body):
        raise ValueError(f"{path}: body length does not match header")
    return head, arrays
