"""Writer for the RGBE embedding file format shared with the classifier.

Layout (little-endian): magic "RGBE", version u16=1, dim u32,
user_count u64, then per user: id_len u16, UTF-8 id, n_k u32,
n_k * dim float32 values row major.  Bit-compatible with the consumer's
reader by construction; the contract tests round-trip through it.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"RGBE"
VERSION = 1

_HEADER = struct.Struct("<4sHIQ")
_ID_LEN = struct.Struct("<H")
_ROWS = struct.Struct("<I")


def write_rgbe(entries: dict[str, np.ndarray], dim: int, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, len(entries)))
        for user_id, matrix in entries.items():
            matrix = np.ascontiguousarray(matrix, dtype="<f4")
            if matrix.ndim != 2 or matrix.shape[1] != dim:
                raise ValueError(
                    f"user {user_id}: expected (n, {dim}) matrix, got {matrix.shape}"
                )
            if matrix.size and not np.isfinite(matrix).all():
                raise ValueError(f"user {user_id}: non-finite embedding values")
            ident = user_id.encode("utf-8")
            fh.write(_ID_LEN.pack(len(ident)))
            fh.write(ident)
            fh.write(_ROWS.pack(matrix.shape[0]))
            fh.write(matrix.tobytes())
