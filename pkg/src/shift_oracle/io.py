"""Matrix and label file formats.

Two matrix encodings:
  * CSV with header ``c0,...,c{k-1}`` followed by n numeric rows.
  * RawF32: 16-byte header (magic b"SHOR", little-endian u32 n, u32 k,
    u32 reserved = 0) followed by n*k little-endian float32, row-major.

Labels are a single-column CSV with header ``y``.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"SHOR"
_HEADER = struct.Struct("<4sIII")


def write_raw_f32(path, matrix) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise FormatError("RawF32 stores 2-D matrices only")
    n, k = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, k, 0))
        fh.write(matrix.tobytes())


def read_raw_f32(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, n, k, reserved = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic bytes {magic!r}")
    if reserved != 0:
        raise FormatError(f"{path}: nonzero reserved header field")
    expected = _HEADER.size + 4 * n * k
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(n, k).astype(float)


def write_csv_matrix(path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"c{j}" for j in range(matrix.shape[1])])
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])


def read_csv_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        k = len(header)
        if header != [f"c{j}" for j in range(k)]:
            raise FormatError(f"{path}: expected header c0,...,c{{k-1}}, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != k:
                raise FormatError(f"{path}:{lineno}: expected {k} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def load_matrix(path) -> np.ndarray:
    """Load a matrix file, sniffing RawF32 by its magic bytes, else CSV."""
    p = Path(path)
    if not p.exists():
        raise FormatError(f"{path}: no such file")
    with open(p, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_raw_f32(p)
    return read_csv_matrix(p)


def write_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=int)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"])
        for v in labels:
            writer.writerow([int(v)])


def read_labels(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if header != ["y"]:
            raise FormatError(f"{path}: expected single-column header 'y'")
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 1:
                raise FormatError(f"{path}:{lineno}: expected one field")
            try:
                values.append(int(row[0]))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not values:
        raise FormatError(f"{path}: no labels")
    return np.asarray(values, dtype=int)
