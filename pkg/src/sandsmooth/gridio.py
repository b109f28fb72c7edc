"""File formats for the command-line tools.

Three CSV layouts cover the data shapes: a grid table whose header row
tags column coordinates as ``z:<coord>`` and whose first column tags
row coordinates as ``x:<coord>``; a three-column ``x,z,y`` scatter
list; and a curves table with one curve per row under a ``t:<coord>``
header.  Summaries are single JSON objects.  Arrays of dimension three
or more use the binary ``.npy`` format, which has no natural
coordinate-tagged text layout.

Every number is written with 17 significant digits so that files
round-trip bit-identically through float64.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = [
    "FileFormatError",
    "read_curves_csv",
    "read_grid_csv",
    "read_scatter_csv",
    "write_curves_csv",
    "write_grid_csv",
    "write_json",
    "write_long_csv",
    "write_scatter_csv",
]


class FileFormatError(ValueError):
    """Malformed input file; the message carries the line number."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _float(field: str, path: str, lineno: int) -> float:
    try:
        return float(field)
    except ValueError:
        raise FileFormatError(
            f"{path}:{lineno}: expected a number, got {field!r}"
        ) from None


def _tagged(field: str, tag: str, path: str, lineno: int) -> float:
    if not field.startswith(tag + ":"):
        raise FileFormatError(
            f"{path}:{lineno}: expected '{tag}:<coord>', got {field!r}"
        )
    return _float(field[len(tag) + 1 :], path, lineno)


def _read_lines(path: str) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\r\n").split(",") for line in fh if line.strip()]


def write_grid_csv(path, x, z, values) -> None:
    """Grid table: corner cell empty, columns z-tagged, rows x-tagged."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("," + ",".join("z:" + _fmt(c) for c in z) + "\n")
        for xi, row in zip(x, values):
            fh.write("x:" + _fmt(xi) + "," + ",".join(map(_fmt, row)) + "\n")


def read_grid_csv(path):
    """Parse a grid table back into (x, z, values)."""
    rows = _read_lines(path)
    if not rows:
        raise FileFormatError(f"{path}:1: empty file")
    header = rows[0]
    if header[0].strip():
        raise FileFormatError(
            f"{path}:1: grid header must start with an empty corner cell"
        )
    z = np.array([_tagged(f, "z", path, 1) for f in header[1:]])
    if z.size == 0:
        raise FileFormatError(f"{path}:1: no z-tagged columns")
    x = np.empty(len(rows) - 1)
    values = np.empty((len(rows) - 1, z.size))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != z.size + 1:
            raise FileFormatError(
                f"{path}:{r}: expected {z.size + 1} fields, got {len(row)}"
            )
        x[r - 2] = _tagged(row[0], "x", path, r)
        values[r - 2] = [_float(f, path, r) for f in row[1:]]
    return x, z, values


def write_scatter_csv(path, x, z, y) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,z,y\n")
        for xi, zi, yi in zip(x, z, y):
            fh.write(f"{_fmt(xi)},{_fmt(zi)},{_fmt(yi)}\n")


def read_scatter_csv(path):
    """Parse an x,z,y table back into three arrays."""
    rows = _read_lines(path)
    if not rows:
        raise FileFormatError(f"{path}:1: empty file")
    if [f.strip() for f in rows[0]] != ["x", "z", "y"]:
        raise FileFormatError(f"{path}:1: header must be 'x,z,y'")
    out = np.empty((len(rows) - 1, 3))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise FileFormatError(f"{path}:{r}: expected 3 fields, got {len(row)}")
        out[r - 2] = [_float(f, path, r) for f in row]
    return out[:, 0], out[:, 1], out[:, 2]


def write_curves_csv(path, t, Y) -> None:
    """One curve per row under a t-tagged coordinate header."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join("t:" + _fmt(c) for c in t) + "\n")
        for row in Y:
            fh.write(",".join(map(_fmt, row)) + "\n")


def read_curves_csv(path):
    """Parse a curves table back into (t, Y) with one curve per row."""
    rows = _read_lines(path)
    if not rows:
        raise FileFormatError(f"{path}:1: empty file")
    t = np.array([_tagged(f, "t", path, 1) for f in rows[0]])
    if len(rows) < 2:
        raise FileFormatError(f"{path}:2: no curves after the header")
    Y = np.empty((len(rows) - 1, t.size))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != t.size:
            raise FileFormatError(
                f"{path}:{r}: expected {t.size} fields, got {len(row)}"
            )
        Y[r - 2] = [_float(f, path, r) for f in row]
    return t, Y


def write_long_csv(path, header, rows) -> None:
    """Tidy long-format table; floats at full precision, strings as-is."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(f if isinstance(f, str) else _fmt(f) for f in row) + "\n"
            )


def write_json(path, obj) -> None:
    """Single sorted JSON object; floats keep shortest round-trip form."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
