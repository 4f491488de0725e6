"""CSV interchange: matrices and observation records, written deterministically.

Matrices are plain rectangular numeric CSV, no header, row-major; observation
files hold one record per row. Floats are serialized with Python's
shortest-roundtrip repr, so write-then-read reproduces every value exactly and
output bytes do not depend on platform or locale.
"""

from __future__ import annotations

import numpy as np

from .errors import CovestError


class DataFormatError(CovestError):
    """File contents are not a rectangular numeric table."""


def format_float(x: float) -> str:
    return repr(float(x))


def _parse_table(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: non-numeric entry ({exc})") from exc
    if not rows:
        raise DataFormatError(f"{path}: empty table")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataFormatError(f"{path}: ragged rows (expected width {width})")
    return np.asarray(rows, dtype=float)


def read_matrix(path) -> np.ndarray:
    """Read a numeric CSV as a 2-d float array."""
    return _parse_table(path)


def read_records(path) -> np.ndarray:
    """Read an observation CSV: one record per row, shape (m, n)."""
    return _parse_table(path)


def write_matrix(path, a) -> None:
    """Write a 2-d array as headerless CSV with exact-roundtrip floats."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in a:
            fh.write(",".join(format_float(x) for x in row))
            fh.write("\n")


def write_table(path, header, rows) -> None:
    """Write a headed CSV; floats get exact-roundtrip formatting, None is blank."""

    def cell(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return format_float(x)
        return str(x)

    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header))
        fh.write("\n")
        for row in rows:
            fh.write(",".join(cell(x) for x in row))
            fh.write("\n")
