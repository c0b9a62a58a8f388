"""Plain-text matrix and vector formats.

Two interchangeable formats are supported everywhere:

* ``csv``: headerless comma-separated rows, one matrix row per line.  A
  vector is a single line (a one-row file), though a single-column file is
  accepted on read.  Lines starting with ``#`` and blank lines are skipped.
* ``structured``: JSON-encoded; a matrix is an object
  ``{"rows": m, "cols": n, "data": [[...], ...]}`` (extra keys are ignored)
  and a vector is a flat array ``[x1, x2, ...]``.

Readers sniff the format from the first non-whitespace character, so callers
never declare the input format explicitly.  All floats are written with
``repr``, the shortest string that round-trips to the same double.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import FormatError


def float_repr(x: float) -> str:
    """Shortest decimal string that parses back to exactly the same float."""
    return repr(float(x))


def _parse_csv_rows(text: str) -> list[list[float]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = []
        for token in stripped.split(","):
            token = token.strip()
            try:
                row.append(float(token))
            except ValueError:
                raise FormatError(f"line {lineno}: {token!r} is not a number") from None
        rows.append(row)
    if not rows:
        raise FormatError("no data rows found")
    width = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(
                f"ragged rows: row 0 has {width} values, row {k} has {len(row)}"
            )
    return rows


def _json_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _parse_json_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError("matrix JSON must be an object with rows/cols/data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise FormatError(f"matrix JSON is missing {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise FormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows:
        raise FormatError(f"data must be a list of {rows} rows")
    out = np.empty((rows, cols))
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"data row {i} must be a list of {cols} numbers")
        for j, value in enumerate(row):
            out[i, j] = _json_number(value, f"data[{i}][{j}]")
    return out


def parse_matrix(text: str) -> np.ndarray:
    """Parse a matrix from csv or structured text, sniffing the format."""
    head = text.lstrip()[:1]
    if head == "{":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        return _parse_json_matrix(obj)
    if head == "[":
        raise FormatError("matrix JSON must be an object with rows/cols/data")
    return np.array(_parse_csv_rows(text))


def parse_vector(text: str) -> np.ndarray:
    """Parse a vector: a flat JSON array, or a one-row (or one-column) csv."""
    head = text.lstrip()[:1]
    if head == "[":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        if not isinstance(obj, list) or not obj:
            raise FormatError("vector JSON must be a non-empty flat array")
        return np.array([_json_number(v, f"[{k}]") for k, v in enumerate(obj)])
    if head == "{":
        raise FormatError("vector JSON must be a flat array, not an object")
    rows = _parse_csv_rows(text)
    if len(rows) == 1:
        return np.array(rows[0])
    if len(rows[0]) == 1:
        return np.array([row[0] for row in rows])
    raise FormatError(f"expected a vector, got a {len(rows)}x{len(rows[0])} matrix")


def format_matrix(matrix, fmt: str = "csv") -> str:
    """Serialize a matrix to csv or structured text (with a trailing newline)."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={arr.ndim}")
    if fmt == "csv":
        lines = [",".join(float_repr(x) for x in row) for row in arr]
        return "\n".join(lines) + "\n"
    if fmt == "structured":
        payload = {
            "rows": arr.shape[0],
            "cols": arr.shape[1],
            "data": [[float(x) for x in row] for row in arr],
        }
        return json.dumps(payload) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def format_vector(vector, fmt: str = "csv") -> str:
    """Serialize a vector to a single csv line or a flat structured array."""
    vec = np.asarray(vector, dtype=float)
    if vec.ndim != 1:
        raise ValueError(f"expected a 1-D array, got ndim={vec.ndim}")
    if fmt == "csv":
        return ",".join(float_repr(x) for x in vec) + "\n"
    if fmt == "structured":
        return json.dumps([float(x) for x in vec]) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
