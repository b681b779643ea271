"""File I/O for the CLI: headerless CSV matrices with shortest-round-trip
decimals, JSON reports, and atomic writes (temp file + rename) so partial
output never lands at the destination path.
"""

import json
import math
import os
import tempfile

import numpy as np

__all__ = [
    "MatrixIOError",
    "read_matrix_csv",
    "write_matrix_csv",
    "write_json",
    "write_text_atomic",
    "format_float",
]


class MatrixIOError(ValueError):
    """A matrix file failed to parse; the message carries the line number."""


def format_float(x):
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def read_matrix_csv(path):
    """Parse a headerless CSV of numbers into a matrix.

    Ragged rows, non-numeric fields, non-finite values, and empty files all
    raise MatrixIOError naming the offending line.
    """
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise MatrixIOError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(fields)}"
                )
            row = []
            for field in fields:
                try:
                    value = float(field)
                except ValueError:
                    raise MatrixIOError(
                        f"{path}: line {lineno}: {field!r} is not a number"
                    ) from None
                if not math.isfinite(value):
                    raise MatrixIOError(
                        f"{path}: line {lineno}: non-finite value {field!r}"
                    )
                row.append(value)
            rows.append(row)
    if not rows:
        raise MatrixIOError(f"{path}: empty matrix file")
    return np.array(rows, dtype=float)


def write_text_atomic(path, text):
    """Write text to path via a same-directory temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_csv(path, M):
    """Write a matrix as headerless CSV, one row per line."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    lines = [",".join(format_float(x) for x in row) for row in M]
    write_text_atomic(path, "\n".join(lines) + "\n")


def _jsonable(value):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return _jsonable(float(value))
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def write_json(path, payload):
    """Write a JSON report atomically; non-finite floats become strings so
    the output stays standard JSON."""
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    write_text_atomic(path, text + "\n")
