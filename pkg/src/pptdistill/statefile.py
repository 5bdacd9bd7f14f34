"""Reading and writing ``.qstate.json`` operator files.

Layout::

    {
      "dim_a": 2,
      "dim_b": 2,
      "matrix": [[[re, im], ...], ...],
      "metadata": {"label": "...", "seed": 7, "generator": "werner"}
    }

Floats are written with 17 significant digits, so a parse/serialize cycle
reproduces the file byte for byte.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .operators import BipartiteOperator

SUFFIX = ".qstate.json"


class StateFileError(ValidationError):
    pass


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise StateFileError(f"cannot serialize non-finite value {x!r}")
    # adding 0.0 turns -0.0 into 0.0
    return format(x + 0.0, ".17g")


def dumps(op: BipartiteOperator, metadata: dict | None = None) -> str:
    rows = []
    for row in op.matrix:
        cells = ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in row)
        rows.append(f"    [{cells}]")
    parts = [
        "{",
        f'  "dim_a": {op.dim_a},',
        f'  "dim_b": {op.dim_b},',
        '  "matrix": [\n' + ",\n".join(rows) + "\n  ],",
        '  "metadata": ' + json.dumps(metadata or {}, sort_keys=True),
        "}",
    ]
    return "\n".join(parts) + "\n"


def dump(op: BipartiteOperator, path, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(op, metadata))


def _line_of(text: str, needle_index: int) -> int:
    return text.count("\n", 0, needle_index) + 1


def loads(text: str, source: str = "<string>") -> tuple[BipartiteOperator, dict]:
    """Parse a state document into an operator and its metadata.

    Raises
    ------
    StateFileError
        With the offending line where one can be identified.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise StateFileError(f"{source}: top level must be an object")
    for key in ("dim_a", "dim_b", "matrix"):
        if key not in doc:
            raise StateFileError(f"{source}: missing key {key!r}")
    da, db = doc["dim_a"], doc["dim_b"]
    if not (isinstance(da, int) and isinstance(db, int) and da >= 1 and db >= 1):
        raise StateFileError(f"{source}: dim_a and dim_b must be positive integers, got {da!r}, {db!r}")
    side = da * db
    mat = doc["matrix"]
    matrix_pos = text.find('"matrix"')
    if not isinstance(mat, list) or len(mat) != side:
        got = len(mat) if isinstance(mat, list) else type(mat).__name__
        raise StateFileError(
            f"{source}:{_line_of(text, matrix_pos)}: matrix has {got} rows, expected side {side} = {da}*{db}"
        )
    out = np.empty((side, side), dtype=complex)
    for r, row in enumerate(mat):
        if not isinstance(row, list) or len(row) != side:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise StateFileError(
                f"{source}:{_line_of(text, matrix_pos) + 1 + r}: row {r} has {got} entries, expected side {side}"
            )
        for c, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in cell)
            ):
                raise StateFileError(
                    f"{source}:{_line_of(text, matrix_pos) + 1 + r}: entry [{r}][{c}] must be [real, imaginary], got {cell!r}"
                )
            out[r, c] = complex(cell[0], cell[1])
    meta = doc.get("metadata") or {}
    if not isinstance(meta, dict):
        raise StateFileError(f"{source}: metadata must be an object")
    return BipartiteOperator(da, db, out), meta


def load(path) -> tuple[BipartiteOperator, dict]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: cannot read: {exc.strerror}") from None
    return loads(text, str(path))
