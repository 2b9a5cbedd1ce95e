"""Plain-text CSV format for grid fields.

Line 1 holds ``n_i,n_j,min_i,max_i,min_j,max_j``.  Then come ``n_j`` lines,
one per ``j`` (ascending), each with ``n_i`` values for ``i`` ascending.
Floats are written with ``repr`` (shortest round-trip form), so reading a
written file reproduces the field exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FdmPinnError, ParseError
from .grid import ScalarField, make_grid


def format_float(x: float) -> str:
    return repr(float(x))


def write_field_csv(field: ScalarField, path) -> None:
    g = field.grid
    header = [str(g.n_i), str(g.n_j), *map(format_float, (*g.range_i, *g.range_j))]
    lines = [",".join(header)]
    for j in range(g.n_j):
        lines.append(",".join(format_float(v) for v in field.values[:, j]))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write field to {path}: {exc}") from exc


def _floats(tokens, line_no):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not _is_float(t))
        raise ParseError(f"non-numeric entry {bad!r}", line_no) from None


def _is_float(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def read_field_csv(path) -> ScalarField:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read field from {path}: {exc}") from exc
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty file", 1)

    head = [t.strip() for t in lines[0].split(",")]
    if len(head) != 6:
        raise ParseError(f"header needs 6 fields n_i,n_j,min_i,max_i,min_j,max_j, got {len(head)}", 1)
    try:
        n_i, n_j = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("node counts in header must be integers", 1) from None
    lo_i, hi_i, lo_j, hi_j = _floats(head[2:], 1)
    try:
        grid = make_grid(n_i, n_j, (lo_i, hi_i), (lo_j, hi_j))
    except FdmPinnError as exc:
        raise ParseError(f"invalid grid in header: {exc}", 1) from None

    values = np.empty((n_i, n_j))
    for j in range(n_j):
        line_no = j + 2
        if line_no > len(lines):
            raise ParseError(f"expected {n_j} data rows, file ends after {len(lines) - 1}",
                             len(lines) + 1)
        row = _floats([t.strip() for t in lines[line_no - 1].split(",")], line_no)
        if len(row) != n_i:
            raise ParseError(f"expected {n_i} values, got {len(row)}", line_no)
        values[:, j] = row
    if len(lines) > n_j + 1:
        raise ParseError(f"unexpected data after {n_j} rows", n_j + 2)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise ParseError(f"non-finite value at node {tuple(bad)}", int(bad[1]) + 2)
    return ScalarField(grid, values)
