"""Matrix Market reading and writing for constraint matrices.

Supports exactly the two real general variants:

* ``%%MatrixMarket matrix coordinate real general`` (read into CSR), and
* ``%%MatrixMarket matrix array real general`` (column-major dense block).

Anything else (complex or pattern fields, symmetric storage, vectors) is a
:class:`ParseError` carrying the offending line number.  Values are written
with 17 significant digits so write/read round-trips reproduce float64
entries exactly.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .core import PolytopeInstance, build_instance
from .errors import ParseError

__all__ = ["read_matrix_market", "write_matrix_market"]

_HEADER_PREFIX = "%%matrixmarket"


def _tokens(text: str, lineno: int, count: int, what: str) -> list[str]:
    parts = text.split()
    if len(parts) != count:
        raise ParseError(f"expected {count} {what} fields, got {len(parts)}: {text.strip()!r}", lineno)
    return parts


def _to_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", lineno) from None


def _to_float(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", lineno) from None


def read_matrix_market(path) -> PolytopeInstance:
    """Read a constraint matrix and validate it as an instance.

    Raises :class:`ParseError` with a line number for malformed content;
    validation failures (zero rows, rank loss, bad shape) propagate from
    :func:`build_instance`.
    """
    with open(path, "r", encoding="ascii") as handle:
        lines = handle.read().splitlines()

    header_line = None
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip():
            header_line = (lineno, raw.strip())
            break
    if header_line is None:
        raise ParseError("empty file")

    lineno, header = header_line
    parts = header.lower().split()
    if len(parts) != 5 or parts[0] != _HEADER_PREFIX:
        raise ParseError(f"not a Matrix Market header: {header!r}", lineno)
    _, obj, layout, field, symmetry = parts
    if obj != "matrix":
        raise ParseError(f"unsupported object {obj!r} (only 'matrix')", lineno)
    if layout not in ("coordinate", "array"):
        raise ParseError(f"unsupported format {layout!r} (coordinate or array)", lineno)
    if field != "real":
        raise ParseError(f"unsupported field {field!r} (only 'real')", lineno)
    if symmetry != "general":
        raise ParseError(f"unsupported symmetry {symmetry!r} (only 'general')", lineno)

    body = [
        (no, raw.strip())
        for no, raw in enumerate(lines, start=1)
        if no > lineno and raw.strip() and not raw.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line")
    size_lineno, size_text = body[0]
    entries = body[1:]

    if layout == "coordinate":
        tokens = _tokens(size_text, size_lineno, 3, "size")
        m = _to_int(tokens[0], size_lineno, "row count")
        n = _to_int(tokens[1], size_lineno, "column count")
        nnz = _to_int(tokens[2], size_lineno, "entry count")
        if len(entries) != nnz:
            raise ParseError(f"expected {nnz} entries, file has {len(entries)}",
                             entries[-1][0] if entries else size_lineno)
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for k, (no, text) in enumerate(entries):
            toks = _tokens(text, no, 3, "coordinate entry")
            i = _to_int(toks[0], no, "row index")
            j = _to_int(toks[1], no, "column index")
            if not (1 <= i <= m and 1 <= j <= n):
                raise ParseError(f"index ({i}, {j}) outside {m} x {n}", no)
            rows[k], cols[k] = i - 1, j - 1
            vals[k] = _to_float(toks[2], no, "value")
        coo = sp.coo_array((vals, (rows, cols)), shape=(m, n))
        return build_instance(coo.tocsr(), m=m, n=n)

    tokens = _tokens(size_text, size_lineno, 2, "size")
    m = _to_int(tokens[0], size_lineno, "row count")
    n = _to_int(tokens[1], size_lineno, "column count")
    if len(entries) != m * n:
        raise ParseError(f"expected {m * n} entries, file has {len(entries)}",
                         entries[-1][0] if entries else size_lineno)
    vals = np.empty(m * n)
    for k, (no, text) in enumerate(entries):
        toks = _tokens(text, no, 1, "array entry")
        vals[k] = _to_float(toks[0], no, "value")
    dense = vals.reshape((n, m)).T  # array format lists columns first
    return build_instance(dense, m=m, n=n)


def write_matrix_market(path, inst: PolytopeInstance) -> None:
    """Write an instance in the matching real general variant."""
    with open(path, "w", encoding="ascii") as handle:
        if inst.is_sparse:
            matrix = inst.matrix.tocoo()
            handle.write("%%MatrixMarket matrix coordinate real general\n")
            handle.write(f"{inst.m} {inst.n} {matrix.nnz}\n")
            order = np.lexsort((matrix.col, matrix.row))
            for i, j, v in zip(matrix.row[order], matrix.col[order], matrix.data[order]):
                handle.write(f"{i + 1} {j + 1} {v:.17g}\n")
        else:
            handle.write("%%MatrixMarket matrix array real general\n")
            handle.write(f"{inst.m} {inst.n}\n")
            for col in range(inst.n):
                for row in range(inst.m):
                    handle.write(f"{inst.matrix[row, col]:.17g}\n")
