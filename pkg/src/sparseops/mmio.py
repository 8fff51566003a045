"""Matrix Market text I/O.

Reads coordinate and array files with real/integer/pattern fields and
general/symmetric/skew-symmetric storage; writes coordinate/real/general.
Written values use %.17g, so a write/read round trip is bit exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Device, IndexWidth, Precision
from .errors import (
    EntryCountError,
    IndexBoundsError,
    MalformedBannerError,
    MalformedSizeError,
    MatrixMarketError,
    UnsupportedFieldError,
)
from .formats import coo_from_arrays, csr_from_coo

__all__ = [
    "MatrixMarketHeader",
    "DuplicateEntryWarning",
    "read_matrix_market",
    "write_matrix_market",
]

_BANNER = "%%matrixmarket"
_FORMATS = ("coordinate", "array")
_FIELDS = ("real", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric")


class DuplicateEntryWarning(UserWarning):
    """A coordinate file repeated a (row, col) position; values were summed."""


@dataclass(frozen=True)
class MatrixMarketHeader:
    object: str
    format: str
    field: str
    symmetry: str


def _parse_banner(line: str) -> MatrixMarketHeader:
    tokens = line.strip().lower().split()
    if not tokens or tokens[0] != _BANNER:
        raise MalformedBannerError(f"not a Matrix Market banner: {line.strip()!r}")
    if len(tokens) != 5:
        raise MalformedBannerError(f"banner needs 5 tokens, got {len(tokens)}")
    _, obj, fmt, field, sym = tokens
    if obj != "matrix":
        raise MalformedBannerError(f"unsupported object {obj!r}")
    if fmt not in _FORMATS:
        raise MalformedBannerError(f"unsupported format {fmt!r}")
    if field == "complex":
        raise UnsupportedFieldError("complex matrices are not supported")
    if field not in _FIELDS:
        raise MalformedBannerError(f"unsupported field {field!r}")
    if sym not in _SYMMETRIES:
        raise MalformedBannerError(f"unsupported symmetry {sym!r}")
    if fmt == "array" and field == "pattern":
        raise MalformedBannerError("pattern field requires coordinate format")
    return MatrixMarketHeader("matrix", fmt, field, sym)


def _next_data_line(fh) -> str | None:
    for raw in fh:
        line = raw.strip()
        if line and not line.startswith("%"):
            return line
    return None


def _parse_size(line: str, fmt: str):
    parts = line.split()
    want = 3 if fmt == "coordinate" else 2
    if len(parts) != want:
        raise MalformedSizeError(f"size line needs {want} integers, got {line!r}")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise MalformedSizeError(f"size line is not integral: {line!r}") from None
    if any(n < 0 for n in nums):
        raise MalformedSizeError(f"negative size: {line!r}")
    return nums


def _load_body(fh, columns: int) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # empty input is legal for nnz = 0
        try:
            data = np.loadtxt(fh, comments="%", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise MatrixMarketError(f"cannot parse entry data: {exc}") from None
    if data.size == 0:
        return np.empty((0, columns))
    if data.shape[1] != columns:
        raise MatrixMarketError(
            f"entries need {columns} tokens per line, got {data.shape[1]}"
        )
    return data


def _coordinate_entries(fh, header, rows, cols, nnz):
    pattern = header.field == "pattern"
    data = _load_body(fh, 2 if pattern else 3)
    if data.shape[0] != nnz:
        raise EntryCountError(f"declared {nnz} entries, file has {data.shape[0]}")
    fi, fj = data[:, 0], data[:, 1]
    ri = fi.astype(np.int64)
    ci = fj.astype(np.int64)
    if np.any(fi != ri) or np.any(fj != ci):
        raise MatrixMarketError("non-integral coordinate index")
    outside = (ri < 1) | (ri > rows) | (ci < 1) | (ci > cols)
    if np.any(outside):
        k = int(np.flatnonzero(outside)[0])
        raise IndexBoundsError(
            f"entry ({ri[k]}, {ci[k]}) outside declared {rows}x{cols}"
        )
    vals = np.ones(nnz) if pattern else data[:, 2].copy()
    return ri - 1, ci - 1, vals


def _array_entries(fh, header, rows, cols):
    # array bodies store one column-major value per line; tolerate several
    # per line by flattening
    values = []
    for raw in fh:
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise MatrixMarketError(f"cannot parse array value {tok!r}") from None
    if header.symmetry == "general":
        expected = rows * cols
    elif header.symmetry == "symmetric":
        expected = rows * (rows + 1) // 2
    else:  # skew-symmetric stores the strictly lower triangle
        expected = rows * (rows - 1) // 2
    if len(values) != expected:
        raise EntryCountError(f"declared {expected} array values, file has {len(values)}")
    ri, ci, vals = [], [], []
    k = 0
    for j in range(cols):
        if header.symmetry == "general":
            i0 = 0
        elif header.symmetry == "symmetric":
            i0 = j
        else:
            i0 = j + 1
        for i in range(i0, rows):
            ri.append(i)
            ci.append(j)
            vals.append(values[k])
            k += 1
    return np.asarray(ri, np.int64), np.asarray(ci, np.int64), np.asarray(vals)


def _expand_symmetry(ri, ci, vals, symmetry):
    if symmetry == "general" or ri.size == 0:
        return ri, ci, vals
    off = ri != ci
    sign = -1.0 if symmetry == "skew-symmetric" else 1.0
    return (np.concatenate([ri, ci[off]]),
            np.concatenate([ci, ri[off]]),
            np.concatenate([vals, sign * vals[off]]))


def _warn_duplicates(ri, ci, cols):
    if ri.size < 2:
        return
    keys = np.sort(ri * max(cols, 1) + ci)
    dup = np.flatnonzero(keys[1:] == keys[:-1])
    if dup.size:
        key = int(keys[dup[0]])
        i, j = divmod(key, max(cols, 1))
        warnings.warn(
            f"duplicate entry at ({i + 1}, {j + 1}); duplicates are summed",
            DuplicateEntryWarning,
            stacklevel=3,
        )


def read_matrix_market(device: Device, path, precision: Precision = Precision.double,
                       format: str = "Csr",
                       index_width: IndexWidth = IndexWidth.i32):
    """Read a Matrix Market file into CSR or COO storage.

    1-based indices become 0-based; symmetric/skew-symmetric storage is
    expanded to the full matrix (skew mirrors off-diagonals with negation);
    pattern entries read as 1.0.  Duplicate coordinates warn and are summed.
    Comment and blank lines are skipped anywhere after the banner.
    """
    fmt = str(format).lower()
    if fmt not in ("csr", "coo"):
        raise MatrixMarketError(f"unknown target format {format!r}; expected 'Csr' or 'Coo'")
    with open(path, "r", encoding="ascii") as fh:
        banner = fh.readline()
        if not banner:
            raise MalformedBannerError("empty file")
        header = _parse_banner(banner)
        size_line = _next_data_line(fh)
        if size_line is None:
            raise MalformedSizeError("missing size line")
        if header.format == "coordinate":
            rows, cols, nnz = _parse_size(size_line, "coordinate")
            if header.symmetry != "general" and rows != cols:
                raise MalformedSizeError(
                    f"{header.symmetry} storage requires a square matrix, got {rows}x{cols}"
                )
            ri, ci, vals = _coordinate_entries(fh, header, rows, cols, nnz)
        else:
            rows, cols = _parse_size(size_line, "array")
            if header.symmetry != "general" and rows != cols:
                raise MalformedSizeError(
                    f"{header.symmetry} storage requires a square matrix, got {rows}x{cols}"
                )
            ri, ci, vals = _array_entries(fh, header, rows, cols)
    ri, ci, vals = _expand_symmetry(ri, ci, vals, header.symmetry)
    _warn_duplicates(ri, ci, cols)
    coo = coo_from_arrays(device, rows, cols, ri, ci, vals, precision, index_width)
    return csr_from_coo(coo) if fmt == "csr" else coo


def write_matrix_market(m, path) -> None:
    """Write a matrix as coordinate/real/general with 1-based indices."""
    rows, cols, vals = m._entries()
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{m.rows} {m.cols} {m.nnz}\n")
        fh.writelines(
            "%d %d %.17g\n" % (i + 1, j + 1, v)
            for i, j, v in zip(rows, cols, vals)
        )
