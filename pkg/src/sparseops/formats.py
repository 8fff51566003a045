"""CSR and COO sparse storage with validated construction and conversion.

Both formats keep entries in canonical order (lexicographic by (row, col),
no duplicates); kernels rely on it.  Matrices are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import numpy as np

from .core import DenseMatrix, Device, IndexWidth, Precision
from .errors import IndexBoundsError, InvalidArgumentError
from .linop import LinOp, spmv_coo, spmv_csr

__all__ = [
    "CooMatrix",
    "CsrMatrix",
    "coo_from_arrays",
    "coo_from_triplets",
    "csr_from_coo",
    "coo_from_csr",
    "csr_from_dense",
    "validate",
]


class _SparseBase(LinOp):
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def device(self) -> Device:
        return self._device

    @property
    def precision(self) -> Precision:
        return Precision.from_dtype(self.values.dtype)

    @property
    def index_width(self) -> IndexWidth:
        return IndexWidth.from_dtype(self.col_idxs.dtype)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def to_dense(self) -> np.ndarray:
        """Dense float64 reconstruction; intended for tests and small sizes."""
        out = np.zeros((self.rows, self.cols))
        rows, cols, vals = self._entries()
        np.add.at(out, (rows, cols), vals)
        return out


class CooMatrix(_SparseBase):
    """Coordinate storage: parallel arrays (row_idxs, col_idxs, values)."""

    __slots__ = ("_device", "rows", "cols", "row_idxs", "col_idxs", "values")

    def __init__(self, device, rows, cols, row_idxs, col_idxs, values):
        self._device = device
        self.rows = int(rows)
        self.cols = int(cols)
        self.row_idxs = np.asarray(row_idxs)
        self.col_idxs = np.asarray(col_idxs)
        self.values = np.asarray(values)
        if not (len(self.row_idxs) == len(self.col_idxs) == len(self.values)):
            raise InvalidArgumentError("row_idxs, col_idxs and values must have equal length")
        if self.row_idxs.dtype != self.col_idxs.dtype:
            raise InvalidArgumentError("index arrays must share one width")

    def _entries(self):
        return self.row_idxs, self.col_idxs, self.values

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        return spmv_coo(self, b, x)

    def __repr__(self):
        return f"CooMatrix({self.rows}x{self.cols}, nnz={self.nnz}, {self.precision.value})"


class CsrMatrix(_SparseBase):
    """Compressed sparse row storage: row_ptrs has length rows + 1."""

    __slots__ = ("_device", "rows", "cols", "row_ptrs", "col_idxs", "values")

    def __init__(self, device, rows, cols, row_ptrs, col_idxs, values):
        self._device = device
        self.rows = int(rows)
        self.cols = int(cols)
        self.row_ptrs = np.asarray(row_ptrs)
        self.col_idxs = np.asarray(col_idxs)
        self.values = np.asarray(values)
        if len(self.row_ptrs) != self.rows + 1:
            raise InvalidArgumentError(
                f"row_ptrs has length {len(self.row_ptrs)}, expected rows+1 = {self.rows + 1}"
            )
        if len(self.col_idxs) != len(self.values):
            raise InvalidArgumentError("col_idxs and values must have equal length")
        if self.row_ptrs.dtype != self.col_idxs.dtype:
            raise InvalidArgumentError("index arrays must share one width")

    def _entries(self):
        counts = np.diff(self.row_ptrs)
        rows = np.repeat(np.arange(self.rows), counts)
        return rows, self.col_idxs, self.values

    def row_slice(self, i: int) -> slice:
        return slice(int(self.row_ptrs[i]), int(self.row_ptrs[i + 1]))

    def diagonal(self) -> np.ndarray:
        """Stored main-diagonal values; structurally absent entries are 0."""
        n = min(self.rows, self.cols)
        diag = np.zeros(n, dtype=self.values.dtype)
        for i in range(n):
            sl = self.row_slice(i)
            k = np.searchsorted(self.col_idxs[sl], i) + sl.start
            if k < sl.stop and self.col_idxs[k] == i:
                diag[i] = self.values[k]
        return diag

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        return spmv_csr(self, b, x)

    def __repr__(self):
        return f"CsrMatrix({self.rows}x{self.cols}, nnz={self.nnz}, {self.precision.value})"


def coo_from_arrays(device, rows, cols, row_idxs, col_idxs, values,
                    precision: Precision = Precision.double,
                    index_width: IndexWidth = IndexWidth.i32) -> CooMatrix:
    """Canonicalize raw triplet arrays: bounds-check, sort lexicographically,
    and sum duplicate coordinates in their sorted (stable) order.  Explicit
    zeros are kept."""
    if rows < 0 or cols < 0:
        raise InvalidArgumentError("rows and cols must be non-negative")
    idt, vdt = index_width.dtype, precision.dtype
    ri = np.asarray(row_idxs, dtype=np.int64)
    ci = np.asarray(col_idxs, dtype=np.int64)
    vals = np.asarray(values, dtype=vdt)
    if ri.size == 0:
        return CooMatrix(device, rows, cols,
                         np.empty(0, idt), np.empty(0, idt), np.empty(0, vdt))
    bad = np.flatnonzero((ri < 0) | (ri >= rows) | (ci < 0) | (ci >= cols))
    if bad.size:
        k = int(bad[0])
        raise IndexBoundsError(
            f"triplet {k} at ({ri[k]}, {ci[k]}) outside {rows}x{cols}"
        )
    order = np.lexsort((ci, ri))
    ri, ci, vals = ri[order], ci[order], vals[order]
    keep = np.ones(len(ri), dtype=bool)
    keep[1:] = (ri[1:] != ri[:-1]) | (ci[1:] != ci[:-1])
    starts = np.flatnonzero(keep)
    ends = np.append(starts[1:], len(vals))
    summed = vals[starts].copy()
    # duplicates are summed strictly left to right in sorted (stable) order
    for idx in np.flatnonzero(ends - starts > 1):
        acc = vals[starts[idx]]
        for k in range(starts[idx] + 1, ends[idx]):
            acc = acc + vals[k]
        summed[idx] = acc
    return CooMatrix(device, rows, cols,
                     ri[starts].astype(idt), ci[starts].astype(idt), summed)


def coo_from_triplets(device, rows, cols, triplets,
                      precision: Precision = Precision.double,
                      index_width: IndexWidth = IndexWidth.i32) -> CooMatrix:
    """Build a canonical COO matrix from (row, col, value) triplets.

    Duplicate coordinates are summed, the usual assembly convention.
    """
    if len(triplets) == 0:
        return coo_from_arrays(device, rows, cols, [], [], [], precision, index_width)
    ri = [t[0] for t in triplets]
    ci = [t[1] for t in triplets]
    vals = [t[2] for t in triplets]
    return coo_from_arrays(device, rows, cols, ri, ci, vals, precision, index_width)


def csr_from_coo(m: CooMatrix) -> CsrMatrix:
    """Convert canonical COO to CSR; same logical matrix, device, precision."""
    idt = m.row_idxs.dtype
    counts = np.bincount(m.row_idxs, minlength=m.rows) if m.nnz else np.zeros(m.rows, np.int64)
    row_ptrs = np.zeros(m.rows + 1, dtype=idt)
    np.cumsum(counts, out=row_ptrs[1:])
    return CsrMatrix(m.device, m.rows, m.cols, row_ptrs,
                     m.col_idxs.copy(), m.values.copy())


def coo_from_csr(m: CsrMatrix) -> CooMatrix:
    """Convert CSR to canonical COO; same logical matrix, device, precision."""
    counts = np.diff(m.row_ptrs)
    row_idxs = np.repeat(np.arange(m.rows, dtype=m.col_idxs.dtype), counts)
    return CooMatrix(m.device, m.rows, m.cols, row_idxs,
                     m.col_idxs.copy(), m.values.copy())


def csr_from_dense(device, array, precision: Precision = Precision.double,
                   index_width: IndexWidth = IndexWidth.i32,
                   keep_zeros: bool = False) -> CsrMatrix:
    """Build a CSR matrix from a dense 2-D array (test and setup helper)."""
    a = np.asarray(array, dtype=np.float64)
    rows, cols = a.shape
    triplets = [(i, j, a[i, j]) for i in range(rows) for j in range(cols)
                if keep_zeros or a[i, j] != 0.0]
    return csr_from_coo(coo_from_triplets(device, rows, cols, triplets,
                                          precision, index_width))


def validate(m) -> list[str]:
    """Check every format invariant; returns all violations (empty = ok)."""
    out = []
    if isinstance(m, CsrMatrix):
        rp = m.row_ptrs
        if len(rp) and rp[0] != 0:
            out.append(f"row_ptrs[0] = {rp[0]}, expected 0")
        for i in range(1, len(rp)):
            if rp[i] < rp[i - 1]:
                out.append(f"non-decreasing row_ptrs at {i}")
        if len(rp) and rp[-1] != m.nnz:
            out.append(f"row_ptrs[rows] = {rp[-1]}, expected nnz = {m.nnz}")
        for i in range(m.rows):
            lo, hi = int(rp[i]), int(rp[i + 1])
            if lo < 0 or hi > m.nnz or hi < lo:
                continue  # already reported via the pointer checks above
            for k in range(lo, hi):
                j = m.col_idxs[k]
                if j < 0 or j >= m.cols:
                    out.append(f"column index {j} out of bounds at entry {k}")
                if k > lo and m.col_idxs[k] <= m.col_idxs[k - 1]:
                    out.append(f"columns not strictly increasing in row {i} at entry {k}")
    elif isinstance(m, CooMatrix):
        for k in range(m.nnz):
            i, j = int(m.row_idxs[k]), int(m.col_idxs[k])
            if i < 0 or i >= m.rows:
                out.append(f"row index {i} out of bounds at entry {k}")
            if j < 0 or j >= m.cols:
                out.append(f"column index {j} out of bounds at entry {k}")
            if k > 0:
                prev = (int(m.row_idxs[k - 1]), int(m.col_idxs[k - 1]))
                if (i, j) <= prev:
                    out.append(f"entries not sorted/unique at entry {k}")
    else:
        raise InvalidArgumentError(f"expected CsrMatrix or CooMatrix, got {type(m).__name__}")
    return out
