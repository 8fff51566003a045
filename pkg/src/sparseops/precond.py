"""Preconditioners: Jacobi (diagonal scaling), ILU(0), and IC(0).

The incomplete factorizations run sequentially on every device; their
row-by-row dependency structure leaves nothing worth threading.  All
preconditioner objects are LinOps and immutable after construction.
"""

from __future__ import annotations

import numpy as np

from .core import DenseMatrix, Device, dense_create
from .errors import (
    DimensionMismatchError,
    IndefinitePivotError,
    SingularDiagonalError,
    UnsupportedFeatureError,
    ZeroPivotError,
)
from .formats import CsrMatrix, coo_from_arrays, csr_from_coo
from .linop import LinOp, solve_lower_tri, solve_upper_tri

__all__ = [
    "JacobiPreconditioner",
    "IluFactors",
    "IcFactor",
    "jacobi_create",
    "ilu0_factorize",
    "ic0_factorize",
    "ilu_apply",
    "ic_apply",
]


def _require_square(a: CsrMatrix):
    if a.rows != a.cols:
        raise DimensionMismatchError(f"expected a square matrix, got {a.rows}x{a.cols}")


class JacobiPreconditioner(LinOp):
    """Pointwise Jacobi: apply divides elementwise by the matrix diagonal."""

    def __init__(self, device: Device, inv_diag: np.ndarray, max_block_size: int = 1):
        self._device = device
        self.inv_diag = inv_diag
        self.max_block_size = max_block_size

    @property
    def shape(self):
        n = self.inv_diag.shape[0]
        return (n, n)

    @property
    def device(self):
        return self._device

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        if b.rows != self.inv_diag.shape[0]:
            raise DimensionMismatchError(
                f"expected vectors of length {self.inv_diag.shape[0]}, got {b.rows}"
            )
        np.multiply(b.array, self.inv_diag[:, None], out=x.array)
        return x


def jacobi_create(a: CsrMatrix, max_block_size: int = 1) -> JacobiPreconditioner:
    """Build a Jacobi preconditioner from the matrix diagonal.

    Only scalar blocks are supported; a larger block size is rejected rather
    than silently degraded.
    """
    if max_block_size != 1:
        raise UnsupportedFeatureError(
            f"block Jacobi (max_block_size={max_block_size}) is not supported; use 1"
        )
    _require_square(a)
    diag = a.diagonal()
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise SingularDiagonalError(int(zero[0]))
    inv = (1.0 / diag.astype(np.float64)).astype(a.values.dtype)
    if not np.all(np.isfinite(inv)):
        raise SingularDiagonalError(int(np.flatnonzero(~np.isfinite(inv))[0]))
    return JacobiPreconditioner(a.device, inv, max_block_size)


# ---------------------------------------------------------------------------
# incomplete factorizations


def _row_maps(a: CsrMatrix):
    """Per-row {col: value-array position} lookups."""
    maps = []
    for i in range(a.rows):
        sl = a.row_slice(i)
        maps.append({int(a.col_idxs[k]): k for k in range(sl.start, sl.stop)})
    return maps


class IluFactors(LinOp):
    """ILU(0) factors; L is unit lower triangular with the unit diagonal
    implicit, U is upper triangular including the diagonal.  apply performs
    x = U^{-1}(L^{-1} b)."""

    def __init__(self, l: CsrMatrix, u: CsrMatrix):
        self.l = l
        self.u = u

    @property
    def shape(self):
        return self.l.shape

    @property
    def device(self):
        return self.l.device

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        y = dense_create(self.device, b.rows, b.cols, b.precision, 0.0)
        solve_lower_tri(self.l, b, y, unit_diag=True)
        solve_upper_tri(self.u, y, x)
        return x


class IcFactor(LinOp):
    """IC(0) factor; L is lower triangular with a positive diagonal.  apply
    performs x = L^{-T}(L^{-1} b)."""

    def __init__(self, l: CsrMatrix):
        self.l = l
        self._lt = _csr_transpose(l)

    @property
    def shape(self):
        return self.l.shape

    @property
    def device(self):
        return self.l.device

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        y = dense_create(self.device, b.rows, b.cols, b.precision, 0.0)
        solve_lower_tri(self.l, b, y, unit_diag=False)
        solve_upper_tri(self._lt, y, x)
        return x


def _csr_transpose(m: CsrMatrix) -> CsrMatrix:
    counts = np.diff(m.row_ptrs)
    rows = np.repeat(np.arange(m.rows, dtype=np.int64), counts)
    coo = coo_from_arrays(m.device, m.cols, m.rows, m.col_idxs, rows, m.values,
                          m.precision, m.index_width)
    return csr_from_coo(coo)


def ilu0_factorize(a: CsrMatrix) -> IluFactors:
    """Incomplete LU with zero fill-in: IKJ elimination restricted to the
    stored pattern of A.  No pivoting; a zero pivot is a hard error naming
    the row."""
    _require_square(a)
    n = a.rows
    vals = a.values.copy()
    cols = a.col_idxs
    maps = _row_maps(a)
    diag_pos = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        diag_pos[i] = maps[i].get(i, -1)
    for i in range(n):
        sl = a.row_slice(i)
        row_i = maps[i]
        for idx in range(sl.start, sl.stop):
            k = int(cols[idx])
            if k >= i:
                break
            dk = diag_pos[k]
            ukk = vals[dk] if dk >= 0 else 0.0
            if ukk == 0.0:
                raise ZeroPivotError(k)
            lik = vals[idx] / ukk
            vals[idx] = lik
            # a_ij -= l_ik * u_kj over row k's upper entries present in row i
            sk = a.row_slice(k)
            for idx2 in range(dk + 1, sk.stop):
                j = int(cols[idx2])
                pos = row_i.get(j)
                if pos is not None:
                    vals[pos] -= lik * vals[idx2]
        dp = diag_pos[i]
        if dp < 0 or vals[dp] == 0.0:
            raise ZeroPivotError(i)
    return IluFactors(*_split_lu(a, vals))


def _split_lu(a: CsrMatrix, vals: np.ndarray) -> tuple[CsrMatrix, CsrMatrix]:
    idt = a.col_idxs.dtype
    n = a.rows
    l_ptrs = np.zeros(n + 1, dtype=idt)
    u_ptrs = np.zeros(n + 1, dtype=idt)
    l_cols, l_vals, u_cols, u_vals = [], [], [], []
    for i in range(n):
        sl = a.row_slice(i)
        for k in range(sl.start, sl.stop):
            j = int(a.col_idxs[k])
            if j < i:
                l_cols.append(j)
                l_vals.append(vals[k])
            else:
                u_cols.append(j)
                u_vals.append(vals[k])
        l_ptrs[i + 1] = len(l_cols)
        u_ptrs[i + 1] = len(u_cols)
    vdt = a.values.dtype
    l = CsrMatrix(a.device, n, n, l_ptrs, np.asarray(l_cols, idt), np.asarray(l_vals, vdt))
    u = CsrMatrix(a.device, n, n, u_ptrs, np.asarray(u_cols, idt), np.asarray(u_vals, vdt))
    return l, u


def ic0_factorize(a: CsrMatrix) -> IcFactor:
    """Incomplete Cholesky with zero fill-in on the lower triangle of A.

    Expects a symmetric matrix with a positive diagonal on the pattern; a
    non-positive pivot is a hard error naming the row.
    """
    _require_square(a)
    n = a.rows
    # lower-triangle pattern of A, one (cols, values) pair per row
    l_cols: list[list[int]] = []
    l_vals: list[list[float]] = []
    for i in range(n):
        sl = a.row_slice(i)
        cols_i = [int(c) for c in a.col_idxs[sl.start:sl.stop] if c <= i]
        l_cols.append(cols_i)
        l_vals.append([0.0] * len(cols_i))
    maps = _row_maps(a)
    for i in range(n):
        cols_i = l_cols[i]
        vals_i = l_vals[i]
        for pos, j in enumerate(cols_i):
            aij = float(a.values[maps[i][j]]) if j in maps[i] else 0.0
            # s = a_ij - sum_k l_ik * l_jk over shared columns k < j
            s = aij
            pi, pj = 0, 0
            cols_j = l_cols[j]
            vals_j = l_vals[j]
            while pi < len(cols_i) and pj < len(cols_j):
                ci, cj = cols_i[pi], cols_j[pj]
                if ci >= j or cj >= j:
                    break
                if ci == cj:
                    s -= vals_i[pi] * vals_j[pj]
                    pi += 1
                    pj += 1
                elif ci < cj:
                    pi += 1
                else:
                    pj += 1
            if j == i:
                if s <= 0.0:
                    raise IndefinitePivotError(i, f"pivot {s} at row {i}")
                vals_i[pos] = np.sqrt(s)
            else:
                ljj = vals_j[-1]  # diagonal is the last lower entry of row j
                if cols_j[-1] != j or ljj == 0.0:
                    raise IndefinitePivotError(j, f"missing or zero diagonal at row {j}")
                vals_i[pos] = s / ljj
        if not cols_i or cols_i[-1] != i:
            raise IndefinitePivotError(i, f"missing diagonal at row {i}")
    idt = a.col_idxs.dtype
    vdt = a.values.dtype
    ptrs = np.zeros(n + 1, dtype=idt)
    flat_cols: list[int] = []
    flat_vals: list[float] = []
    for i in range(n):
        flat_cols.extend(l_cols[i])
        flat_vals.extend(l_vals[i])
        ptrs[i + 1] = len(flat_cols)
    l = CsrMatrix(a.device, n, n, ptrs, np.asarray(flat_cols, idt), np.asarray(flat_vals, vdt))
    return IcFactor(l)


def ilu_apply(factors: IluFactors, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
    """x = U^{-1}(L^{-1} b)."""
    return factors.apply(b, x)


def ic_apply(factor: IcFactor, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
    """x = L^{-T}(L^{-1} b)."""
    return factor.apply(b, x)
