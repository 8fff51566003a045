"""The linear-operator contract and the SpMV / triangular-solve kernels.

Anything with a shape, a device, and an ``apply`` writing ``x = Op(b)`` is a
LinOp: storage formats, solvers, and preconditioners all share the contract,
which is what lets them compose into pipelines.
"""

from __future__ import annotations

import abc
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .core import (
    DenseMatrix,
    Device,
    _check_apply_shapes,
    dense_create,
    run_chunks,
    run_partitioned,
)
from .errors import (
    DimensionMismatchError,
    NotTriangularError,
    PrecisionMismatchError,
    SingularTriangleError,
)

if TYPE_CHECKING:
    from .formats import CooMatrix, CsrMatrix

__all__ = [
    "LinOp",
    "apply_advanced",
    "spmv_csr",
    "spmv_coo",
    "solve_lower_tri",
    "solve_upper_tri",
]


class LinOp(abc.ABC):
    """Abstract linear operator.

    Subclasses define ``shape``, ``device`` and ``apply``; ``apply_advanced``
    has a generic implementation in terms of ``apply``.
    """

    @property
    @abc.abstractmethod
    def shape(self) -> tuple[int, int]:
        """(rows, cols) of the operator."""

    @property
    def size(self) -> tuple[int, int]:
        """Alias of :attr:`shape`."""
        return self.shape

    @property
    @abc.abstractmethod
    def device(self) -> Device:
        """Device the operator executes on."""

    @abc.abstractmethod
    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        """Write x = Op(b) and return x."""

    def apply_advanced(self, alpha: float, b: DenseMatrix, beta: float,
                       x: DenseMatrix) -> DenseMatrix:
        """Write x := alpha*Op(b) + beta*x and return x."""
        return apply_advanced(self, alpha, b, beta, x)


# DenseMatrix implements the same contract without inheriting (it lives below
# this module); register it so isinstance(LinOp) holds.
LinOp.register(DenseMatrix)


def apply_advanced(op, alpha: float, b: DenseMatrix, beta: float,
                   x: DenseMatrix) -> DenseMatrix:
    """Generic x := alpha*op(b) + beta*x.

    beta = 0 overwrites x outright, so stale non-finite content in x cannot
    leak into the result.
    """
    from .core import axpy, copy_into, scal

    _check_apply_shapes(op.shape, b, x)
    t = dense_create(x.device, x.rows, x.cols, x.precision, 0.0)
    op.apply(b, t)
    if beta == 0:
        copy_into(t, x)
        scal(alpha, x)
    else:
        scal(beta, x)
        axpy(alpha, t, x)
    return x


def spmv_csr(a: "CsrMatrix", b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
    """x = A*b for CSR storage.

    Each row is one sequential accumulation over its stored entries; rows with
    no entries write 0.  On parallel-host devices rows are split into
    contiguous blocks, one per thread, so results are bitwise identical to the
    reference device.
    """
    _check_apply_shapes(a.shape, b, x)
    if a.values.dtype != b.values.dtype:
        raise PrecisionMismatchError(
            f"matrix/vector precision mismatch: {a.values.dtype} vs {b.values.dtype}"
        )
    for j in range(b.cols):
        bj, xj = b.column(j), x.column(j)
        run_partitioned(
            a.device, a.rows, a.nnz + a.rows,
            lambda lo, hi: _kernels.spmv_csr_rows(a.row_ptrs, a.col_idxs, a.values,
                                                  bj, xj, lo, hi))
    return x


def _coo_cuts(row_idxs: np.ndarray, nnz: int, threads: int) -> list[tuple[int, int]]:
    """Entry ranges for parallel COO SpMV: even cuts moved forward to the next
    row boundary, so every row's run stays within one range."""
    cuts = [0]
    for t in range(1, threads):
        c = t * nnz // threads
        while 0 < c < nnz and row_idxs[c] == row_idxs[c - 1]:
            c += 1
        cuts.append(max(c, cuts[-1]))
    cuts.append(nnz)
    return [(cuts[t], cuts[t + 1]) for t in range(threads)]


def spmv_coo(a: "CooMatrix", b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
    """x = A*b for COO storage; accumulation follows the stored (sorted) entry
    order, which per row coincides with CSR's, so the two formats agree
    bitwise."""
    _check_apply_shapes(a.shape, b, x)
    if a.values.dtype != b.values.dtype:
        raise PrecisionMismatchError(
            f"matrix/vector precision mismatch: {a.values.dtype} vs {b.values.dtype}"
        )
    nnz = a.nnz
    threads = a.device.thread_count
    if threads == 1 or nnz == 0:
        ranges = [(0, nnz)]
    else:
        ranges = _coo_cuts(a.row_idxs, nnz, threads)
    for j in range(b.cols):
        bj, xj = b.column(j), x.column(j)
        run_partitioned(a.device, a.rows, a.rows,
                        lambda lo, hi: _kernels.zero_range(xj, lo, hi))
        run_chunks(a.device, ranges, nnz,
                   lambda e0, e1: _kernels.spmv_coo_entries(a.row_idxs, a.col_idxs,
                                                            a.values, bj, xj, e0, e1))
    return x


def _check_square(a, b, x):
    rows, cols = a.shape
    if rows != cols:
        raise DimensionMismatchError(f"triangular solve needs a square matrix, got {a.shape}")
    _check_apply_shapes(a.shape, b, x)


def solve_lower_tri(l: "CsrMatrix", b: DenseMatrix, x: DenseMatrix,
                    unit_diag: bool = False) -> DenseMatrix:
    """Solve L*x = b by forward substitution, sequentially on every device
    (the row-to-row dependency chain leaves nothing to parallelize).

    With ``unit_diag`` the diagonal is implicitly 1 and stored diagonal
    entries are ignored as values but still forbidden above the diagonal.
    """
    _check_square(l, b, x)
    for j in range(b.cols):
        status, row = _kernels.solve_lower(l.row_ptrs, l.col_idxs, l.values,
                                           b.column(j), x.column(j), unit_diag)
        if status == 1:
            raise NotTriangularError(row, f"entry above the diagonal in row {row}")
        if status == 2:
            raise SingularTriangleError(row)
    return x


def solve_upper_tri(u: "CsrMatrix", b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
    """Solve U*x = b by backward substitution (sequential, see solve_lower_tri)."""
    _check_square(u, b, x)
    for j in range(b.cols):
        status, row = _kernels.solve_upper(u.row_ptrs, u.col_idxs, u.values,
                                           b.column(j), x.column(j))
        if status == 1:
            raise NotTriangularError(row, f"entry below the diagonal in row {row}")
        if status == 2:
            raise SingularTriangleError(row)
    return x
