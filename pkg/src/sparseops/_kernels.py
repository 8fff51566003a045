"""Compiled numerical kernels.

Each kernel operates on an explicit contiguous range so callers can partition
work across threads; per-element and per-row evaluation order is fixed, which
makes results independent of how the ranges are assigned to threads.  Kernels
are compiled lazily once per (value dtype, index dtype) combination and run
without the GIL.  Scalar accumulation happens in double precision; stores cast
back to the buffer's own dtype.
"""

from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def fill_rows(a, lo, hi, value):
    for i in range(lo, hi):
        for j in range(a.shape[1]):
            a[i, j] = value


@njit(**_JIT)
def copy_rows(src, dst, lo, hi):
    for i in range(lo, hi):
        for j in range(src.shape[1]):
            dst[i, j] = src[i, j]


@njit(**_JIT)
def axpy_rows(alpha, x, y, lo, hi):
    for i in range(lo, hi):
        for j in range(x.shape[1]):
            y[i, j] = alpha * x[i, j] + y[i, j]


@njit(**_JIT)
def scal_rows(alpha, x, lo, hi):
    for i in range(lo, hi):
        for j in range(x.shape[1]):
            x[i, j] = alpha * x[i, j]


@njit(**_JIT)
def dot_range(x, y, lo, hi):
    acc = 0.0
    for i in range(lo, hi):
        acc += x[i] * y[i]
    return acc


@njit(**_JIT)
def gemv_rows(a, b, x, lo, hi):
    # dense row-major matvec, one sequential accumulation per row
    for i in range(lo, hi):
        acc = 0.0
        for j in range(a.shape[1]):
            acc += a[i, j] * b[j]
        x[i] = acc


@njit(**_JIT)
def spmv_csr_rows(row_ptrs, col_idxs, values, b, x, lo, hi):
    for i in range(lo, hi):
        acc = 0.0
        for k in range(row_ptrs[i], row_ptrs[i + 1]):
            acc += values[k] * b[col_idxs[k]]
        x[i] = acc


@njit(**_JIT)
def zero_range(x, lo, hi):
    for i in range(lo, hi):
        x[i] = 0.0


@njit(**_JIT)
def spmv_coo_entries(row_idxs, col_idxs, values, b, x, e0, e1):
    # entries are sorted by row, so each row forms one contiguous run;
    # callers never split a run across ranges
    k = e0
    while k < e1:
        i = row_idxs[k]
        acc = 0.0
        while k < e1 and row_idxs[k] == i:
            acc += values[k] * b[col_idxs[k]]
            k += 1
        x[i] = acc


@njit(**_JIT)
def solve_lower(row_ptrs, col_idxs, values, b, x, unit_diag):
    # returns (0, -1) on success, (1, row) for an entry above the diagonal,
    # (2, row) for a structurally missing or numerically zero diagonal
    n = row_ptrs.shape[0] - 1
    for i in range(n):
        acc = b[i] + 0.0
        diag = 0.0
        has_diag = False
        for k in range(row_ptrs[i], row_ptrs[i + 1]):
            j = col_idxs[k]
            if j < i:
                acc -= values[k] * x[j]
            elif j == i:
                diag = values[k]
                has_diag = True
            else:
                return (1, i)
        if unit_diag:
            x[i] = acc
        else:
            if not has_diag or diag == 0.0:
                return (2, i)
            x[i] = acc / diag
    return (0, -1)


@njit(**_JIT)
def solve_upper(row_ptrs, col_idxs, values, b, x):
    n = row_ptrs.shape[0] - 1
    for i in range(n - 1, -1, -1):
        acc = b[i] + 0.0
        diag = 0.0
        has_diag = False
        for k in range(row_ptrs[i], row_ptrs[i + 1]):
            j = col_idxs[k]
            if j > i:
                acc -= values[k] * x[j]
            elif j == i:
                diag = values[k]
                has_diag = True
            else:
                return (1, i)
        if not has_diag or diag == 0.0:
            return (2, i)
        x[i] = acc / diag
    return (0, -1)
