"""Shared fixture builders: structured test matrices and wrappers."""

import numpy as np

from sparseops import (
    CsrMatrix,
    DenseMatrix,
    IndexWidth,
    Precision,
    coo_from_triplets,
    csr_from_coo,
    csr_from_dense,
    dense_create,
    dense_from_array,
)


def vec(device, values, precision=Precision.double):
    return dense_from_array(device, np.asarray(values, dtype=precision.dtype).copy())


def zeros(device, n, precision=Precision.double):
    return dense_create(device, n, 1, precision, 0.0)


def laplacian_2d(device, p, precision=Precision.double, index_width=IndexWidth.i32):
    """Five-point stencil on a p x p grid with Dirichlet boundaries (n = p^2)."""
    n = p * p
    triplets = []
    for gy in range(p):
        for gx in range(p):
            i = gy * p + gx
            triplets.append((i, i, 4.0))
            if gx > 0:
                triplets.append((i, i - 1, -1.0))
            if gx < p - 1:
                triplets.append((i, i + 1, -1.0))
            if gy > 0:
                triplets.append((i, i - p, -1.0))
            if gy < p - 1:
                triplets.append((i, i + p, -1.0))
    return csr_from_coo(coo_from_triplets(device, n, n, triplets, precision, index_width))


def random_sparse(device, rng, rows, cols, density, precision=Precision.double,
                  index_width=IndexWidth.i32, fmt="csr"):
    """Random sparse matrix with unique positions and values in [-1, 1)."""
    nnz = max(0, int(round(density * rows * cols)))
    nnz = min(nnz, rows * cols)
    flat = rng.choice(rows * cols, size=nnz, replace=False) if nnz else np.empty(0, np.int64)
    vals = rng.uniform(-1.0, 1.0, size=nnz)
    triplets = [(int(f) // cols, int(f) % cols, v) for f, v in zip(flat, vals)]
    coo = coo_from_triplets(device, rows, cols, triplets, precision, index_width)
    return csr_from_coo(coo) if fmt == "csr" else coo


def random_diag_dominant(device, rng, n, density, precision=Precision.double):
    """Random sparse square matrix made strictly diagonally dominant."""
    base = random_sparse(device, rng, n, n, density, precision)
    dense = base.to_dense()
    np.fill_diagonal(dense, 0.0)
    row_sums = np.abs(dense).sum(axis=1)
    np.fill_diagonal(dense, row_sums + 1.0)
    return csr_from_dense(device, dense, precision)


def random_spd_dense(rng, n, shift=1.0):
    r = rng.standard_normal((n, n)) / np.sqrt(n)
    return r @ r.T + shift * np.eye(n)


def random_spd_csr(device, rng, n, precision=Precision.double, shift=1.0):
    return csr_from_dense(device, random_spd_dense(rng, n, shift), precision)


def spd_tridiagonal(device, rng, n, precision=Precision.double):
    """SPD tridiagonal: strong diagonal, random off-diagonals."""
    dense = np.zeros((n, n))
    off = rng.uniform(-0.4, 0.4, size=n - 1)
    for i in range(n - 1):
        dense[i, i + 1] = off[i]
        dense[i + 1, i] = off[i]
    np.fill_diagonal(dense, 1.0 + rng.uniform(0.0, 1.0, size=n))
    return csr_from_dense(device, dense, precision)


def true_residual(a, b, x):
    """||b - A x|| / ||b|| recomputed from scratch in float64."""
    ad = a.to_dense() if hasattr(a, "to_dense") else np.asarray(a.array, dtype=np.float64)
    bv = b.column(0).astype(np.float64)
    xv = x.column(0).astype(np.float64)
    bn = np.linalg.norm(bv)
    return np.linalg.norm(bv - ad @ xv) / (bn if bn > 0 else 1.0)
