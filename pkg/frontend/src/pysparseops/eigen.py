"""Python-side algorithms built from core operator applications.

The frontend performs no numerics of its own except the small dense
eigenproblem below; everything operator-sized runs through core SpMV, dot,
and axpy.
"""

from __future__ import annotations

import numpy as np

import sparseops as core

from .dispatch import axpy, dot
from .errors import OrthonormalityError
from .tensor import as_tensor

__all__ = ["rayleigh_ritz"]

_ORTHO_TOL = 1e-10


def _columns(v) -> list:
    """Contiguous per-column vectors of an n x k tensor (marshalling copies)."""
    return [as_tensor(np.ascontiguousarray(v.array[:, j]), device=v.device)
            for j in range(v.cols)]


def rayleigh_ritz(a, v):
    """Approximate eigenpairs of symmetric ``a`` on the subspace spanned by
    the orthonormal columns of ``v``.

    Projects a onto the subspace by repeated operator applications
    (H = V' A V, symmetrized), solves the k x k symmetric eigenproblem
    densely, and lifts the eigenvectors back: returns (ritz_values ascending,
    ritz_vectors as an n x k tensor with ritz_vectors = V Y).
    """
    n, k = v.shape
    rows, cols = a.shape
    if rows != cols or cols != n:
        raise core.errors.DimensionMismatchError(
            f"operator is {rows}x{cols}, basis is {n}x{k}")
    if k > n:
        raise core.errors.DimensionMismatchError(
            f"subspace dimension {k} exceeds the space dimension {n}")
    cols_v = _columns(v)

    deviation = 0.0
    for i in range(k):
        for j in range(i, k):
            g = dot(cols_v[i], cols_v[j])
            deviation = max(deviation, abs(g - (1.0 if i == j else 0.0)))
    if deviation > _ORTHO_TOL:
        raise OrthonormalityError(deviation, _ORTHO_TOL)

    h = np.zeros((k, k))
    w = core.dense_create(v.device, n, 1, v.precision, 0.0)
    for j in range(k):
        a.apply(cols_v[j], w)
        for i in range(k):
            h[i, j] = dot(cols_v[i], w)
    h = (h + h.T) / 2.0

    ritz_values, y = np.linalg.eigh(h)

    vectors = np.empty((n, k), dtype=v.values.dtype)
    for j in range(k):
        acc = core.dense_create(v.device, n, 1, v.precision, 0.0)
        for i in range(k):
            axpy(float(y[i, j]), cols_v[i], acc)
        vectors[:, j] = acc.column(0)
    return ritz_values, as_tensor(vectors, device=v.device)
