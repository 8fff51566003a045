"""Runtime-type dispatch onto the raw typed bindings."""

from __future__ import annotations

import numpy as np

import sparseops as core

from . import bindings
from .errors import NoMatchingInstantiationError

_VALUE_BY_DTYPE = {dt: name for name, dt in bindings.VALUE_DTYPES.items()}
_INDEX_BY_DTYPE = {dt: name for name, dt in bindings.INDEX_DTYPES.items()}

_DTYPE_ALIASES = {
    "float": np.dtype(np.float32),
    "single": np.dtype(np.float32),
    "float32": np.dtype(np.float32),
    "double": np.dtype(np.float64),
    "float64": np.dtype(np.float64),
}


def value_dtype(spec) -> np.dtype:
    """Resolve a dtype spec ("double", "float", np.float64, ...) to a
    supported value dtype."""
    if isinstance(spec, str):
        low = spec.lower()
        if low in ("half", "float16"):
            raise NoMatchingInstantiationError(
                "half precision is not instantiated in this build; "
                "available value types: float, double")
        if low in _DTYPE_ALIASES:
            return _DTYPE_ALIASES[low]
        raise NoMatchingInstantiationError(
            f"unknown dtype {spec!r}; available value types: float, double")
    dt = np.dtype(spec)
    if dt not in _VALUE_BY_DTYPE:
        raise NoMatchingInstantiationError(
            f"no instantiation for value dtype {dt}; available: float32, float64")
    return dt


def resolve(op: str, value: np.dtype, index: np.dtype | None = None):
    """Return the suffixed binding for (op, value dtype[, index dtype])."""
    parts = [op]
    names = bindings.candidates(op)
    vs = _VALUE_BY_DTYPE.get(np.dtype(value))
    if vs is None:
        raise NoMatchingInstantiationError(
            f"{op}: no instantiation for value dtype {np.dtype(value)}; "
            f"candidates: {names}", names)
    parts.append(vs)
    if index is not None:
        isfx = _INDEX_BY_DTYPE.get(np.dtype(index))
        if isfx is None:
            raise NoMatchingInstantiationError(
                f"{op}: no instantiation for index dtype {np.dtype(index)}; "
                f"candidates: {names}", names)
        parts.append(isfx)
    name = "_".join(parts)
    fn = getattr(bindings, name, None)
    if fn is None:
        raise NoMatchingInstantiationError(
            f"{op}: no instantiation named {name}; candidates: {names}", names)
    return fn


def _common_value_dtype(op: str, *tensors) -> np.dtype:
    dtypes = {t.values.dtype for t in tensors}
    if len(dtypes) != 1:
        names = bindings.candidates(op)
        got = ", ".join(sorted(str(d) for d in dtypes))
        raise NoMatchingInstantiationError(
            f"{op}: mixed value dtypes ({got}); candidates: {names}", names)
    return dtypes.pop()


def dot(x, y) -> float:
    return resolve("dot", _common_value_dtype("dot", x, y))(x, y)


def norm2(x) -> float:
    return resolve("norm2", x.values.dtype)(x)


def axpy(alpha, x, y):
    return resolve("axpy", _common_value_dtype("axpy", x, y))(alpha, x, y)


def scal(alpha, x):
    return resolve("scal", x.values.dtype)(alpha, x)


def spmv(a, b, x):
    """x = A*b routed by the matrix format and its value/index dtypes."""
    if isinstance(a, core.CsrMatrix):
        op = "csr_spmv"
    elif isinstance(a, core.CooMatrix):
        op = "coo_spmv"
    else:
        raise NoMatchingInstantiationError(
            f"spmv: expected a CSR or COO matrix, got {type(a).__name__}")
    value = _common_value_dtype(op, a, b, x)
    return resolve(op, value, a.col_idxs.dtype)(a, b, x)
