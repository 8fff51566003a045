"""High-level entry points: device, read, solve, and the dispatched vector ops."""

from __future__ import annotations

import sparseops as core

from . import dispatch
from .dispatch import axpy, dot, norm2, scal, spmv

__all__ = ["device", "read", "solve", "dot", "norm2", "axpy", "scal", "spmv"]

_INDEX_ALIASES = {
    "i32": core.IndexWidth.i32, "int32": core.IndexWidth.i32,
    "i64": core.IndexWidth.i64, "int64": core.IndexWidth.i64,
}


def device(name: str, id: int = 0, threads: int | None = None) -> core.Device:
    """Create an execution device by name ("reference" or "omp")."""
    return core.create_device(name, id, threads)


def read(device, path, dtype="double", format="Csr", index="i32"):
    """Read a Matrix Market file, routed by dtype/index to a typed binding."""
    vdt = dispatch.value_dtype(dtype)
    fmt = str(format).lower()
    if fmt not in ("csr", "coo"):
        raise core.errors.MatrixMarketError(
            f"unknown format {format!r}; expected 'Csr' or 'Coo'")
    key = str(index).lower()
    if key not in _INDEX_ALIASES:
        raise core.errors.UnsupportedFeatureError(
            f"unknown index width {index!r}; expected 'i32' or 'i64'")
    idt = _INDEX_ALIASES[key].dtype
    return dispatch.resolve(f"read_{fmt}", vdt, idt)(device, path)


def solve(args, a, b, x):
    """Run the config-driven solver described by ``args`` (a nested mapping in
    the standard shape, or a path to the equivalent JSON document).

    Returns (logger, result); result aliases x, which is overwritten.
    """
    logger, _ = core.config_solve(args, a.device, a, b, x)
    return logger, x
