"""Execution devices, precision descriptors, dense storage, and the vector
primitives everything above is built from.

A :class:`Device` selects *how* kernels run (sequentially, or partitioned
across a host thread pool); all data lives in host memory regardless.  Kernels
are instantiated once per value/index dtype combination on first use.
"""

from __future__ import annotations

import atexit
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    PrecisionMismatchError,
    UnknownDeviceError,
    UnsupportedBackendError,
    UnsupportedFeatureError,
)

__all__ = [
    "DeviceKind",
    "Device",
    "Precision",
    "IndexWidth",
    "DenseMatrix",
    "create_device",
    "dense_create",
    "dense_from_array",
    "dot",
    "norm2",
    "axpy",
    "scal",
    "copy_into",
]

# Below this many work items a kernel runs inline; partitioning math is
# unchanged, so results do not depend on whether the pool was used.
_PARALLEL_CUTOFF = 8192


class Precision(Enum):
    """Value type of a numeric buffer (half is deliberately absent)."""

    single = "single"
    double = "double"

    @property
    def dtype(self):
        return np.float32 if self is Precision.single else np.float64

    @property
    def itemsize(self):
        return 4 if self is Precision.single else 8

    @classmethod
    def from_dtype(cls, dtype):
        dt = np.dtype(dtype)
        if dt == np.float32:
            return cls.single
        if dt == np.float64:
            return cls.double
        if dt == np.float16:
            raise UnsupportedFeatureError("half precision is not supported")
        raise UnsupportedFeatureError(f"unsupported value dtype {dt!r}")


class IndexWidth(Enum):
    """Width of the index arrays of a sparse matrix."""

    i32 = "i32"
    i64 = "i64"

    @property
    def dtype(self):
        return np.int32 if self is IndexWidth.i32 else np.int64

    @classmethod
    def from_dtype(cls, dtype):
        dt = np.dtype(dtype)
        if dt == np.int32:
            return cls.i32
        if dt == np.int64:
            return cls.i64
        raise UnsupportedFeatureError(f"unsupported index dtype {dt!r}")


class DeviceKind(Enum):
    reference = "reference"
    parallel_host = "parallel-host"


@dataclass(frozen=True)
class Device:
    """Execution context: backend kind plus degree of parallelism.

    Immutable and freely shareable across threads.  ``id`` is reserved for
    multi-device setups and currently only recorded.
    """

    kind: DeviceKind
    thread_count: int = 1
    id: int = 0

    def __post_init__(self):
        if self.thread_count < 1:
            raise InvalidArgumentError("thread_count must be positive")
        if self.kind is DeviceKind.reference and self.thread_count != 1:
            raise InvalidArgumentError("reference device is single threaded")
        if self.id < 0:
            raise InvalidArgumentError("device id must be non-negative")

    def __str__(self):
        if self.kind is DeviceKind.reference:
            return "reference"
        return f"omp[{self.thread_count}]"


_KNOWN_UNSUPPORTED = ("cuda", "hip", "sycl")


def create_device(name: str, id: int = 0, threads: int | None = None) -> Device:
    """Create a device by name ("reference" or "omp", case-insensitive).

    "omp" defaults ``threads`` to the hardware thread count; an explicit value
    overrides it.  GPU backend names are recognized but rejected.
    """
    low = str(name).lower()
    if low == "reference":
        if threads not in (None, 1):
            raise InvalidArgumentError("reference device is single threaded")
        return Device(DeviceKind.reference, 1, id)
    if low == "omp":
        count = threads if threads is not None else (os.cpu_count() or 1)
        return Device(DeviceKind.parallel_host, count, id)
    if low in _KNOWN_UNSUPPORTED:
        raise UnsupportedBackendError(
            f"the '{low}' backend is not available in this build; "
            "available devices: reference, omp"
        )
    raise UnknownDeviceError(f"unknown device name {name!r}; expected 'reference' or 'omp'")


# ---------------------------------------------------------------------------
# thread pool plumbing

_pools: dict[int, ThreadPoolExecutor] = {}


def _pool(threads: int) -> ThreadPoolExecutor:
    pool = _pools.get(threads)
    if pool is None:
        pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix=f"sparseops-{threads}")
        _pools[threads] = pool
    return pool


@atexit.register
def _shutdown_pools():
    for pool in _pools.values():
        pool.shutdown(wait=False)
    _pools.clear()


def partition(n: int, parts: int) -> list[tuple[int, int]]:
    """Split range(n) into ``parts`` contiguous chunks with sizes differing by
    at most one.  Purely a function of (n, parts)."""
    base, rem = divmod(n, parts)
    bounds = []
    lo = 0
    for t in range(parts):
        hi = lo + base + (1 if t < rem else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def run_chunks(device: Device, chunks: list[tuple[int, int]], work: int, fn) -> None:
    """Run ``fn(lo, hi)`` for every chunk, on the pool when ``work`` is large
    enough to pay for dispatch.  Results never depend on which path ran."""
    if device.thread_count == 1 or work < _PARALLEL_CUTOFF or len(chunks) == 1:
        for lo, hi in chunks:
            fn(lo, hi)
        return
    pool = _pool(device.thread_count)
    futures = [pool.submit(fn, lo, hi) for lo, hi in chunks]
    for f in futures:
        f.result()


def run_partitioned(device: Device, n_items: int, work: int, fn) -> None:
    """Run ``fn(lo, hi)`` over range(n_items), split into one contiguous block
    per device thread."""
    if device.thread_count == 1 or n_items == 0:
        fn(0, n_items)
        return
    run_chunks(device, partition(n_items, device.thread_count), work, fn)


def map_partitioned(device: Device, n_items: int, work: int, fn) -> list:
    """Like :func:`run_partitioned` but collects one result per chunk, in
    chunk order (one chunk per device thread)."""
    threads = device.thread_count
    if threads == 1:
        return [fn(0, n_items)]
    bounds = partition(n_items, threads)
    if work < _PARALLEL_CUTOFF:
        return [fn(lo, hi) for lo, hi in bounds]
    pool = _pool(threads)
    futures = [pool.submit(fn, lo, hi) for lo, hi in bounds]
    return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# dense storage


class DenseMatrix:
    """Row-major dense matrix; a vector is the ``cols == 1`` special case.

    ``values`` is the flat buffer of length ``rows * stride``; the logical
    entries of row ``i`` live at ``values[i*stride : i*stride + cols]``.
    Instances are not internally synchronized; callers must not alias mutable
    access.
    """

    __slots__ = ("device", "rows", "cols", "stride", "values")

    def __init__(self, device: Device, rows: int, cols: int, values: np.ndarray,
                 stride: int | None = None):
        if rows < 0 or cols < 0:
            raise InvalidArgumentError("rows and cols must be non-negative")
        stride = cols if stride is None else stride
        if stride < cols:
            raise InvalidArgumentError(f"stride {stride} < cols {cols}")
        values = np.asarray(values)
        Precision.from_dtype(values.dtype)  # reject unsupported dtypes
        if values.ndim != 1 or not values.flags.c_contiguous:
            raise InvalidArgumentError("values must be a contiguous 1-D buffer")
        if values.shape[0] != rows * stride:
            raise DimensionMismatchError(
                f"buffer length {values.shape[0]} != rows*stride = {rows * stride}"
            )
        self.device = device
        self.rows = rows
        self.cols = cols
        self.stride = stride
        self.values = values

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def size(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def precision(self) -> Precision:
        return Precision.from_dtype(self.values.dtype)

    @property
    def array(self) -> np.ndarray:
        """Logical (rows, cols) view of the buffer; shares memory."""
        return self.values.reshape(self.rows, self.stride)[:, : self.cols]

    def column(self, j: int) -> np.ndarray:
        return self.array[:, j]

    def copy(self) -> "DenseMatrix":
        out = dense_create(self.device, self.rows, self.cols, self.precision, 0.0)
        copy_into(self, out)
        return out

    # DenseMatrix participates in the LinOp contract: apply is a dense matvec.
    def apply(self, b: "DenseMatrix", x: "DenseMatrix") -> "DenseMatrix":
        _check_apply_shapes(self.shape, b, x)
        for j in range(b.cols):
            bj, xj = b.column(j), x.column(j)
            a = self.array
            run_partitioned(self.device, self.rows, self.rows * self.cols,
                            lambda lo, hi: _kernels.gemv_rows(a, bj, xj, lo, hi))
        return x

    def apply_advanced(self, alpha: float, b: "DenseMatrix", beta: float,
                       x: "DenseMatrix") -> "DenseMatrix":
        from .linop import apply_advanced

        return apply_advanced(self, alpha, b, beta, x)

    def __repr__(self):
        return (f"DenseMatrix({self.rows}x{self.cols}, {self.precision.value}, "
                f"device={self.device})")


def _check_apply_shapes(op_shape, b, x):
    rows, cols = op_shape
    if b.rows != cols or x.rows != rows or b.cols != x.cols:
        raise DimensionMismatchError(
            f"apply shape mismatch: op is {rows}x{cols}, b is {b.rows}x{b.cols}, "
            f"x is {x.rows}x{x.cols}"
        )
    if b.values.dtype != x.values.dtype:
        raise PrecisionMismatchError("b and x must share one precision")


def dense_create(device: Device, rows: int, cols: int, precision: Precision,
                 fill: float) -> DenseMatrix:
    """Allocate a rows x cols dense matrix with every entry equal to ``fill``."""
    if rows < 0 or cols < 0:
        raise InvalidArgumentError("rows and cols must be non-negative")
    values = np.full(rows * cols, fill, dtype=precision.dtype)
    return DenseMatrix(device, rows, cols, values)


def dense_from_array(device: Device, array: np.ndarray) -> DenseMatrix:
    """Wrap a contiguous 1-D or 2-D array without copying.

    Mutations are visible on both sides; the wrapper keeps the source alive.
    """
    arr = np.asarray(array)
    if arr.ndim == 1:
        arr = arr.reshape(arr.shape[0], 1)
    if arr.ndim != 2:
        raise InvalidArgumentError("expected a 1-D or 2-D array")
    if not arr.flags.c_contiguous:
        raise InvalidArgumentError("expected a C-contiguous (row-major) array")
    rows, cols = arr.shape
    return DenseMatrix(device, rows, cols, arr.reshape(-1))


# ---------------------------------------------------------------------------
# BLAS-1 primitives


def _check_same_shape(x: DenseMatrix, y: DenseMatrix):
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.values.dtype != y.values.dtype:
        raise PrecisionMismatchError(
            f"precision mismatch: {x.precision.value} vs {y.precision.value}"
        )


def _check_vector(x: DenseMatrix):
    if x.cols != 1:
        raise DimensionMismatchError(f"expected a column vector, got {x.shape}")


def dot(x: DenseMatrix, y: DenseMatrix) -> float:
    """Euclidean inner product of two column vectors.

    Sequential summation on the reference device; on parallel-host devices one
    partial sum per thread chunk, combined in chunk order, so the result is a
    function of (length, thread_count) only.
    """
    _check_vector(x)
    _check_same_shape(x, y)
    xs, ys = x.column(0), y.column(0)
    partials = map_partitioned(x.device, x.rows, x.rows,
                               lambda lo, hi: _kernels.dot_range(xs, ys, lo, hi))
    acc = 0.0
    for p in partials:
        acc += p
    return acc


def norm2(x: DenseMatrix) -> float:
    """2-norm, sqrt(dot(x, x)); 0 for the empty vector."""
    return float(np.sqrt(dot(x, x)))


def axpy(alpha: float, x: DenseMatrix, y: DenseMatrix) -> None:
    """y := alpha*x + y, elementwise."""
    _check_same_shape(x, y)
    xa, ya = x.array, y.array
    run_partitioned(y.device, x.rows, x.rows * max(x.cols, 1),
                    lambda lo, hi: _kernels.axpy_rows(float(alpha), xa, ya, lo, hi))


def scal(alpha: float, x: DenseMatrix) -> None:
    """x := alpha*x, elementwise."""
    xa = x.array
    run_partitioned(x.device, x.rows, x.rows * max(x.cols, 1),
                    lambda lo, hi: _kernels.scal_rows(float(alpha), xa, lo, hi))


def copy_into(src: DenseMatrix, dst: DenseMatrix) -> None:
    """dst := src, elementwise."""
    _check_same_shape(src, dst)
    sa, da = src.array, dst.array
    run_partitioned(dst.device, src.rows, src.rows * max(src.cols, 1),
                    lambda lo, hi: _kernels.copy_rows(sa, da, lo, hi))
