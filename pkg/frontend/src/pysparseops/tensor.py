"""Tensors: dense core storage wrapped for the frontend.

``as_tensor`` is the single entry point: it wraps ambient arrays without
copying whenever the memory layout and dtype already match, and otherwise
makes a converting copy marked ``copied=True``.
"""

from __future__ import annotations

import numpy as np

import sparseops as core

from . import dispatch
from .errors import CopyRequiredError

__all__ = ["Tensor", "as_tensor"]


class Tensor(core.DenseMatrix):
    """Dense matrix plus frontend metadata.

    ``copied`` records whether as_tensor had to convert the source; a False
    means the tensor shares the source's memory and mutations are visible on
    both sides.
    """

    __slots__ = ("copied",)

    def __init__(self, device, rows, cols, values, stride=None, copied=False):
        super().__init__(device, rows, cols, values, stride)
        self.copied = copied

    @classmethod
    def _adopt(cls, dense: core.DenseMatrix, copied: bool) -> "Tensor":
        return cls(dense.device, dense.rows, dense.cols, dense.values,
                   dense.stride, copied)

    def numpy(self) -> np.ndarray:
        """Zero-copy view of the logical entries."""
        return self.array

    def __repr__(self):
        return (f"Tensor({self.rows}x{self.cols}, {self.precision.value}, "
                f"device={self.device}, copied={self.copied})")


def as_tensor(data=None, *, device, dim=None, dtype=None, fill=None, copy=None) -> Tensor:
    """Create a tensor from an array or from a (dim, fill) spec.

    Array path: a C-contiguous 1-D/2-D array whose dtype matches the request
    is wrapped without copying; anything else (dtype conversion, layout fix,
    non-array input) produces a converting copy with ``copied=True``.
    ``copy=False`` forbids that and raises instead; ``copy=True`` forces a
    copy.  Fill path: ``dim`` and ``fill`` allocate a fresh tensor.
    """
    if data is None:
        if dim is None or fill is None:
            raise core.errors.InvalidArgumentError(
                "as_tensor needs either data or both dim and fill")
        rows, cols = (dim, 1) if np.isscalar(dim) else dim
        vdt = dispatch.value_dtype(dtype if dtype is not None else "double")
        dense = dispatch.resolve("dense_create", vdt)(device, int(rows), int(cols), fill)
        return Tensor._adopt(dense, copied=False)

    if dim is not None:
        want = (dim, 1) if np.isscalar(dim) else tuple(dim)
        got = np.shape(data)
        got2 = (got[0], 1) if len(got) == 1 else got
        if tuple(want) != tuple(got2):
            raise core.errors.DimensionMismatchError(
                f"dim {tuple(want)} does not match data shape {got}")

    arr = np.asarray(data)
    vdt = dispatch.value_dtype(dtype) if dtype is not None else dispatch.value_dtype(arr.dtype)
    shareable = (
        isinstance(data, np.ndarray)
        and arr.dtype == vdt
        and arr.ndim in (1, 2)
        and arr.flags.c_contiguous
    )
    if shareable and copy is not True:
        dense = dispatch.resolve("dense", vdt)(device, arr)
        return Tensor._adopt(dense, copied=False)
    if copy is False:
        raise CopyRequiredError(
            f"cannot wrap source of dtype {arr.dtype}/{arr.ndim}-D without copying "
            f"(requested dtype {np.dtype(vdt)}, contiguous={arr.flags.c_contiguous})")
    converted = np.array(arr, dtype=vdt, order="C")  # always detaches
    if converted.ndim == 0:
        converted = converted.reshape(1)
    dense = dispatch.resolve("dense", vdt)(device, converted)
    return Tensor._adopt(dense, copied=True)
