"""pysparseops: the idiomatic frontend for the sparseops core.

Two layers, mirroring how the core instantiates its kernels per type:

- ``pysparseops.bindings`` exposes the raw instantiations with type-suffixed
  names (``dot_double``, ``csr_spmv_float_i32``, ...), each delegating to
  exactly one core operation.
- the top-level API (``device``, ``read``, ``as_tensor``, ``solve``, the
  ``solver``/``preconditioner`` factories, and the dispatched vector ops)
  routes to those instantiations from runtime dtypes, wraps ambient arrays
  without copying via the buffer protocol, and hosts Python-side algorithms
  such as ``rayleigh_ritz`` composed purely from operator applications.

Solvers follow the ``logger, result = solver.apply(b, x)`` convention; the
result aliases x, and the logger reports iterations, the residual history,
the converged flag, and the stop reason.
"""

from sparseops import ConvergenceLog  # the logger type apply returns

from . import bindings, preconditioner, solver
from .api import axpy, device, dot, norm2, read, scal, solve, spmv
from .eigen import rayleigh_ritz
from .errors import (
    BindingError,
    CopyRequiredError,
    InstantiationMismatchError,
    NoMatchingInstantiationError,
    OrthonormalityError,
)
from .tensor import Tensor, as_tensor

__version__ = "0.1.0"

__all__ = [
    "ConvergenceLog",
    "Tensor",
    "as_tensor",
    "axpy",
    "bindings",
    "device",
    "dot",
    "norm2",
    "preconditioner",
    "rayleigh_ritz",
    "read",
    "scal",
    "solve",
    "solver",
    "spmv",
    "BindingError",
    "CopyRequiredError",
    "InstantiationMismatchError",
    "NoMatchingInstantiationError",
    "OrthonormalityError",
]
