"""Direct solver factories mirroring the bound solver classes.

Each factory returns a solver whose ``apply(b, x)`` returns
``(logger, result)``, the logger carrying iterations, residual history, the
converged flag, and the stop reason; result aliases x.
"""

from __future__ import annotations

import sparseops as core

__all__ = ["BoundSolver", "gmres", "cg", "cgs"]


class BoundSolver:
    """Thin handle around a core solver with the (logger, result) convention."""

    def __init__(self, inner):
        self._inner = inner

    @property
    def size(self):
        return self._inner.size

    @property
    def shape(self):
        return self._inner.shape

    @property
    def device(self):
        return self._inner.device

    def apply(self, b, x):
        logger = self._inner.solve(b, x)
        return logger, x


def _criteria(max_iters, reduction_factor):
    crit = [core.Iteration(max_iters)]
    if reduction_factor is not None:
        crit.append(core.ResidualNorm(reduction_factor))
    return crit


def _placed(a, device):
    if device is not None and a.device != device:
        raise core.errors.InvalidArgumentError(
            f"matrix lives on {a.device}, solver requested on {device}; "
            "read or wrap the matrix on the target device first")
    return a


def gmres(device, a, preconditioner=None, max_iters=1000, krylov_dim=30,
          reduction_factor=1e-06) -> BoundSolver:
    """Restarted GMRES; the preconditioner defaults to identity."""
    return BoundSolver(core.Gmres(_placed(a, device),
                                  criteria=_criteria(max_iters, reduction_factor),
                                  preconditioner=preconditioner,
                                  krylov_dim=krylov_dim))


def cg(device, a, preconditioner=None, max_iters=1000,
       reduction_factor=1e-06) -> BoundSolver:
    """Conjugate gradient for SPD operators."""
    return BoundSolver(core.Cg(_placed(a, device),
                               criteria=_criteria(max_iters, reduction_factor),
                               preconditioner=preconditioner))


def cgs(device, a, preconditioner=None, max_iters=1000,
        reduction_factor=1e-06) -> BoundSolver:
    """Conjugate gradient squared for general operators."""
    return BoundSolver(core.Cgs(_placed(a, device),
                                criteria=_criteria(max_iters, reduction_factor),
                                preconditioner=preconditioner))
