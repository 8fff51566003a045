"""Preconditioner factories; named after the bound classes they construct."""

from __future__ import annotations

import sparseops as core

__all__ = ["Ilu", "Ic", "Jacobi"]


def _as_csr(a):
    if isinstance(a, core.CsrMatrix):
        return a
    if isinstance(a, core.CooMatrix):
        return core.csr_from_coo(a)
    raise core.errors.InvalidArgumentError(
        f"preconditioners need CSR or COO storage, got {type(a).__name__}")


def Ilu(device, a):
    """ILU(0) preconditioner of a."""
    return core.ilu0_factorize(_as_csr(a))


def Ic(device, a):
    """IC(0) preconditioner of a (symmetric positive definite pattern)."""
    return core.ic0_factorize(_as_csr(a))


def Jacobi(device, a, max_block_size=1):
    """Pointwise Jacobi preconditioner (block size 1 only)."""
    return core.jacobi_create(_as_csr(a), max_block_size)
