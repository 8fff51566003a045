"""Config-driven solver construction.

A nested key-value tree (in-memory mapping or JSON document) selects the
solver, optional preconditioner, and stopping criteria at run time.  Parsing
is strict: unknown keys and wrong value kinds are rejected with the full key
path, and the built solver shares the code path of direct construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .core import Device
from .errors import ConfigError
from .formats import CooMatrix, CsrMatrix, csr_from_coo
from .linop import LinOp
from .precond import ic0_factorize, ilu0_factorize, jacobi_create
from .solvers import Cg, Cgs, Gmres, Iteration, ResidualNorm

__all__ = ["SolverConfig", "PreconditionerConfig", "parse_config", "load_config",
           "build_solver", "config_solve"]

_SOLVER_TYPES = ("solver::Gmres", "solver::Cg", "solver::Cgs")
_PRECOND_TYPES = ("preconditioner::Jacobi", "preconditioner::Ilu", "preconditioner::Ic")

_DEFAULT_KRYLOV_DIM = 30


@dataclass(frozen=True)
class PreconditionerConfig:
    type: str
    max_block_size: int = 1


@dataclass(frozen=True)
class SolverConfig:
    type: str
    criteria: tuple
    preconditioner: PreconditionerConfig | None = None
    krylov_dim: int | None = None


def _expect_mapping(node, path):
    if not isinstance(node, Mapping):
        raise ConfigError(path or "<root>", f"expected a mapping, got {type(node).__name__}")


def _expect_int(node, path, minimum=1):
    # bool is an int subclass; a config true/false is still the wrong kind
    if isinstance(node, bool) or not isinstance(node, int):
        raise ConfigError(path, f"expected an integer, got {node!r}")
    if node < minimum:
        raise ConfigError(path, f"expected an integer >= {minimum}, got {node}")
    return node


def _expect_number(node, path):
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    return float(node)


def _expect_type_key(node, path, allowed):
    if "type" not in node:
        raise ConfigError(_join(path, "type"), "missing 'type' key")
    t = node["type"]
    if t not in allowed:
        raise ConfigError(_join(path, "type"),
                          f"unknown type {t!r}; expected one of {list(allowed)}")
    return t


def _join(path, key):
    return f"{path}.{key}" if path else key


def _reject_unknown(node, path, allowed):
    for key in node:
        if key not in allowed:
            raise ConfigError(_join(path, key), "unknown key")


def _parse_criterion(node, path):
    _expect_mapping(node, path)
    if "type" not in node:
        raise ConfigError(_join(path, "type"), "missing 'type' key")
    t = node["type"]
    if t == "Iteration":
        _reject_unknown(node, path, ("type", "max_iters"))
        if "max_iters" not in node:
            raise ConfigError(_join(path, "max_iters"), "missing key")
        return Iteration(_expect_int(node["max_iters"], _join(path, "max_iters")))
    if t == "ResidualNorm":
        _reject_unknown(node, path, ("type", "reduction_factor", "baseline"))
        if "reduction_factor" not in node:
            raise ConfigError(_join(path, "reduction_factor"), "missing key")
        rf = _expect_number(node["reduction_factor"], _join(path, "reduction_factor"))
        if rf <= 0:
            raise ConfigError(_join(path, "reduction_factor"),
                              f"expected a positive number, got {rf}")
        baseline = node.get("baseline", "rhs_norm")
        if baseline != "rhs_norm":
            raise ConfigError(_join(path, "baseline"),
                              f"unsupported baseline {baseline!r}; only 'rhs_norm'")
        return ResidualNorm(rf, baseline)
    raise ConfigError(_join(path, "type"),
                      f"unknown type {t!r}; expected 'Iteration' or 'ResidualNorm'")


def _parse_preconditioner(node, path):
    _expect_mapping(node, path)
    t = _expect_type_key(node, path, _PRECOND_TYPES)
    if t == "preconditioner::Jacobi":
        _reject_unknown(node, path, ("type", "max_block_size"))
        size = node.get("max_block_size", 1)
        return PreconditionerConfig(t, _expect_int(size, _join(path, "max_block_size")))
    _reject_unknown(node, path, ("type",))
    return PreconditionerConfig(t)


def parse_config(tree) -> SolverConfig:
    """Validate a configuration tree into a :class:`SolverConfig`.

    Never raises anything but :class:`ConfigError` on well-formed trees; the
    error's ``path`` names the offending key.
    """
    _expect_mapping(tree, "")
    t = _expect_type_key(tree, "", _SOLVER_TYPES)
    allowed = {"type", "criteria", "preconditioner"}
    if t == "solver::Gmres":
        allowed.add("krylov_dim")
    _reject_unknown(tree, "", allowed)
    krylov_dim = None
    if t == "solver::Gmres":
        krylov_dim = _expect_int(tree.get("krylov_dim", _DEFAULT_KRYLOV_DIM), "krylov_dim")
    precond = None
    if "preconditioner" in tree:
        precond = _parse_preconditioner(tree["preconditioner"], "preconditioner")
    if "criteria" not in tree:
        raise ConfigError("criteria", "missing key")
    crit_node = tree["criteria"]
    if not isinstance(crit_node, (list, tuple)) or len(crit_node) == 0:
        raise ConfigError("criteria", "expected a non-empty list")
    criteria = tuple(
        _parse_criterion(c, f"criteria[{i}]") for i, c in enumerate(crit_node)
    )
    if not any(isinstance(c, Iteration) for c in criteria):
        raise ConfigError("criteria", "must contain an Iteration entry")
    return SolverConfig(t, criteria, precond, krylov_dim)


def load_config(path) -> SolverConfig:
    """Parse a JSON config file; identical result to the in-memory tree."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            tree = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return parse_config(tree)


def _as_csr(a) -> CsrMatrix:
    if isinstance(a, CsrMatrix):
        return a
    if isinstance(a, CooMatrix):
        return csr_from_coo(a)
    raise ConfigError("preconditioner",
                      f"preconditioners need CSR or COO storage, got {type(a).__name__}")


def _retag(a, device: Device):
    """Eager copy of a matrix onto another (host) device."""
    if isinstance(a, CsrMatrix):
        return CsrMatrix(device, a.rows, a.cols, a.row_ptrs.copy(),
                         a.col_idxs.copy(), a.values.copy())
    if isinstance(a, CooMatrix):
        return CooMatrix(device, a.rows, a.cols, a.row_idxs.copy(),
                         a.col_idxs.copy(), a.values.copy())
    return a


def build_solver(config: SolverConfig, device: Device, a: LinOp):
    """Construct the configured solver around ``a``.

    Behaviorally identical to constructing the same solver directly; the
    preconditioner (if any) is built from ``a`` at call time, so e.g. a zero
    pivot in ILU surfaces here.
    """
    if getattr(a, "device", device) != device:
        a = _retag(a, device)
    precond = None
    if config.preconditioner is not None:
        kind = config.preconditioner.type
        if kind == "preconditioner::Jacobi":
            precond = jacobi_create(_as_csr(a), config.preconditioner.max_block_size)
        elif kind == "preconditioner::Ilu":
            precond = ilu0_factorize(_as_csr(a))
        else:
            precond = ic0_factorize(_as_csr(a))
    criteria = list(config.criteria)
    if config.type == "solver::Gmres":
        return Gmres(a, criteria=criteria, preconditioner=precond,
                     krylov_dim=config.krylov_dim or _DEFAULT_KRYLOV_DIM)
    if config.type == "solver::Cg":
        return Cg(a, criteria=criteria, preconditioner=precond)
    return Cgs(a, criteria=criteria, preconditioner=precond)


def config_solve(tree, device: Device, a: LinOp, b, x):
    """parse_config + build_solver + solve, composed.

    ``tree`` may be an in-memory mapping, a parsed :class:`SolverConfig`, or a
    path to a JSON document; all produce identical behavior.
    """
    if isinstance(tree, SolverConfig):
        config = tree
    elif isinstance(tree, (str, Path)):
        config = load_config(tree)
    else:
        config = parse_config(tree)
    solver = build_solver(config, device, a)
    log = solver.solve(b, x)
    return log, x
