"""Krylov solvers: CG, CGS, and restarted GMRES.

Each solver is a LinOp whose ``apply`` solves A*x = b for the right-hand side
it is given; ``solve`` additionally returns a :class:`ConvergenceLog`.
Stopping criteria compose as a list with OR semantics and every list must
contain an :class:`Iteration` entry so termination is guaranteed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import DenseMatrix, axpy, copy_into, dense_create, dot, norm2, scal
from .errors import (
    BreakdownError,
    DimensionMismatchError,
    InvalidArgumentError,
    NumericFailureError,
    UnsupportedFeatureError,
)
from .linop import LinOp

__all__ = [
    "Iteration",
    "ResidualNorm",
    "ConvergenceLog",
    "SolverParams",
    "GmresTraceEvent",
    "check_criteria",
    "givens_rotation",
    "cg_solve",
    "cgs_solve",
    "gmres_solve",
    "Cg",
    "Cgs",
    "Gmres",
]

# Denominators smaller than BREAKDOWN_RTOL times their natural scale (the
# numerator they will divide, or the current residual scale) count as a
# recurrence breakdown.
BREAKDOWN_RTOL = 1e-30

STOP_RESIDUAL = "residual"
STOP_MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class Iteration:
    """Stop once the iteration count reaches ``max_iters``."""

    max_iters: int

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be positive")


@dataclass(frozen=True)
class ResidualNorm:
    """Stop once ||r|| <= reduction_factor * baseline (baseline: rhs norm)."""

    reduction_factor: float
    baseline: str = "rhs_norm"

    def __post_init__(self):
        if self.reduction_factor <= 0:
            raise InvalidArgumentError("reduction_factor must be positive")
        if self.baseline != "rhs_norm":
            raise UnsupportedFeatureError(
                f"unsupported residual baseline {self.baseline!r}; only 'rhs_norm'"
            )


@dataclass
class ConvergenceLog:
    """Per-solve diagnostics: iterations executed, one residual per check,
    and why the solver stopped."""

    iterations: int
    residual_history: list[float]
    converged: bool
    stop_reason: str


@dataclass
class SolverParams:
    """Convenience bundle for direct solver construction.

    ``reduction_factor`` of None means fixed-iteration mode (no residual
    criterion); ``krylov_dim`` only matters for GMRES.
    """

    max_iters: int
    reduction_factor: float | None = None
    krylov_dim: int = 30
    preconditioner: LinOp | None = None

    def criteria(self) -> list:
        crit: list = [Iteration(self.max_iters)]
        if self.reduction_factor is not None:
            crit.append(ResidualNorm(self.reduction_factor))
        return crit


def validate_criteria(criteria) -> list:
    if not criteria:
        raise InvalidArgumentError("criteria list must be non-empty")
    if not any(isinstance(c, Iteration) for c in criteria):
        raise InvalidArgumentError("criteria must contain an Iteration entry")
    for c in criteria:
        if not isinstance(c, (Iteration, ResidualNorm)):
            raise InvalidArgumentError(f"unknown criterion {c!r}")
    return list(criteria)


def check_criteria(criteria, iterations: int, residual: float, rhs_norm: float):
    """Return a stop reason ("residual" or "max_iters") or None to continue.

    A zero rhs norm turns the residual test absolute.  When both kinds fire on
    the same check the residual reason wins, since it is the success outcome.
    """
    for c in criteria:
        if isinstance(c, ResidualNorm):
            threshold = c.reduction_factor * rhs_norm if rhs_norm > 0 else c.reduction_factor
            if residual <= threshold:
                return STOP_RESIDUAL
    for c in criteria:
        if isinstance(c, Iteration) and iterations >= c.max_iters:
            return STOP_MAX_ITERS
    return None


def givens_rotation(a: float, b: float) -> tuple[float, float, float]:
    """Rotation (c, s, r) with c*a + s*b = r and -s*a + c*b = 0; (0,0) -> (1,0,0)."""
    if a == 0.0 and b == 0.0:
        return 1.0, 0.0, 0.0
    r = math.hypot(a, b)
    return a / r, b / r, r


# ---------------------------------------------------------------------------
# shared plumbing


def _check_system(a, b, x):
    rows, cols = a.shape
    if rows != cols:
        raise DimensionMismatchError(f"solver needs a square operator, got {rows}x{cols}")
    if b.shape != (rows, 1) or x.shape != (rows, 1):
        raise DimensionMismatchError(
            f"expected {rows}x1 vectors, got b {b.shape} and x {x.shape}"
        )


def _fresh(a, b) -> DenseMatrix:
    return dense_create(a.device, b.rows, 1, b.precision, 0.0)


def _residual(a, b, x, r, t) -> float:
    """r := b - A*x, returning ||r||."""
    a.apply(x, t)
    copy_into(b, r)
    axpy(-1.0, t, r)
    return norm2(r)


def _apply_precond(m, r, z):
    if m is None:
        copy_into(r, z)
    else:
        m.apply(r, z)


def _exact_log() -> ConvergenceLog:
    # initial guess already solves the system; no criteria evaluation happens
    return ConvergenceLog(0, [0.0], True, STOP_RESIDUAL)


# ---------------------------------------------------------------------------
# CG


def _run_cg(a, b, x, criteria, m) -> ConvergenceLog:
    _check_system(a, b, x)
    bnorm = norm2(b)
    r, z, p, q, t = (_fresh(a, b) for _ in range(5))
    rnorm = _residual(a, b, x, r, t)
    if rnorm == 0.0:
        return _exact_log()
    _apply_precond(m, r, z)
    copy_into(z, p)
    rz = dot(r, z)
    history: list[float] = []
    it = 0
    while True:
        it += 1
        a.apply(p, q)
        pq = dot(p, q)
        if not np.isfinite(pq) or pq <= BREAKDOWN_RTOL * abs(rz):
            raise BreakdownError(it, f"p'Ap = {pq} at iteration {it}; operator not SPD?")
        alpha = rz / pq
        axpy(alpha, p, x)
        axpy(-alpha, q, r)
        rnorm = norm2(r)
        history.append(rnorm)
        reason = check_criteria(criteria, it, rnorm, bnorm)
        if reason is None and rnorm == 0.0:
            # exactly solved; the recurrence denominators vanish from here on
            reason = STOP_RESIDUAL
        if reason is not None:
            return ConvergenceLog(it, history, reason == STOP_RESIDUAL, reason)
        _apply_precond(m, r, z)
        rz_new = dot(r, z)
        if not np.isfinite(rz_new) or rz == 0.0:
            raise BreakdownError(it, f"r'z = {rz_new} at iteration {it}")
        beta = rz_new / rz
        scal(beta, p)
        axpy(1.0, z, p)
        rz = rz_new


# ---------------------------------------------------------------------------
# CGS


def _run_cgs(a, b, x, criteria, m) -> ConvergenceLog:
    _check_system(a, b, x)
    bnorm = norm2(b)
    r, r_shadow, u, p, q, v, uq, uhat, phat, t = (_fresh(a, b) for _ in range(10))
    rnorm = _residual(a, b, x, r, t)
    if rnorm == 0.0:
        return _exact_log()
    copy_into(r, r_shadow)
    shadow_norm = rnorm
    history: list[float] = []
    rho_prev = 0.0
    it = 0
    while True:
        it += 1
        rho = dot(r_shadow, r)
        if not np.isfinite(rho) or abs(rho) <= BREAKDOWN_RTOL * shadow_norm * rnorm:
            raise BreakdownError(it, f"rho = {rho} at iteration {it}")
        if it == 1:
            copy_into(r, u)
            copy_into(u, p)
        else:
            beta = rho / rho_prev
            # u = r + beta*q
            copy_into(q, u)
            scal(beta, u)
            axpy(1.0, r, u)
            # p = u + beta*(q + beta*p)
            scal(beta * beta, p)
            axpy(beta, q, p)
            axpy(1.0, u, p)
        _apply_precond(m, p, phat)
        a.apply(phat, v)
        sigma = dot(r_shadow, v)
        if not np.isfinite(sigma) or abs(sigma) <= BREAKDOWN_RTOL * abs(rho):
            raise BreakdownError(it, f"r_shadow'Ap = {sigma} at iteration {it}")
        alpha = rho / sigma
        # q = u - alpha*v
        copy_into(u, q)
        axpy(-alpha, v, q)
        # x += alpha * M^{-1}(u + q);  r -= alpha * A M^{-1}(u + q)
        copy_into(u, uq)
        axpy(1.0, q, uq)
        _apply_precond(m, uq, uhat)
        axpy(alpha, uhat, x)
        a.apply(uhat, t)
        axpy(-alpha, t, r)
        rnorm = norm2(r)
        history.append(rnorm)
        reason = check_criteria(criteria, it, rnorm, bnorm)
        if reason is None and rnorm == 0.0:
            reason = STOP_RESIDUAL  # exactly solved; rho vanishes from here on
        if reason is not None:
            return ConvergenceLog(it, history, reason == STOP_RESIDUAL, reason)
        rho_prev = rho


# ---------------------------------------------------------------------------
# GMRES


@dataclass
class GmresTraceEvent:
    """One inner-iteration snapshot handed to a gmres trace callback."""

    cycle: int
    inner: int
    estimate: float
    solution: np.ndarray


def _back_substitute(r: np.ndarray, g: np.ndarray, k: int) -> np.ndarray:
    y = np.zeros(k)
    for i in range(k - 1, -1, -1):
        acc = g[i]
        for j in range(i + 1, k):
            acc -= r[i, j] * y[j]
        y[i] = acc / r[i, i]
    return y


def _gmres_update(x, basis, r_mat, g, k, m, a, b):
    """x += M^{-1} (V_k y) with y from back-substituting the k x k system."""
    y = _back_substitute(r_mat, g, k)
    z_acc = _fresh(a, b)
    for i in range(k):
        axpy(float(y[i]), basis[i], z_acc)
    dx = _fresh(a, b)
    _apply_precond(m, z_acc, dx)
    axpy(1.0, dx, x)


def _run_gmres(a, b, x, criteria, m, krylov_dim,
               trace: Optional[Callable[[GmresTraceEvent], None]] = None) -> ConvergenceLog:
    _check_system(a, b, x)
    if krylov_dim < 1:
        raise InvalidArgumentError("krylov_dim must be positive")
    bnorm = norm2(b)
    dim = krylov_dim
    history: list[float] = []
    total_inner = 0
    cycle = 0
    r, t, z, w = (_fresh(a, b) for _ in range(4))
    while True:
        beta = _residual(a, b, x, r, t)
        if beta == 0.0:
            if total_inner == 0:
                return _exact_log()
            # the restart residual is exactly zero; nothing left to solve
            return ConvergenceLog(total_inner, history, True, STOP_RESIDUAL)
        v0 = _fresh(a, b)
        copy_into(r, v0)
        scal(1.0 / beta, v0)
        basis = [v0]
        r_mat = np.zeros((dim, dim))
        g = np.zeros(dim + 1)
        g[0] = beta
        cs = np.zeros(dim)
        sn = np.zeros(dim)
        for j in range(dim):
            _apply_precond(m, basis[j], z)
            a.apply(z, w)
            # modified Gram-Schmidt, single pass
            hcol = np.zeros(j + 2)
            for i in range(j + 1):
                hij = dot(basis[i], w)
                axpy(-hij, basis[i], w)
                hcol[i] = hij
            hnorm = norm2(w)
            hcol[j + 1] = hnorm
            if not np.all(np.isfinite(hcol)):
                raise NumericFailureError(
                    f"non-finite Hessenberg column at inner iteration {total_inner + 1}"
                )
            # fold in the stored rotations, then one new rotation
            for i in range(j):
                hi, hi1 = hcol[i], hcol[i + 1]
                hcol[i] = cs[i] * hi + sn[i] * hi1
                hcol[i + 1] = -sn[i] * hi + cs[i] * hi1
            c, s, rr = givens_rotation(float(hcol[j]), float(hcol[j + 1]))
            cs[j], sn[j] = c, s
            hcol[j] = rr
            r_mat[: j + 1, j] = hcol[: j + 1]
            g[j + 1] = -s * g[j]
            g[j] = c * g[j]
            estimate = abs(float(g[j + 1]))
            if not np.isfinite(estimate):
                raise NumericFailureError(
                    f"non-finite residual estimate at inner iteration {total_inner + 1}"
                )
            total_inner += 1
            history.append(estimate)
            if trace is not None:
                xs = x.copy()
                _gmres_update(xs, basis, r_mat, g, j + 1, m, a, b)
                trace(GmresTraceEvent(cycle, total_inner, estimate,
                                      xs.column(0).copy()))
            reason = check_criteria(criteria, total_inner, estimate, bnorm)
            happy = hnorm <= 1e-30 * bnorm
            if reason is not None or happy or j + 1 == dim:
                _gmres_update(x, basis, r_mat, g, j + 1, m, a, b)
                if reason is not None:
                    return ConvergenceLog(total_inner, history,
                                          reason == STOP_RESIDUAL, reason)
                break  # restart
            vnext = _fresh(a, b)
            copy_into(w, vnext)
            scal(1.0 / hnorm, vnext)
            basis.append(vnext)
        cycle += 1


# ---------------------------------------------------------------------------
# public surface


class _SolverBase(LinOp):
    def __init__(self, a, criteria=None, preconditioner=None, params: SolverParams | None = None):
        rows, cols = a.shape
        if rows != cols:
            raise DimensionMismatchError(f"solver needs a square operator, got {rows}x{cols}")
        if params is not None:
            if criteria is not None:
                raise InvalidArgumentError("pass either criteria or params, not both")
            criteria = params.criteria()
            if preconditioner is None:
                preconditioner = params.preconditioner
        self.a = a
        self.criteria = validate_criteria(criteria)
        self.preconditioner = preconditioner

    @property
    def shape(self):
        return self.a.shape

    @property
    def device(self):
        return self.a.device

    def solve(self, b: DenseMatrix, x: DenseMatrix) -> ConvergenceLog:
        raise NotImplementedError

    def apply(self, b: DenseMatrix, x: DenseMatrix) -> DenseMatrix:
        self.solve(b, x)
        return x


class Cg(_SolverBase):
    """Preconditioned conjugate gradient; expects an SPD operator."""

    def solve(self, b, x):
        return _run_cg(self.a, b, x, self.criteria, self.preconditioner)


class Cgs(_SolverBase):
    """Conjugate gradient squared for general nonsingular operators."""

    def solve(self, b, x):
        return _run_cgs(self.a, b, x, self.criteria, self.preconditioner)


class Gmres(_SolverBase):
    """Restarted GMRES with right preconditioning.

    Arnoldi uses single-pass modified Gram-Schmidt; every Hessenberg column is
    reduced by the stored Givens rotations plus one new rotation, and the
    residual estimate |g[j+1]| is checked after every inner iteration.
    """

    def __init__(self, a, criteria=None, preconditioner=None,
                 params: SolverParams | None = None, krylov_dim: int | None = None):
        super().__init__(a, criteria, preconditioner, params)
        if krylov_dim is None:
            krylov_dim = params.krylov_dim if params is not None else 30
        if krylov_dim < 1:
            raise InvalidArgumentError("krylov_dim must be positive")
        self.krylov_dim = krylov_dim

    def solve(self, b, x, trace=None):
        return _run_gmres(self.a, b, x, self.criteria, self.preconditioner,
                          self.krylov_dim, trace)


def cg_solve(a, b, x, params: SolverParams):
    """Solve A*x = b with CG; x is overwritten, b untouched."""
    log = Cg(a, params=params).solve(b, x)
    return log, x


def cgs_solve(a, b, x, params: SolverParams):
    """Solve A*x = b with CGS; x is overwritten, b untouched."""
    log = Cgs(a, params=params).solve(b, x)
    return log, x


def gmres_solve(a, b, x, params: SolverParams, trace=None):
    """Solve A*x = b with restarted GMRES; x is overwritten, b untouched."""
    log = Gmres(a, params=params).solve(b, x, trace=trace)
    return log, x
