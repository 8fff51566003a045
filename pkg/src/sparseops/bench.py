"""Benchmark harness for SpMV and solver kernels.

Protocol: everything (file read, format conversion, vector setup) is hoisted
before the warmup applies; the timed region is the bare apply call, which
performs no allocation and joins its worker threads before returning.  The
median over repetitions is reported; SpMV work is counted as 2*nnz flops per
apply.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .config import SolverConfig, build_solver, load_config, parse_config
from .core import Device, DeviceKind, Precision, dense_create, dense_from_array
from .errors import (
    BreakdownError,
    InvalidArgumentError,
    NumericFailureError,
    UndefinedBaselineError,
)
from .mmio import read_matrix_market
from .solvers import Iteration

__all__ = [
    "BenchRecord",
    "bench_spmv",
    "bench_solver",
    "compute_overhead",
    "emit_report",
    "load_report",
    "compare_reports",
]

# Column order of the CSV report; JSON additionally carries the protocol
# metadata fields (warmups, notes, ok).
CSV_COLUMNS = ("matrix", "rows", "cols", "nnz", "format", "device", "threads",
               "precision", "kernel", "reps", "time_s", "gflops", "speedup",
               "p_overhead_pct", "t_overhead_s")


@dataclass
class BenchRecord:
    """One timed measurement plus derived metrics."""

    matrix: str
    rows: int
    cols: int
    nnz: int
    format: str
    device: str
    threads: int
    precision: str
    kernel: str
    reps: int
    time_s: float | None
    gflops: float | None
    speedup: float | None = None
    p_overhead_pct: float | None = None
    t_overhead_s: float | None = None
    warmups: int = 0
    notes: str = ""
    ok: bool = True


def _device_name(device: Device) -> str:
    return "reference" if device.kind is DeviceKind.reference else "omp"


def _time_applies(op, b, x, warmups: int, reps: int, timer) -> list[float]:
    for _ in range(warmups):
        op.apply(b, x)
    times = []
    for _ in range(reps):
        t0 = timer()
        op.apply(b, x)
        t1 = timer()
        times.append(t1 - t0)
    return times


def bench_spmv(matrix_path, format: str = "csr", device: Device | None = None,
               precision: Precision = Precision.single, warmups: int = 3,
               reps: int = 20, seed: int = 0, timer=time.perf_counter) -> BenchRecord:
    """Time x = A*b with b drawn from a seeded generator.

    The apply call is the only thing inside the timer; warmup applies are
    excluded and the median over ``reps`` is reported.
    """
    if reps < 1 or warmups < 0:
        raise InvalidArgumentError("need reps >= 1 and warmups >= 0")
    from .core import create_device

    device = device or create_device("reference")
    a = read_matrix_market(device, matrix_path, precision, format)
    rng = np.random.default_rng(seed)
    b = dense_from_array(device, rng.random(a.cols, dtype=np.float64).astype(precision.dtype))
    x = dense_create(device, a.rows, 1, precision, 0.0)
    times = _time_applies(a, b, x, warmups, reps, timer)
    med = statistics.median(times)
    flops = 2.0 * a.nnz
    return BenchRecord(
        matrix=Path(matrix_path).stem,
        rows=a.rows, cols=a.cols, nnz=a.nnz,
        format=format.lower(), device=_device_name(device),
        threads=device.thread_count, precision=precision.value,
        kernel="spmv", reps=reps, time_s=med, gflops=flops / med / 1e9,
        warmups=warmups, notes=f"seed={seed}",
    )


def bench_solver(matrix_path, config=None, solver: str | None = None,
                 device: Device | None = None,
                 precision: Precision = Precision.double, fixed_iters: int = 1000,
                 warmups: int = 0, reps: int = 1,
                 timer=time.perf_counter) -> BenchRecord:
    """Time a fixed-iteration solve of A*x = b with b = ones and x0 = zeros.

    Whatever criteria the config carries are replaced by a single Iteration
    criterion, so every repetition runs exactly ``fixed_iters`` iterations.
    ``gflops`` counts the SpMV work 2*nnz per iteration; the per-iteration
    time lands in the record's notes.  A solver breakdown produces a failed
    record instead of raising.
    """
    if reps < 1 or warmups < 0:
        raise InvalidArgumentError("need reps >= 1 and warmups >= 0")
    if fixed_iters < 1:
        raise InvalidArgumentError("fixed_iters must be positive")
    from .core import create_device

    device = device or create_device("reference")
    a = read_matrix_market(device, matrix_path, precision, "Csr")
    if config is None and solver is None:
        raise InvalidArgumentError("pass a config tree/path or a solver name")
    if config is not None:
        base = config if isinstance(config, SolverConfig) else (
            load_config(config) if isinstance(config, (str, Path)) else parse_config(config)
        )
    else:
        name = str(solver).lower()
        types = {"cg": "solver::Cg", "cgs": "solver::Cgs", "gmres": "solver::Gmres"}
        if name not in types:
            raise InvalidArgumentError(f"unknown solver {solver!r}; expected cg, cgs or gmres")
        base = SolverConfig(types[name], (Iteration(fixed_iters),))
    fixed = SolverConfig(base.type, (Iteration(fixed_iters),),
                         base.preconditioner, base.krylov_dim)
    kernel = fixed.type.split("::")[1].lower()
    record = BenchRecord(
        matrix=Path(matrix_path).stem,
        rows=a.rows, cols=a.cols, nnz=a.nnz,
        format="csr", device=_device_name(device), threads=device.thread_count,
        precision=precision.value, kernel=kernel, reps=reps,
        time_s=None, gflops=None, warmups=warmups,
    )
    b = dense_create(device, a.rows, 1, precision, 1.0)
    x = dense_create(device, a.rows, 1, precision, 0.0)
    try:
        op = build_solver(fixed, device, a)
        for _ in range(warmups):
            x.values[:] = 0
            op.apply(b, x)
        times = []
        for _ in range(reps):
            x.values[:] = 0
            t0 = timer()
            op.apply(b, x)
            t1 = timer()
            times.append(t1 - t0)
    except (BreakdownError, NumericFailureError) as exc:
        record.ok = False
        record.notes = f"{exc.kind}: {exc}"
        return record
    med = statistics.median(times)
    record.time_s = med
    record.gflops = 2.0 * a.nnz * fixed_iters / med / 1e9
    record.notes = f"iters={fixed_iters} time_per_iter={med / fixed_iters:.9e}"
    return record


def compute_overhead(perf_ref: float, perf_bound: float,
                     t_ref: float, t_bound: float) -> tuple[float, float]:
    """Relative performance difference (percent) and absolute time difference.

    The time difference may be negative under system noise.
    """
    if perf_ref <= 0:
        raise UndefinedBaselineError(f"reference performance must be positive, got {perf_ref}")
    p = (perf_ref - perf_bound) / perf_ref * 100.0
    t = t_bound - t_ref
    return p, t


# ---------------------------------------------------------------------------
# reports


def _csv_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def emit_report(records: list[BenchRecord], format: str = "csv", path=None) -> str:
    """Serialize records; CSV uses exactly the canonical column set, JSON all
    record fields.  Returns the text and writes it when a path is given."""
    fmt = format.lower()
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for r in records:
            d = asdict(r)
            lines.append(",".join(_csv_cell(d[c]) for c in CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        import json

        text = json.dumps([asdict(r) for r in records], indent=2) + "\n"
    else:
        raise InvalidArgumentError(f"unknown report format {format!r}; expected csv or json")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


_INT_FIELDS = {"rows", "cols", "nnz", "threads", "reps", "warmups"}
_FLOAT_FIELDS = {"time_s", "gflops", "speedup", "p_overhead_pct", "t_overhead_s"}


def load_report(path, format: str | None = None) -> list[BenchRecord]:
    """Read a report back into records (format inferred from the extension)."""
    fmt = (format or Path(path).suffix.lstrip(".")).lower()
    if fmt == "json":
        import json

        with open(path, "r", encoding="utf-8") as fh:
            rows = json.load(fh)
        known = {f.name for f in fields(BenchRecord)}
        return [BenchRecord(**{k: v for k, v in row.items() if k in known}) for row in rows]
    if fmt == "csv":
        import csv as csv_mod

        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv_mod.DictReader(fh)
            records = []
            for row in reader:
                kwargs = {}
                for key, raw in row.items():
                    if key not in CSV_COLUMNS:
                        continue
                    if raw == "" or raw is None:
                        kwargs[key] = None
                    elif key in _INT_FIELDS:
                        kwargs[key] = int(raw)
                    elif key in _FLOAT_FIELDS:
                        kwargs[key] = float(raw)
                    else:
                        kwargs[key] = raw
                records.append(BenchRecord(**kwargs))
        return records
    raise InvalidArgumentError(f"unknown report format {fmt!r}; expected csv or json")


def compare_reports(baseline: list[BenchRecord],
                    candidate: list[BenchRecord]) -> list[BenchRecord]:
    """Join two reports on (matrix, kernel, format, precision) and attach
    speedup and overhead columns to the candidate records.

    Speedup is baseline time over candidate time; the overhead columns treat
    the baseline as the reference implementation.
    """
    index = {}
    for r in baseline:
        index[(r.matrix, r.kernel, r.format, r.precision)] = r
    out = []
    for r in candidate:
        ref = index.get((r.matrix, r.kernel, r.format, r.precision))
        merged = BenchRecord(**asdict(r))
        if (ref is not None and ref.ok and merged.ok
                and ref.time_s and merged.time_s and ref.gflops):
            merged.speedup = ref.time_s / merged.time_s
            p, t = compute_overhead(ref.gflops, merged.gflops or 0.0,
                                    ref.time_s, merged.time_s)
            merged.p_overhead_pct = p
            merged.t_overhead_s = t
        out.append(merged)
    return out
