"""Raw typed bindings.

The core instantiates every kernel per (value type, index type); this module
exposes one callable per instantiation, disambiguated by a type suffix:
``dot_double``, ``csr_spmv_float_i32``, and so on.  Each callable checks that
its arguments carry exactly the fixed types and then delegates to one core
operation; nothing else happens here.  The higher-level API dispatches to
these by runtime dtype.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import sparseops as core

from .errors import InstantiationMismatchError

VALUE_DTYPES = {"float": np.dtype(np.float32), "double": np.dtype(np.float64)}
INDEX_DTYPES = {"i32": np.dtype(np.int32), "i64": np.dtype(np.int64)}
_PRECISIONS = {"float": core.Precision.single, "double": core.Precision.double}
_WIDTHS = {"i32": core.IndexWidth.i32, "i64": core.IndexWidth.i64}

# op name -> True when the op is additionally instantiated per index type
OPS = {
    "dense_create": False,
    "dense": False,
    "dot": False,
    "norm2": False,
    "axpy": False,
    "scal": False,
    "csr_spmv": True,
    "coo_spmv": True,
    "lower_trisolve": True,
    "upper_trisolve": True,
    "read_csr": True,
    "read_coo": True,
}


@dataclass(frozen=True)
class Instantiation:
    op: str
    value: str
    index: str | None

    @property
    def name(self) -> str:
        return self.op + "_" + self.value + ("" if self.index is None else "_" + self.index)


REGISTRY: dict[str, Instantiation] = {}


def candidates(op: str) -> list[str]:
    """All exported instantiation names of one operation."""
    return sorted(name for name, inst in REGISTRY.items() if inst.op == op)


def _require(ok, name, detail):
    if not ok:
        raise InstantiationMismatchError(f"{name}: {detail}")


def _check_vec(name, v, vdt, role):
    _require(isinstance(v, core.DenseMatrix), name, f"{role} must be a dense tensor")
    _require(v.values.dtype == vdt, name,
             f"{role} has dtype {v.values.dtype}, this instantiation is fixed to {vdt}")


def _check_mat(name, m, cls, vdt, idt):
    _require(isinstance(m, cls), name, f"expected {cls.__name__}")
    _require(m.values.dtype == vdt, name,
             f"matrix values are {m.values.dtype}, this instantiation is fixed to {vdt}")
    _require(m.col_idxs.dtype == idt, name,
             f"matrix indices are {m.col_idxs.dtype}, this instantiation is fixed to {idt}")


def _build(inst: Instantiation):
    name = inst.name
    vdt = VALUE_DTYPES[inst.value]
    precision = _PRECISIONS[inst.value]
    idt = INDEX_DTYPES[inst.index] if inst.index else None
    width = _WIDTHS[inst.index] if inst.index else None
    op = inst.op

    if op == "dense_create":
        def fn(device, rows, cols, fill):
            return core.dense_create(device, rows, cols, precision, fill)
    elif op == "dense":
        def fn(device, array):
            arr = np.asarray(array)
            _require(arr.dtype == vdt, name,
                     f"array dtype {arr.dtype}, this instantiation is fixed to {vdt}")
            return core.dense_from_array(device, arr)
    elif op == "dot":
        def fn(x, y):
            _check_vec(name, x, vdt, "x")
            _check_vec(name, y, vdt, "y")
            return core.dot(x, y)
    elif op == "norm2":
        def fn(x):
            _check_vec(name, x, vdt, "x")
            return core.norm2(x)
    elif op == "axpy":
        def fn(alpha, x, y):
            _check_vec(name, x, vdt, "x")
            _check_vec(name, y, vdt, "y")
            return core.axpy(alpha, x, y)
    elif op == "scal":
        def fn(alpha, x):
            _check_vec(name, x, vdt, "x")
            return core.scal(alpha, x)
    elif op == "csr_spmv":
        def fn(a, b, x):
            _check_mat(name, a, core.CsrMatrix, vdt, idt)
            return core.spmv_csr(a, b, x)
    elif op == "coo_spmv":
        def fn(a, b, x):
            _check_mat(name, a, core.CooMatrix, vdt, idt)
            return core.spmv_coo(a, b, x)
    elif op == "lower_trisolve":
        def fn(l, b, x, unit_diag=False):
            _check_mat(name, l, core.CsrMatrix, vdt, idt)
            return core.solve_lower_tri(l, b, x, unit_diag)
    elif op == "upper_trisolve":
        def fn(u, b, x):
            _check_mat(name, u, core.CsrMatrix, vdt, idt)
            return core.solve_upper_tri(u, b, x)
    elif op == "read_csr":
        def fn(device, path):
            return core.read_matrix_market(device, path, precision, "Csr", width)
    elif op == "read_coo":
        def fn(device, path):
            return core.read_matrix_market(device, path, precision, "Coo", width)
    else:  # pragma: no cover - registry and builders move in lockstep
        raise AssertionError(op)

    fn.__name__ = name
    fn.__qualname__ = name
    fn.__doc__ = (f"{op} instantiated for value type '{inst.value}'"
                  + (f" and index type '{inst.index}'" if inst.index else "") + ".")
    return fn


def _populate():
    for op, indexed in OPS.items():
        for value in VALUE_DTYPES:
            if indexed:
                for index in INDEX_DTYPES:
                    inst = Instantiation(op, value, index)
                    REGISTRY[inst.name] = inst
                    globals()[inst.name] = _build(inst)
            else:
                inst = Instantiation(op, value, None)
                REGISTRY[inst.name] = inst
                globals()[inst.name] = _build(inst)


_populate()

__all__ = ["REGISTRY", "Instantiation", "candidates", "VALUE_DTYPES", "INDEX_DTYPES",
           *sorted(REGISTRY)]
