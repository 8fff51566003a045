"""sparseops: sparse linear algebra operators for Python.

CSR/COO storage with deterministic multithreaded SpMV, Krylov solvers (CG,
CGS, restarted GMRES) with composable stopping criteria, ILU(0)/IC(0)/Jacobi
preconditioners, Matrix Market I/O, a config-driven solver factory, and a
benchmark CLI.  Everything that models a linear operation shares one
``apply`` contract and composes into solver pipelines.
"""

from . import errors
from .bench import (
    BenchRecord,
    bench_solver,
    bench_spmv,
    compare_reports,
    compute_overhead,
    emit_report,
    load_report,
)
from .config import (
    PreconditionerConfig,
    SolverConfig,
    build_solver,
    config_solve,
    load_config,
    parse_config,
)
from .core import (
    DenseMatrix,
    Device,
    DeviceKind,
    IndexWidth,
    Precision,
    axpy,
    copy_into,
    create_device,
    dense_create,
    dense_from_array,
    dot,
    norm2,
    scal,
)
from .formats import (
    CooMatrix,
    CsrMatrix,
    coo_from_arrays,
    coo_from_csr,
    coo_from_triplets,
    csr_from_coo,
    csr_from_dense,
    validate,
)
from .linop import (
    LinOp,
    apply_advanced,
    solve_lower_tri,
    solve_upper_tri,
    spmv_coo,
    spmv_csr,
)
from .mmio import (
    DuplicateEntryWarning,
    MatrixMarketHeader,
    read_matrix_market,
    write_matrix_market,
)
from .precond import (
    IcFactor,
    IluFactors,
    JacobiPreconditioner,
    ic0_factorize,
    ic_apply,
    ilu0_factorize,
    ilu_apply,
    jacobi_create,
)
from .solvers import (
    Cg,
    Cgs,
    ConvergenceLog,
    Gmres,
    GmresTraceEvent,
    Iteration,
    ResidualNorm,
    SolverParams,
    cg_solve,
    cgs_solve,
    check_criteria,
    gmres_solve,
    givens_rotation,
)

__version__ = "0.1.0"
