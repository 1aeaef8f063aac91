"""Mixed-precision dense and Krylov linear solvers.

Dense systems are factored in float32 and refined with float64 residuals;
sparse systems use an outer float64 FGMRES preconditioned by float32 GMRES
cycles.
"""
from .core import (
    HIGH,
    LOW,
    SINGLE_DOUBLE,
    CsrMatrix,
    DenseMatrix,
    Permutation,
    PrecisionPair,
    demote,
    matvec,
    norm2,
    promote,
    spectral_norm_estimate,
)
from .dense_direct import cholesky_factor, cholesky_solve, lu_factor, lu_solve
from .errors import (
    DimensionMismatch,
    FallbackRequired,
    MaxIterationsExceeded,
    NotPositiveDefinite,
    OverflowOnDemotion,
    SingularPivot,
    SolverError,
)
from .krylov import RestartConfig, fgmres_mixed, gmres_cycle, gmres_reference, hessenberg_lsq
from .mixed_ir import (
    Backend,
    BackwardError,
    IrConfig,
    MatchReference,
    SolveReport,
    datta_iterations,
    ir_solve,
    residual,
    solve_reference,
)

__all__ = [
    "HIGH", "LOW", "SINGLE_DOUBLE", "CsrMatrix", "DenseMatrix", "Permutation", "PrecisionPair",
    "demote", "matvec", "norm2", "promote", "spectral_norm_estimate",
    "cholesky_factor", "cholesky_solve", "lu_factor", "lu_solve",
    "DimensionMismatch", "FallbackRequired", "MaxIterationsExceeded", "NotPositiveDefinite",
    "OverflowOnDemotion", "SingularPivot", "SolverError",
    "RestartConfig", "fgmres_mixed", "gmres_cycle", "gmres_reference", "hessenberg_lsq",
    "Backend", "BackwardError", "IrConfig", "MatchReference", "SolveReport",
    "datta_iterations", "ir_solve", "residual", "solve_reference",
]
__version__ = "0.1.0"
