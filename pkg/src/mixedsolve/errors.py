"""Exception hierarchy shared by the solvers and the I/O layer."""


class SolverError(Exception):
    """Base class for every error raised by mixedsolve."""


class DimensionMismatch(SolverError, ValueError):
    pass


class InvalidMatrix(SolverError, ValueError):
    """A matrix violates a structural invariant (non-finite entry, bad CSR layout)."""


class OverflowOnDemotion(SolverError, OverflowError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"entry {value!r} exceeds the largest finite low-precision value")


class SingularPivot(SolverError, ArithmeticError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"exactly zero pivot at column {k}")


class NotPositiveDefinite(SolverError, ArithmeticError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"non-positive diagonal update at column {k}")


class RankDeficient(SolverError, ArithmeticError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"rotated Hessenberg diagonal {k} is exactly zero")


class FallbackRequired(SolverError):
    """The mixed-precision path cannot deliver a high-precision answer.

    Raised when the low-precision factorization breaks down or refinement
    hits its iteration cap. ``x`` and ``report`` hold the last iterate and
    telemetry (both ``None`` when the factorization itself failed); ``cause``
    is the underlying exception, if any.
    """

    def __init__(self, reason, x=None, report=None, cause=None):
        self.reason = reason
        self.x = x
        self.report = report
        self.cause = cause
        super().__init__(reason)


class MaxIterationsExceeded(SolverError):
    def __init__(self, x, report):
        self.x = x
        self.report = report
        super().__init__(f"no convergence after {report.iterations} iterations")


class UnknownMatrixId(SolverError, KeyError):
    pass


class ParseError(SolverError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class SchemaMismatch(SolverError, ValueError):
    pass
