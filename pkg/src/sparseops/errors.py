"""Exception hierarchy shared across the library.

Every exception carries a machine-readable ``kind`` string so wrapping layers
can re-express errors without parsing messages.
"""


class SparseOpsError(Exception):
    """Base class for all library errors."""

    kind = "error"


class InvalidArgumentError(SparseOpsError):
    kind = "invalid-argument"


class UnknownDeviceError(SparseOpsError):
    kind = "unknown-device"


class UnsupportedBackendError(SparseOpsError):
    """A device name that exists in the wider ecosystem but not in this build."""

    kind = "unsupported-backend"


class UnsupportedFeatureError(SparseOpsError):
    kind = "unsupported-feature"


class DimensionMismatchError(SparseOpsError):
    kind = "dimension-mismatch"


class PrecisionMismatchError(SparseOpsError):
    kind = "precision-mismatch"


class IndexBoundsError(SparseOpsError):
    kind = "index-bounds"


class MatrixMarketError(SparseOpsError):
    """Base class for Matrix Market parsing failures."""

    kind = "mmio-malformed"


class MalformedBannerError(MatrixMarketError):
    kind = "mmio-bad-banner"


class MalformedSizeError(MatrixMarketError):
    kind = "mmio-bad-size"


class EntryCountError(MatrixMarketError):
    kind = "mmio-entry-count"


class UnsupportedFieldError(MatrixMarketError):
    kind = "mmio-unsupported-field"


class SingularTriangleError(SparseOpsError):
    kind = "singular-triangle"

    def __init__(self, row, message=None):
        super().__init__(message or f"zero diagonal in triangular solve at row {row}")
        self.row = row


class NotTriangularError(SparseOpsError):
    kind = "not-triangular"

    def __init__(self, row, message=None):
        super().__init__(message or f"entry on the wrong side of the diagonal in row {row}")
        self.row = row


class BreakdownError(SparseOpsError):
    """Krylov recurrence broke down (zero or indefinite denominator)."""

    kind = "breakdown"

    def __init__(self, iteration, message=None):
        super().__init__(message or f"solver breakdown at iteration {iteration}")
        self.iteration = iteration


class NumericFailureError(SparseOpsError):
    kind = "numeric-failure"


class ZeroPivotError(SparseOpsError):
    kind = "zero-pivot"

    def __init__(self, row, message=None):
        super().__init__(message or f"zero pivot at row {row}")
        self.row = row


class IndefinitePivotError(SparseOpsError):
    kind = "indefinite-pivot"

    def __init__(self, row, message=None):
        super().__init__(message or f"non-positive pivot at row {row}")
        self.row = row


class SingularDiagonalError(SparseOpsError):
    kind = "singular-diagonal"

    def __init__(self, row, message=None):
        super().__init__(message or f"zero or missing diagonal at row {row}")
        self.row = row


class ConfigError(SparseOpsError):
    """Configuration tree rejected; ``path`` locates the offending key."""

    kind = "config-invalid"

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class UndefinedBaselineError(SparseOpsError):
    kind = "undefined-baseline"
