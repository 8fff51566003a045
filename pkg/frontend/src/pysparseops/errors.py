"""Frontend-side exceptions.

Core exceptions propagate unchanged (they already carry a machine-readable
``kind``); these cover failures that only exist at the binding boundary.
"""


class BindingError(Exception):
    kind = "binding-error"


class NoMatchingInstantiationError(BindingError):
    """No compiled instantiation matches the runtime argument types."""

    kind = "no-matching-instantiation"

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class InstantiationMismatchError(BindingError):
    """A suffixed binding was called with types other than its fixed ones."""

    kind = "instantiation-mismatch"


class CopyRequiredError(BindingError):
    """Zero-copy wrapping was demanded but the source needs conversion."""

    kind = "copy-required"


class OrthonormalityError(BindingError):
    """A subspace basis failed its orthonormality precondition."""

    kind = "not-orthonormal"

    def __init__(self, deviation, tolerance):
        super().__init__(
            f"basis columns deviate from orthonormality by {deviation:.3e} "
            f"(tolerance {tolerance:.1e})"
        )
        self.deviation = deviation
