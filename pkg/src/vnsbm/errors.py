"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation errors exit 2, capacity
guards exit 3, numerical failures exit 4.
"""


class VnsbmError(Exception):
    """Base class for all package errors."""


class ValidationError(VnsbmError):
    """Invalid inputs: bad parameters, malformed files, contract violations."""


class UnestimableEntryError(ValidationError):
    """A Bernoulli-matrix entry cannot be estimated from the available seeds."""

    def __init__(self, block_i, block_j, reason):
        self.block_pair = (block_i, block_j)
        super().__init__(
            f"cannot estimate edge probability for block pair "
            f"({block_i}, {block_j}): {reason}"
        )


class DegenerateChainError(ValidationError):
    """All ambiguous vertices share one label; the swap chain cannot move."""


class CapacityError(VnsbmError):
    """The requested computation exceeds a configured size guard."""


class NumericalError(VnsbmError):
    """A numerical procedure failed (e.g. covariance collapse in EM)."""
