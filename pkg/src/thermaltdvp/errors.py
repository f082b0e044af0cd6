"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific type that applies.
"""


class SizeMismatchError(ValueError):
    """Operands act on different numbers of sites, or a position is out of range."""


class PauliFormatError(ValueError):
    """Malformed textual Pauli string."""


class MatrixCapError(ValueError):
    """Dense-matrix construction refused: system size above the configured cap."""


class NonUnitaryError(ValueError):
    """A matrix that must be unitary is not, beyond tolerance."""


class ConfigError(ValueError):
    """Invalid run configuration (bad field value, unreadable file, schema problem)."""


class ConvergenceError(RuntimeError):
    """Krylov exponentiation failed to reach the requested residual.

    Carries the last residual estimate in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericalConsistencyError(RuntimeError):
    """A quantity that must be real (or otherwise constrained) violated its tolerance."""


class StatePreparationError(RuntimeError):
    """The MPS is not in the gauge/preparation required by the operation."""


class InternalStateError(RuntimeError):
    """An internal invariant was violated (stale cache, bad tableau); indicates a bug."""
