"""Exception types shared across the package."""


class ShapeMismatchError(ValueError):
    """Operands live on different numbers of sites."""


class DimensionError(ValueError):
    """Dense operator dimension is not a power of two."""


class ConfigurationError(ValueError):
    """Invalid circuit/run configuration (odd L, bad boundary, out of range)."""


class ResourceError(ValueError):
    """Requested computation exceeds the dense/desk-scale limits."""


class NotCriticalError(ValueError):
    """Gate parameters do not lie on the critical manifold."""


class NotUqPointError(ValueError):
    """Gate parameters do not satisfy a quantum-group symmetry condition."""


class MultipletMismatchError(RuntimeError):
    """Degeneracy pattern of the propagator is not SU(2)-compatible."""

    def __init__(self, message, observed=None, expected=None):
        super().__init__(message)
        self.observed = observed
        self.expected = expected


class GaugeAmbiguityError(RuntimeError):
    """Magnetization eigenvalues repeat inside a degenerate block.

    Signals degeneracy beyond a single SU(2) multiplet per block; the
    block-wise ladder construction would be ambiguous, so we abort with
    diagnostics instead of picking an arbitrary basis.
    """

    def __init__(self, message, block_phases=None, z_eigenvalues=None):
        super().__init__(message)
        self.block_phases = block_phases
        self.z_eigenvalues = z_eigenvalues


class FitWindowError(RuntimeError):
    """Exponent fit window is unusable (too few points or non-positive data)."""
