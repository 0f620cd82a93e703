"""Exception types shared across the solver."""


class AledgError(Exception):
    """Base class for solver errors."""


class InvalidStateError(AledgError):
    """A fluid state violates positivity of density or pressure."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NegativePressureError(InvalidStateError):
    """Conserved state decodes to a non-positive pressure."""


class VacuumError(AledgError):
    """Riemann problem generates vacuum; no star-state pressure exists."""


class ConfigError(AledgError):
    """Bad run configuration (unknown key, malformed value, bad ranges)."""


class CapabilityError(AledgError):
    """Requested feature beyond supported limits (degree, quadrature order)."""


class MeshTanglingError(AledgError):
    """Mesh motion inverted or degenerated a cell."""


class DecompositionError(AledgError):
    """Interpolation-region decomposition does not tile the patch."""


class StepFailure(AledgError):
    """A time step produced a non-physical state that limiting could not fix."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell
