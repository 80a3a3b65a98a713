"""Exception hierarchy shared by every module."""


class WignerBellError(ValueError):
    """Base class for all input/consistency errors raised by the package."""


class InvalidMassError(WignerBellError):
    pass


class InconsistentMomentumError(WignerBellError):
    pass


class InvalidAxisError(WignerBellError):
    pass


class InvalidOmegaError(WignerBellError):
    pass


class DecompositionError(WignerBellError):
    pass


class NonUnitaryError(WignerBellError):
    pass


class PauliExclusionError(WignerBellError):
    """Two fermions were asked to occupy the same mode."""


class GridCollisionError(WignerBellError):
    """Distinct momenta landed on the same quantization cell."""


class NotADensityMatrixError(WignerBellError):
    pass


class NormalizationError(WignerBellError):
    pass


class BoundaryLeakError(WignerBellError):
    """Wavefunction is not negligible on the outer shells of the momentum grid."""
