"""Exception hierarchy shared by all modules."""


class ProjSphereError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(ProjSphereError, ValueError):
    """Malformed input: wrong shape, non-finite entries, violated precondition."""


class DegenerateInputError(InvalidInputError):
    """Input is well formed but geometrically degenerate (e.g. collinear points)."""


class RankAmbiguityError(ProjSphereError):
    """A singular value fell inside the guard band around the rank threshold."""

    def __init__(self, message, singular_value=None, threshold=None):
        super().__init__(message)
        self.singular_value = singular_value
        self.threshold = threshold


class RankDisagreementError(ProjSphereError):
    """Two independent rank computations returned different answers."""


class BlockFormError(ProjSphereError):
    """A matrix does not have the rotation-block / free-block shape."""

    def __init__(self, message, block=None, norm=None):
        super().__init__(message)
        self.block = block
        self.norm = norm


class FinslerConditionError(ProjSphereError):
    """The 1-form is too large: the Randers function is not a Finsler metric."""

    def __init__(self, message, max_norm=None):
        super().__init__(message)
        self.max_norm = max_norm


class EnergyDriftError(ProjSphereError):
    """Geodesic integration lost conservation of F along the solution."""

    def __init__(self, message, drift=None):
        super().__init__(message)
        self.drift = drift
