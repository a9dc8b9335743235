"""Exception hierarchy shared by the cavitywalk modules."""


class CavityWalkError(Exception):
    """Base class for all library errors."""


class GraphError(CavityWalkError, ValueError):
    """Invalid graph construction or graph file."""


class DimensionTooSmallError(GraphError):
    pass


class InvalidCouplingError(GraphError):
    pass


class EdgeListParseError(GraphError):
    pass


class AsymmetryError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class NegativeWeightError(GraphError):
    pass


class IsolatedVertexError(GraphError):
    pass


class DimensionMismatchError(CavityWalkError, ValueError):
    pass


class OutOfBoundsError(CavityWalkError, IndexError):
    pass


class NonHermitianError(CavityWalkError, ValueError):
    pass


class NumericalInvariantError(CavityWalkError, ArithmeticError):
    """A physical invariant (e.g. norm <= 1) was violated during propagation."""


class ConfigError(CavityWalkError, ValueError):
    """Configuration validation failure; ``errors`` holds field-level messages."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
