"""Exception types shared across the package."""


class ExpShockError(Exception):
    """Base class for all errors raised by this package"""


class DomainError(ExpShockError):
    """A query point fell outside the domain of a grid or field"""


class StencilError(ExpShockError):
    """A finite-difference or interpolation stencil does not fit on the grid"""


class CollapseError(ExpShockError):
    """The area radius reached zero during an integration"""


class TrappedRegionError(ExpShockError):
    """The evolution entered a region with 1 - 2m/r <= 0"""


class SignatureError(ExpShockError):
    """A metric function lost its required sign (1 - mu + rdot^2 <= 0)"""


class CellDivergenceError(ExpShockError):
    """The implicit cell update failed to converge"""


class StepDivergenceError(ExpShockError):
    """The boundary advance fixed point failed to converge"""


class InvariantViolationError(ExpShockError):
    """A quantity left the range required by the formation problem"""


class NoInterfaceError(ExpShockError):
    """No phase-boundary level crossing was found in the field"""


class NonSpacelikeInterfaceError(ExpShockError):
    """The extracted interface curve is not spacelike where required"""


class DegenerateEndpointError(ExpShockError):
    """An interface endpoint does not satisfy the tangency conditions"""


class UndefinedNormalError(ExpShockError):
    """The interface normal is not defined at the requested point"""


class InsufficientCollarError(ExpShockError):
    """Too few nodes on one side of the interface for the requested stencil"""


class NonGenericScenarioError(ExpShockError):
    """Scenario data violates a genericity condition (k > 0, j > 0, l > 1)"""


class InfeasibleScenarioError(ExpShockError):
    """Scenario data violates a feasibility bound (r0 > 0, a-, mu0 < 1)"""


class DegenerateJumpError(ExpShockError):
    """The jump relations degenerate (shock speed reached 1)"""


class CornerDegenerateError(ExpShockError):
    """The velocity update is 0/0 at the corner; use the asymptotic seed"""


class HardPhaseDegeneracyError(ExpShockError):
    """A hard-phase diagnostic lost positivity where it is required"""


class AnchorError(ExpShockError):
    """A regularized-problem anchor could not be placed"""


class InternalInconsistencyError(ExpShockError):
    """Two independent routes to the same quantity disagree"""


class ConditioningError(ExpShockError):
    """A least-squares fit was too ill-conditioned to trust"""


class ConfigError(ExpShockError):
    """A run configuration file is malformed or inconsistent"""
