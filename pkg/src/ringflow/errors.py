"""Exception hierarchy shared by all ringflow modules."""


class RingflowError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RingflowError):
    """A scenario, model, or discretization parameter violates its contract."""


class InvalidDensityRange(ValidationError):
    """An initial cell average lies outside [0, R_i] for its class."""


class SimplexViolation(ValidationError):
    """Total-density coupling requires sum_i rho_i^0 <= R on every cell."""


class MixedMaxDensity(ValidationError):
    """Total-density coupling requires all classes to share one maximal density."""


class NonCommensurateDomain(ValidationError):
    """The domain length is not an integer multiple of dx."""


class NonCommensurateSupport(ValidationError):
    """A kernel support length is not an integer multiple of dx."""


class DelayAlignmentFailure(ValidationError):
    """No admissible time step makes every delay an integer number of steps."""


class CflViolation(ValidationError):
    """A forced time step exceeds the monotonicity CFL bound."""


class KernelWiderThanDomain(ValidationError):
    """A periodic run needs the kernel support to fit inside the domain."""


class PenetrationOutOfRange(ValidationError):
    """Penetration rate (plus any perturbation) must keep both shares in [0, 1]."""


class GridMismatch(ValidationError):
    """Two trajectories must share grid and class layout to be compared."""


class NonNestedGrids(ValidationError):
    """Refinement studies require strictly halving cell widths."""


class CouplingUnsupported(ValidationError):
    """The requested diagnostic is defined only for per-class coupling."""


class MissingTvSeries(ValidationError):
    """The trajectory lacks the per-step total-variation series."""


class OutputTimeOutOfRange(ValidationError):
    """A requested snapshot time lies outside [0, T]."""


class ParseError(RingflowError):
    """A scenario file is not well-formed."""


class SchemaError(RingflowError):
    """A scenario file carries unknown or ill-typed keys."""


class BoundViolation(RingflowError):
    """A computed cell value left its admissible interval; signals a CFL or
    configuration bug, never expected on valid runs."""
