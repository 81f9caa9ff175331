"""Exception hierarchy shared by the numerical modules."""


class SusyOscError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(SusyOscError):
    """A computation could not reach its accuracy target."""


class NonConvergent(NumericalError):
    pass


class PoleAtB(SusyOscError, ValueError):
    pass


class DomainError(SusyOscError, ValueError):
    pass


class QuadratureFailure(NumericalError):
    pass


class ZeroWronskian(NumericalError):
    """The Wronskian of the seeds vanishes, so the transformation is singular."""


class DeletedLevel(SusyOscError, ValueError):
    """The requested oscillator level is annihilated by the intertwiner."""


class ParameterPole(SusyOscError, ValueError):
    pass


class SubspaceMismatch(SusyOscError, ValueError):
    pass


class ZeroMeanOccupation(SusyOscError, ZeroDivisionError):
    """Mandel Q is 0/0 for a state with no excitations."""


class OscillatorOverflow(NumericalError, OverflowError):
    pass


class ConfigError(SusyOscError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
