"""Exception types raised across the package."""


class MonitorError(Exception):
    """Base class for all errors raised by stlmpm."""


class FormulaSyntaxError(MonitorError, SyntaxError):
    """Malformed formula text."""

    def __init__(self, message, text=None, pos=None):
        if text is not None and pos is not None:
            message = f"{message} at position {pos}: {text[:pos]}<<>>{text[pos:]}"
        super().__init__(message)
        self.text = text
        self.pos = pos


class IntervalOrderError(MonitorError, ValueError):
    """A temporal interval [a, b] with a > b (or a negative bound)."""


class UnknownPredicate(MonitorError, KeyError):
    """A formula references a predicate name that was never declared."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown predicate"


class NegatedTemporalError(MonitorError, ValueError):
    """Negation applied over a temporal operator."""


class FragmentError(MonitorError, ValueError):
    """Formula lies outside the supported fragment (e.g. temporal disjunction)."""


class DimensionMismatch(MonitorError, ValueError):
    """Predicate or state dimension does not match the grid."""


class ConfigError(MonitorError, ValueError):
    """Invalid model or scenario configuration."""


class OutOfDomain(MonitorError, ValueError):
    """A state lies outside the bounded state space."""


class HorizonError(MonitorError, ValueError):
    """A time step or horizon is inconsistent with the formula horizon."""


class ResourceLimit(MonitorError, RuntimeError):
    """An enumeration exceeded its configured budget."""


class AlreadyConcluded(MonitorError, RuntimeError):
    """Observation fed to a monitor that already issued a terminal verdict."""


class TrajectoryTooShort(MonitorError, ValueError):
    """Trajectory does not cover the horizon needed for evaluation."""
