"""Exception types raised by the filter library."""


class EqFError(Exception):
    """Base class for library errors."""


class CutLocus(EqFError):
    """Logarithm requested at a rotation of -pi, where it is not unique."""


class OriginMismatch(EqFError):
    """Two chart origins are not related by the requested group element."""


class NonFiniteState(EqFError):
    """A filter step produced NaN or inf entries."""

    def __init__(self, message, filter_index=None, step=None):
        super().__init__(message)
        self.filter_index = filter_index
        self.step = step


class ConfigError(EqFError):
    """Scenario configuration is malformed."""
