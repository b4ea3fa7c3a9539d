"""Exception types raised by the solver."""


class FilmError(Exception):
    """Base class for all errors raised by :mod:`metalfilm`."""


class DomainError(FilmError, ValueError):
    """An input lies outside the domain where a formula is defined.

    ``context`` carries the parameter point (if known) so sweep code can
    report where the failure happened.
    """

    def __init__(self, message, context=None):
        self.context = dict(context or {})
        if self.context:
            where = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
            message = f"{message} [{where}]"
        super().__init__(message)


class ConvergenceError(FilmError, ArithmeticError):
    """The impedance series did not meet its tolerance before ``n_max``.

    The partially converged value and the tail estimate are kept on the
    exception so callers can decide whether the result is usable anyway.
    """

    def __init__(self, message, partial=None, tail_estimate=None, n_used=None):
        super().__init__(message)
        self.partial = partial
        self.tail_estimate = tail_estimate
        self.n_used = n_used


class ConfigError(FilmError, ValueError):
    """A run configuration is malformed (unknown key, bad unit, bad range)."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None and field not in message:
            message = f"{field}: {message}"
        super().__init__(message)
