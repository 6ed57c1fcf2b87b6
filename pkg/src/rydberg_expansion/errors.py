"""
Error Types Module

All exceptions raised by the package derive from :class:`RydbergError`. The command
line front end maps :class:`ConfigError` to exit status 2 and :class:`NumericalError`
to exit status 3.
"""


class RydbergError(Exception):
    """Base class for every error raised by rydberg_expansion."""


class ConfigError(RydbergError, ValueError):
    """
    Raised when a scenario configuration cannot be parsed or validated.

    Args:
        problems (list): ``(field, line, message)`` tuples; ``line`` is ``None`` when
                         the offending value did not come from a config file.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.describe()))

    def describe(self):
        """Returns one human readable diagnostic per problem."""
        lines = []
        for field, line, message in self.problems:
            where = f"line {line}: " if line is not None else ""
            lines.append(f"{where}{field}: {message}")
        return lines


class NumericalError(RydbergError):
    """A numerical procedure failed to deliver a trustworthy result."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge; ``abserr`` is the achieved estimate."""

    def __init__(self, message, abserr=None):
        self.abserr = abserr
        if abserr is not None:
            message = f"{message} (achieved error estimate {abserr:.3g})"
        super().__init__(message)


class DivergentIntegralError(NumericalError, ValueError):
    """The requested ensemble average is divergent or only conditionally convergent."""


class BandwidthError(NumericalError, ValueError):
    """A pulse with the requested bandwidth cannot be built."""


class EnsembleError(NumericalError, ValueError):
    """An atom ensemble or Monte Carlo geometry request cannot be honoured."""


class OracleError(NumericalError):
    """The exact many-body propagation failed."""


class FitError(NumericalError):
    """A power-law fit of expansion residuals is ill-conditioned."""


class ExpansionOrderError(FitError):
    """The fitted residual order is lower than the expansion guarantees."""


class UndefinedCorrelationError(NumericalError, ValueError):
    """The pair correlation is undefined because the pulse area vanishes."""
