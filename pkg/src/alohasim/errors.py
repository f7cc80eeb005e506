"""Exception types shared across the package."""


class AlohaError(Exception):
    """Base class for package errors."""


class ConfigError(AlohaError):
    """Invalid experiment configuration or parameter set."""


class NumericError(AlohaError):
    """A numerical routine failed to reach its tolerance."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class SimulationOverflow(AlohaError):
    """Event budget exhausted before the stop rule fired."""
