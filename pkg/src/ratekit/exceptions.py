"""Exception types raised across ratekit."""


class RatekitError(Exception):
    """Base class for all ratekit errors."""


class InvalidParameterError(RatekitError, ValueError):
    """A parameter is outside its domain (negative SNR, alpha < 2, ...)."""


class InfeasibleConfigurationError(RatekitError, ValueError):
    """A scheme configuration implies cluster sizes outside [1, n]."""


class ConvergenceError(RatekitError, RuntimeError):
    """An iterative procedure hit its iteration cap.

    The last iterate (or optimizer state) is kept on ``last`` so callers can
    inspect how far it got.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last
