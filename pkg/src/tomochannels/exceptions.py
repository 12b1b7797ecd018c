"""Exception and warning types raised across the package."""


class InvalidStateError(ValueError):
    """Matrix or Bloch vector does not describe a valid qubit state."""


class NonTracePreservingError(ValueError):
    """Kraus operators do not satisfy sum_i A_i^dag A_i = I."""


class NotCompletelyPositiveError(ValueError):
    """A channel mapped a valid state outside the state space."""

    def __init__(self, message, bloch=None):
        super().__init__(message)
        self.bloch = bloch


class ChannelParameterError(ValueError):
    """Channel parameters violate a defining inequality."""


class GridResolutionError(ValueError):
    """Quadrature grid too coarse for exact integration."""


class GridAlignmentError(ValueError):
    """Phase grid incompatible with the requested index shift."""


class TruncationWarning(UserWarning):
    """A truncated integral may have lost non-negligible mass."""
