"""Quantum channels acting on qubit and single-mode optical tomograms."""

from . import bosonic, numerics, qstate, qubit_kernels, qubit_tomography
from .exceptions import (
    ChannelParameterError,
    GridAlignmentError,
    GridResolutionError,
    InvalidStateError,
    NonTracePreservingError,
    NotCompletelyPositiveError,
    TruncationWarning,
)

__version__ = "0.1.0"

__all__ = [
    "bosonic",
    "numerics",
    "qstate",
    "qubit_kernels",
    "qubit_tomography",
    "ChannelParameterError",
    "GridAlignmentError",
    "GridResolutionError",
    "InvalidStateError",
    "NonTracePreservingError",
    "NotCompletelyPositiveError",
    "TruncationWarning",
]
