"""Qubit states and channels: Bloch vectors, density matrices, Kraus / Pauli
mixture / affine channel forms, Choi matrices and complete-positivity checks.

Pauli matrices use the standard basis: sigma_x real off-diagonal, sigma_y
off-diagonal +-i, sigma_z diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import InvalidStateError, NonTracePreservingError, NotCompletelyPositiveError
from .numerics import DEFAULT_CONFIG, eigvalsh2, eigvalsh_hermitian

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
AXES = ("x", "y", "z")


def pauli(axis: str) -> np.ndarray:
    try:
        return PAULIS[AXES.index(axis)]
    except ValueError:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}") from None


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, a) -> "BlochVector":
        a = np.asarray(a, dtype=float).reshape(3)
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 2x2 qubit state. The stored matrix is exactly Hermitian."""

    entries: np.ndarray
    tol: float = field(default=DEFAULT_CONFIG.state_tol, repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"density matrix must be 2x2, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > self.tol:
            raise InvalidStateError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = m.trace().real
        if abs(tr - 1) > self.tol:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        lo = eigvalsh2(m)[0]
        if lo < -self.tol:
            raise InvalidStateError(f"negative eigenvalue {lo!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh2(self.entries)


def bloch_to_density(a, tol: float = DEFAULT_CONFIG.state_tol) -> DensityMatrix:
    """rho = (I + a_x sx + a_y sy + a_z sz) / 2."""
    vec = a.as_array() if isinstance(a, BlochVector) else np.asarray(a, dtype=float).reshape(3)
    norm = float(np.linalg.norm(vec))
    if norm > 1 + tol:
        raise InvalidStateError(f"Bloch vector has length {norm:.6g} > 1")
    return DensityMatrix(bloch_operator(vec), tol=tol)


def bloch_operator(vec) -> np.ndarray:
    """Unvalidated (I + a.sigma)/2 for any real or complex 3-vector."""
    vec = np.asarray(vec).reshape(3)
    return 0.5 * (IDENTITY + vec[0] * SIGMA_X + vec[1] * SIGMA_Y + vec[2] * SIGMA_Z)


def density_to_bloch(rho) -> BlochVector:
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidStateError(f"expected a 2x2 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > DEFAULT_CONFIG.state_tol:
        raise InvalidStateError("matrix is not Hermitian")
    return BlochVector(
        float(2 * m[0, 1].real),
        float(-2 * m[0, 1].imag),
        float((m[0, 0] - m[1, 1]).real),
    )


def pauli_components(op) -> np.ndarray:
    """(Tr op, Tr op sx, Tr op sy, Tr op sz); complex for non-Hermitian input."""
    op = np.asarray(op, dtype=complex)
    return np.array([np.trace(op)] + [np.trace(op @ s) for s in PAULIS])


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple
    tol: float = field(default=DEFAULT_CONFIG.tp_tol, repr=False)

    def __post_init__(self):
        ops = tuple(np.array(a, dtype=complex) for a in self.operators)
        if not ops:
            raise NonTracePreservingError("empty Kraus set")
        for a in ops:
            if a.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {a.shape}")
            a.setflags(write=False)
        total = sum(a.conj().T @ a for a in ops)
        dev = float(np.max(np.abs(total - IDENTITY)))
        if dev > self.tol:
            raise NonTracePreservingError(f"sum A^dag A deviates from I by {dev:.3g}")
        object.__setattr__(self, "operators", ops)

    @classmethod
    def identity(cls) -> "KrausChannel":
        return cls((IDENTITY,))

    @classmethod
    def unitary(cls, u) -> "KrausChannel":
        return cls((np.asarray(u),))

    @classmethod
    def amplitude_damping(cls, gamma: float) -> "KrausChannel":
        if not 0 <= gamma <= 1:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        a0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
        a1 = np.array([[0, math.sqrt(gamma)], [0, 0]])
        return cls((a0, a1))


@dataclass(frozen=True)
class PauliMixture:
    """rho -> p0 rho + px sx rho sx + py sy rho sy + pz sz rho sz."""

    p0: float
    px: float
    py: float
    pz: float

    def __post_init__(self):
        probs = self.probabilities
        if np.any(probs < 0):
            raise ValueError(f"negative probability in {tuple(probs)}")
        if abs(probs.sum() - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, expected 1")

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([self.p0, self.px, self.py, self.pz], dtype=float)

    @property
    def scalings(self) -> np.ndarray:
        """Diagonal Bloch scalings (lambda_x, lambda_y, lambda_z)."""
        p0, px, py, pz = self.probabilities
        return np.array([p0 + px - py - pz, p0 - px + py - pz, p0 - px - py + pz])


@dataclass(frozen=True)
class AffineQubitChannel:
    """Bloch map a -> (t_i + lambda_i a_i). No CP check at construction."""

    t: tuple = (0.0, 0.0, 0.0)
    lam: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(v) for v in self.t))
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        if len(self.t) != 3 or len(self.lam) != 3:
            raise ValueError("t and lam need three components each")

    @property
    def is_unital(self) -> bool:
        return not any(self.t)


ChannelSpec = Union[KrausChannel, PauliMixture, AffineQubitChannel]


def channel_map(spec: ChannelSpec, op) -> np.ndarray:
    """Linear action of the channel on an arbitrary 2x2 matrix."""
    op = np.asarray(op, dtype=complex)
    if isinstance(spec, KrausChannel):
        return sum(a @ op @ a.conj().T for a in spec.operators)
    if isinstance(spec, PauliMixture):
        p0, px, py, pz = spec.probabilities
        return p0 * op + sum(p * s @ op @ s for p, s in zip((px, py, pz), PAULIS))
    if isinstance(spec, AffineQubitChannel):
        c = pauli_components(op)
        vec = c[0] * np.asarray(spec.t) + np.asarray(spec.lam) * c[1:]
        return c[0] * IDENTITY / 2 + 0.5 * sum(v * s for v, s in zip(vec, PAULIS))
    raise TypeError(f"unsupported channel spec {type(spec).__name__}")


def apply_channel(spec: ChannelSpec, rho) -> DensityMatrix:
    """Apply a channel to a state.

    Raises :class:`NotCompletelyPositiveError` when the output leaves the
    Bloch ball; affine specs are never clipped back into it.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    out = channel_map(spec, rho.entries)
    try:
        return DensityMatrix(out, tol=1e-10)
    except InvalidStateError as exc:
        b = pauli_components(out)[1:].real
        raise NotCompletelyPositiveError(
            f"channel output is not a state ({exc}); Bloch vector {tuple(b)}", bloch=b
        ) from None


def apply_affine_bloch(spec: AffineQubitChannel, a) -> np.ndarray:
    a = a.as_array() if isinstance(a, BlochVector) else np.asarray(a, dtype=float)
    return np.asarray(spec.t) + np.asarray(spec.lam) * a


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """C = sum_ij E_ij (x) Phi(E_ij), input factor first."""

    entries: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh_hermitian(self.entries)

    def partial_trace_output(self) -> np.ndarray:
        return np.einsum("iaja->ij", self.entries.reshape(2, 2, 2, 2))


def matrix_unit(i: int, j: int) -> np.ndarray:
    e = np.zeros((2, 2), dtype=complex)
    e[i, j] = 1
    return e


def choi_from_map(linear_map) -> ChoiMatrix:
    """Choi matrix of any linear map on 2x2 matrices given as a callable."""
    c = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            c += np.kron(matrix_unit(i, j), linear_map(matrix_unit(i, j)))
    return ChoiMatrix(0.5 * (c + c.conj().T))


def choi_of(spec: ChannelSpec) -> ChoiMatrix:
    return choi_from_map(lambda e: channel_map(spec, e))


@dataclass(frozen=True)
class CPReport:
    is_cp: bool
    min_eigenvalue: float
    tol: float

    def __bool__(self):
        return self.is_cp


def is_cp(choi: ChoiMatrix, tol: float = DEFAULT_CONFIG.cp_tol) -> CPReport:
    lo = float(choi.eigenvalues()[0])
    return CPReport(lo >= -tol, lo, tol)


def extreme_point_channel(lam_x: float, lam_y: float, sign: int = 1) -> AffineQubitChannel:
    """Extreme non-unital channel: t = (0, 0, +-sqrt((1-lx^2)(1-ly^2))),
    lambda = (lx, ly, lx*ly)."""
    if abs(lam_x) > 1 or abs(lam_y) > 1:
        raise ValueError(f"|lambda| must not exceed 1, got ({lam_x}, {lam_y})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    tz = sign * math.sqrt((1 - lam_x**2) * (1 - lam_y**2))
    return AffineQubitChannel(t=(0.0, 0.0, tz), lam=(lam_x, lam_y, lam_x * lam_y))
