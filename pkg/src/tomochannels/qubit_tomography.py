"""Spin-1/2 tomograms.

A tomographic point is ``(m, alpha, beta)`` with ``m = +-1/2``. The
de-quantizer is

    U(x) = I/2 - m cos(a) sin(b) sx - m sin(a) sin(b) sy + m cos(b) sz

and the quantizer is ``D(x) = 3 U(x) - I``. Angular integrals use the measure
``(1/2pi) da sin(b) db`` (total mass 2 per value of m); the alpha integral is a
uniform periodic rule and the beta integral is Gauss-Legendre in ``cos(b)``.

For a fixed m the single slice already inverts the tomogram,
``rho = (1/2pi) int D(m, .) w(m, .)``; summing both slices counts rho twice, so
:func:`reconstruct` and :func:`frame_integral` average the two slices.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GridResolutionError
from .numerics import gauss_legendre, periodic_rule
from .qstate import IDENTITY, PAULIS, DensityMatrix

M_VALUES = (0.5, -0.5)
TWO_PI = 2 * math.pi


def canonical_angles(alpha, beta):
    """Reduce beta into [0, pi] (shifting alpha by pi on reflection) and alpha
    into [0, 2pi)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.mod(np.asarray(beta, dtype=float), TWO_PI)
    flip = beta > math.pi
    beta = np.where(flip, TWO_PI - beta, beta)
    alpha = np.mod(np.where(flip, alpha + math.pi, alpha), TWO_PI)
    # np.mod can return 2pi for tiny negative inputs
    alpha = np.where(alpha >= TWO_PI, 0.0, alpha)
    return alpha, beta


@dataclass(frozen=True)
class TomoPoint:
    m: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.m not in M_VALUES:
            raise ValueError(f"m must be +1/2 or -1/2, got {self.m}")

    def canonical(self) -> "TomoPoint":
        a, b = canonical_angles(self.alpha, self.beta)
        return TomoPoint(self.m, float(a), float(b))

    def direction(self) -> np.ndarray:
        return measurement_axis(self.alpha, self.beta)


def measurement_axis(alpha, beta) -> np.ndarray:
    """Unit vector (cos a sin b, sin a sin b, cos b); stacked on the last axis."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    sb = np.sin(beta)
    return np.stack([np.cos(alpha) * sb, np.sin(alpha) * sb, np.cos(beta)], axis=-1)


def pauli_direction(alpha, beta) -> np.ndarray:
    """Coefficients of (sx, sy, sz) in U(x), divided by m."""
    n = measurement_axis(alpha, beta)
    return n * np.array([-1.0, -1.0, 1.0])


def _operator(scalar, m, s) -> np.ndarray:
    return scalar * IDENTITY + m * sum(c * p for c, p in zip(s, PAULIS))


def dequantizer(x: TomoPoint) -> np.ndarray:
    return _operator(0.5, x.m, pauli_direction(x.alpha, x.beta))


def quantizer(x: TomoPoint) -> np.ndarray:
    return 3 * dequantizer(x) - IDENTITY


def dequantizer_array(m, alpha, beta) -> np.ndarray:
    """Vectorised U(x); output shape is broadcast(m, alpha, beta) + (2, 2)."""
    m, alpha, beta = np.broadcast_arrays(np.asarray(m, float), alpha, beta)
    s = pauli_direction(alpha, beta) * m[..., None]
    out = np.empty(m.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 0.5 + s[..., 2]
    out[..., 1, 1] = 0.5 - s[..., 2]
    out[..., 0, 1] = s[..., 0] - 1j * s[..., 1]
    out[..., 1, 0] = s[..., 0] + 1j * s[..., 1]
    return out


def quantizer_array(m, alpha, beta) -> np.ndarray:
    return 3 * dequantizer_array(m, alpha, beta) - IDENTITY


def tomogram_of(rho, x: TomoPoint) -> float:
    """w(x) = Tr(rho U(x))."""
    return float(np.trace(np.asarray(rho, dtype=complex) @ dequantizer(x)).real)


@dataclass(frozen=True, eq=False)
class AngularGrid:
    """Product rule over (alpha, beta) for the measure (1/2pi) da sin(b) db."""

    n_alpha: int = 8
    n_beta: int = 4

    def __post_init__(self):
        a_rule = periodic_rule(self.n_alpha)
        u_rule = gauss_legendre(self.n_beta, -1.0, 1.0)
        # beta nodes in increasing order
        u = u_rule.nodes[::-1]
        object.__setattr__(self, "alpha", a_rule.nodes)
        object.__setattr__(self, "beta", np.arccos(u))
        object.__setattr__(
            self, "weights", np.outer(a_rule.weights / TWO_PI, u_rule.weights[::-1])
        )

    @property
    def shape(self) -> tuple:
        return (2, self.n_alpha, self.n_beta)

    def mesh(self):
        """Broadcast arrays (m, alpha, beta), each of shape ``self.shape``."""
        m = np.array(M_VALUES)[:, None, None]
        a = self.alpha[None, :, None]
        b = self.beta[None, None, :]
        return tuple(np.broadcast_to(v, self.shape) for v in (m, a, b))

    def points(self):
        m, a, b = self.mesh()
        for idx in np.ndindex(self.shape):
            yield TomoPoint(float(m[idx]), float(a[idx]), float(b[idx]))

    def require_exact(self):
        if self.n_alpha < 4 or self.n_beta < 2:
            raise GridResolutionError(
                f"grid {self.n_alpha}x{self.n_beta} too coarse; "
                "need n_alpha >= 4 and n_beta >= 2"
            )


@dataclass(frozen=True, eq=False)
class QubitTomogram:
    grid: AngularGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")

    def slice_integrals(self) -> np.ndarray:
        """Integral of each m-slice under the angular measure."""
        return np.einsum("mab,ab->m", self.values, self.grid.weights)

    def to_csv(self, stream=None) -> str:
        return write_tomogram_csv(self, stream)


def sample_tomogram(rho, grid: AngularGrid | None = None) -> QubitTomogram:
    """Symbol Tr(op U(x)) at every node. Real for Hermitian ``op``."""
    grid = grid or AngularGrid()
    op = np.asarray(rho, dtype=complex)
    u = dequantizer_array(*grid.mesh())
    values = np.einsum("ij,...ji->...", op, u)
    if np.allclose(op, op.conj().T, rtol=0, atol=1e-14):
        values = values.real
    return QubitTomogram(grid, values)


def integrate(values, grid: AngularGrid):
    """Sum over m and the angular measure (total mass 4)."""
    return np.einsum("mab...,ab->...", np.asarray(values), grid.weights)


def frame_integral(values, grid: AngularGrid):
    """Average over m of the angular integral; the measure under which
    int U = int D = I and D reconstructs from U."""
    return 0.5 * integrate(values, grid)


def reconstruct_operator(values, grid: AngularGrid) -> np.ndarray:
    """Unvalidated int D(x) w(x) dx for any (possibly complex) symbol."""
    grid.require_exact()
    d = quantizer_array(*grid.mesh())
    return frame_integral(np.asarray(values)[..., None, None] * d, grid)


def reconstruct(w: QubitTomogram) -> DensityMatrix:
    return DensityMatrix(reconstruct_operator(w.values, w.grid), tol=1e-10)


def inner_product(f, g, grid: AngularGrid | None = None) -> float:
    """(1/2pi) int conj(f) g sin(b) db da for callables f(alpha, beta)."""
    grid = grid or AngularGrid()
    a = grid.alpha[:, None]
    b = grid.beta[None, :]
    fa = np.broadcast_to(f(a, b), grid.weights.shape)
    ga = np.broadcast_to(g(a, b), grid.weights.shape)
    val = np.sum(grid.weights * np.conj(fa) * ga)
    return float(val.real) if abs(val.imag) < 1e-15 else complex(val)


# orthogonal angular basis: 1, cos a sin b, sin a sin b, cos b
ANGULAR_BASIS = (
    lambda a, b: np.ones_like(a * b, dtype=float),
    lambda a, b: np.cos(a) * np.sin(b),
    lambda a, b: np.sin(a) * np.sin(b),
    lambda a, b: np.cos(b) + 0 * a,
)


def write_tomogram_csv(w: QubitTomogram, stream=None) -> str:
    """CSV with header m,alpha,beta,w; 17 significant digits, LF endings."""
    buf = io.StringIO() if stream is None else stream
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "alpha", "beta", "w"])
    m, a, b = w.grid.mesh()
    vals = np.asarray(w.values)
    for idx in np.ndindex(w.grid.shape):
        writer.writerow([_fmt(m[idx]), _fmt(a[idx]), _fmt(b[idx]), _fmt(vals[idx])])
    return buf.getvalue() if stream is None else ""


def _fmt(v) -> str:
    v = complex(v)
    if v.imag != 0:
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return f"{v.real:.17g}"
