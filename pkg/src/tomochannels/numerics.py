"""Quadrature rules, Gaussian convolution, line Fourier transforms and small
Hermitian eigensolvers shared by the qubit and bosonic modules."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import TruncationWarning


@dataclass(frozen=True)
class NumericsConfig:
    """Central tolerances. Every field can be overridden per call."""

    cp_tol: float = 1e-9
    state_tol: float = 1e-12
    tp_tol: float = 1e-10
    fourier_T: float = 12.0
    fourier_dt: float = 0.05
    # |F| at the truncation edge above this triggers a TruncationWarning
    truncation_threshold: float = 1e-8
    # sampled function at the grid edge above this triggers a TruncationWarning
    edge_decay_threshold: float = 1e-12
    boundary_mass_threshold: float = 1e-8


DEFAULT_CONFIG = NumericsConfig()


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def measure(self) -> float:
        return self.b - self.a

    def integrate(self, values) -> np.ndarray:
        """Weighted sum over the last axis of ``values``."""
        return np.asarray(values) @ self.weights


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes mapped to ``[a, b]``.

    The rule checks its own polynomial exactness (degree <= 2n-1) before
    returning.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"gauss_legendre needs n >= 1, got {n}")
    n = int(n)
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    rule = QuadratureRule(nodes=mid + half * x, weights=half * w, a=float(a), b=float(b))
    _check_polynomial_exactness(x, w, n)
    return rule


def _check_polynomial_exactness(x, w, n):
    # reference interval keeps the monomial sums free of cancellation
    for d in range(min(2 * n - 1, 60) + 1):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        got = float(np.sum(w * x**d))
        if abs(got - exact) > 1e-12 * max(1.0, n / 10):
            raise ArithmeticError(f"Gauss-Legendre n={n} fails on x^{d}: {got} vs {exact}")


def periodic_rule(n: int, a: float = 0.0, b: float = 2 * math.pi) -> QuadratureRule:
    """Uniform trapezoid rule for periodic integrands on ``[a, b)``.

    Exact for trigonometric polynomials of degree < n.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"periodic_rule needs n >= 1, got {n}")
    n = int(n)
    h = (b - a) / n
    nodes = a + h * np.arange(n)
    rule = QuadratureRule(nodes=nodes, weights=np.full(n, h), a=float(a), b=float(b))
    theta = 2 * math.pi * (nodes - a) / (b - a)
    for k in range(1, n):
        if abs(np.sum(np.cos(k * theta))) > 1e-12 * n:
            raise ArithmeticError(f"periodic rule n={n} not exact for cos({k}x)")
    return rule


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for an increasing node array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need at least two nodes")
    dx = np.diff(x)
    if np.any(dx <= 0):
        raise ValueError("nodes must be strictly increasing")
    w = np.zeros_like(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


def gaussian_kernel(x, k: float, alpha: float, x_in) -> np.ndarray:
    """Matrix G[i, j] = exp(-(x_i - k x_in_j)^2 / (2 alpha)) / sqrt(2 pi alpha)."""
    diff = np.asarray(x, dtype=float)[:, None] - k * np.asarray(x_in, dtype=float)[None, :]
    return np.exp(-(diff**2) / (2 * alpha)) / math.sqrt(2 * math.pi * alpha)


def gaussian_convolve(f, k: float, alpha: float, x, config: NumericsConfig = DEFAULT_CONFIG):
    """Evaluate ``(1/sqrt(2 pi alpha)) int exp(-(x - k x')^2/(2 alpha)) f(x') dx'``
    at every node of ``x`` by the trapezoid rule.

    ``f`` may carry leading batch axes; the last axis runs over ``x``.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.shape[-1] != x.size:
        raise ValueError("last axis of f must match the x grid")
    edge = np.max(np.abs(np.stack([f[..., 0], f[..., -1]])))
    if edge > config.edge_decay_threshold:
        warnings.warn(
            f"input does not decay at the grid edge (|f| = {edge:.3g}); "
            "convolution is truncated",
            TruncationWarning,
            stacklevel=2,
        )
    g = gaussian_kernel(x, k, alpha, x)
    return (f * trapezoid_weights(x)) @ g.T


def line_nodes(T: float, dt: float) -> np.ndarray:
    """Symmetric uniform nodes on [-T, T] with spacing at most ``dt``."""
    n = max(2, math.ceil(2 * T / dt))
    return np.linspace(-T, T, n + 1)


def fourier_line_transform(F, x, T: float | None = None, dt: float | None = None,
                           config: NumericsConfig = DEFAULT_CONFIG):
    """``(1/2pi) int_{-T}^{T} exp(-i x t) F(t) dt`` by the trapezoid rule.

    ``F`` is a callable accepting an array of ``t`` values. Warns with
    :class:`TruncationWarning` when ``|F(+-T)|`` exceeds the configured
    threshold, since the truncated tail is then not negligible.
    """
    T = config.fourier_T if T is None else T
    dt = config.fourier_dt if dt is None else dt
    t = line_nodes(T, dt)
    values = np.asarray(F(t), dtype=complex)
    check_decay(values, config)
    w = trapezoid_weights(t)
    x_arr = np.asarray(x, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(x_arr, t))
    return (phase @ (w * values)) / (2 * math.pi)


def check_decay(values, config: NumericsConfig = DEFAULT_CONFIG) -> float:
    edge = float(max(np.max(np.abs(values[..., 0])), np.max(np.abs(values[..., -1]))))
    if edge > config.truncation_threshold:
        warnings.warn(
            f"integrand has |F| = {edge:.3g} at the truncation edge",
            TruncationWarning,
            stacklevel=3,
        )
    return edge


def eigvalsh2(h) -> np.ndarray:
    """Ascending eigenvalues of a 2x2 Hermitian matrix in closed form."""
    h = np.asarray(h)
    a = h[0, 0].real
    d = h[1, 1].real
    b = h[0, 1]
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(b))
    return np.array([mean - radius, mean + radius])


def eigvalsh_hermitian(h) -> np.ndarray:
    """Ascending eigenvalues of a dense Hermitian matrix (LAPACK)."""
    h = np.asarray(h)
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))
