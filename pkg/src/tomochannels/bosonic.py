"""Single-mode optical tomography and one-mode Gaussian channels.

Conventions: [Q, P] = i, vacuum quadrature variance 1/2, characteristic
function F(q, p) = Tr(rho exp(i(qQ + pP))). The optical tomogram
omega(x, phi) is the density of X_phi = cos(phi) Q + sin(phi) P, linked to F by

    F(t cos phi, t sin phi) = int exp(i t x) omega(x, phi) dx.

Covariant channel:      F(q, p) -> F(kq,  kp) exp(-alpha (q^2 + p^2) / 2)
Contravariant channel:  F(q, p) -> F(kq, -kp) exp(-alpha (q^2 + p^2) / 2)

On tomograms both act slice-wise as a Gaussian convolution in x; the
contravariant channel first reads the input slice at phase -phi (p -> -p is a
reflection of the phase circle), which on a uniform phase grid starting at 0
is an exact index reflection.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.special import eval_laguerre

from .exceptions import ChannelParameterError, GridAlignmentError, TruncationWarning
from .numerics import (
    DEFAULT_CONFIG,
    NumericsConfig,
    check_decay,
    gaussian_convolve,
    gaussian_kernel,
    line_nodes,
    trapezoid_weights,
)

FOCK_MAX = 10
_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Coherent:
    q: float
    p: float


@dataclass(frozen=True)
class Thermal:
    nbar: float

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError(f"mean photon number must be >= 0, got {self.nbar}")


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or not 0 <= self.n <= FOCK_MAX:
            raise ValueError(f"Fock index must be an integer in [0, {FOCK_MAX}], got {self.n}")


@dataclass(frozen=True)
class Squeezed:
    """Squeezed vacuum S(r e^{i theta})|0>: quadrature variance e^{-2r}/2 along
    the axis at angle theta/2, e^{2r}/2 across it."""

    r: float
    theta: float = 0.0


BosonicState = Union[Vacuum, Coherent, Thermal, Fock, Squeezed]


def gaussian_moments(state: BosonicState):
    """(mean, covariance) of (Q, P) for Gaussian states; None for Fock n > 0."""
    if isinstance(state, Vacuum):
        return np.zeros(2), 0.5 * np.eye(2)
    if isinstance(state, Coherent):
        return np.array([state.q, state.p], dtype=float), 0.5 * np.eye(2)
    if isinstance(state, Thermal):
        return np.zeros(2), (state.nbar + 0.5) * np.eye(2)
    if isinstance(state, Squeezed):
        c, s = math.cos(state.theta / 2), math.sin(state.theta / 2)
        rot = np.array([[c, -s], [s, c]])
        d = np.diag([math.exp(-2 * state.r) / 2, math.exp(2 * state.r) / 2])
        return np.zeros(2), rot @ d @ rot.T
    if isinstance(state, Fock):
        return (np.zeros(2), 0.5 * np.eye(2)) if state.n == 0 else None
    raise TypeError(f"unsupported state {type(state).__name__}")


@dataclass(frozen=True, eq=False)
class CharacteristicFn:
    evaluate: Callable = field(repr=False)
    label: str = ""

    def __call__(self, q, p):
        return self.evaluate(np.asarray(q, dtype=float), np.asarray(p, dtype=float))


def char_fn(state: BosonicState) -> CharacteristicFn:
    if isinstance(state, Fock):
        n = state.n

        def fock(q, p):
            s = q**2 + p**2
            return (np.exp(-s / 4) * eval_laguerre(n, s / 2)).astype(complex)

        return CharacteristicFn(fock, f"fock({n})")

    mean, cov = gaussian_moments(state)

    def gaussian(q, p):
        quad = cov[0, 0] * q**2 + 2 * cov[0, 1] * q * p + cov[1, 1] * p**2
        return np.exp(1j * (mean[0] * q + mean[1] * p) - 0.5 * quad)

    return CharacteristicFn(gaussian, type(state).__name__.lower())


@dataclass(frozen=True, eq=False)
class OpticalGrid:
    """x uniform on [-L, L] (n_x points), phi uniform on [0, 2pi) (n_phi points)."""

    L: float = 8.0
    n_x: int = 401
    n_phi: int = 64

    def __post_init__(self):
        if self.n_x < 3 or self.n_phi < 1:
            raise ValueError("grid needs n_x >= 3 and n_phi >= 1")
        object.__setattr__(self, "x", np.linspace(-self.L, self.L, self.n_x))
        object.__setattr__(self, "phi", 2 * math.pi * np.arange(self.n_phi) / self.n_phi)
        object.__setattr__(self, "x_weights", trapezoid_weights(self.x))

    @property
    def dx(self) -> float:
        return 2 * self.L / (self.n_x - 1)

    def phi_index(self, phi: float) -> int:
        pos = (phi % (2 * math.pi)) * self.n_phi / (2 * math.pi)
        j = int(round(pos)) % self.n_phi
        if abs(pos - round(pos)) > 1e-9:
            raise ValueError(f"phi = {phi} is not a node of the phase grid")
        return j

    def reflected_phi(self) -> np.ndarray:
        """Index map j -> index of -phi_j (mod 2pi)."""
        return (-np.arange(self.n_phi)) % self.n_phi


@dataclass(frozen=True, eq=False)
class OpticalTomogram:
    grid: OpticalGrid
    values: np.ndarray  # shape (n_phi, n_x)

    def __post_init__(self):
        shape = (self.grid.n_phi, self.grid.n_x)
        if np.shape(self.values) != shape:
            raise ValueError(f"values shape {np.shape(self.values)} != {shape}")

    def normalization(self) -> np.ndarray:
        return self.values @ self.grid.x_weights

    def moments(self):
        """Per-phase mean and variance by trapezoid quadrature."""
        w = self.grid.x_weights
        x = self.grid.x
        mass = self.values @ w
        mean = (self.values @ (w * x)) / mass
        second = (self.values @ (w * x**2)) / mass
        return mean, second - mean**2

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "phi", "omega"])
        for j, phi in enumerate(self.grid.phi):
            for i, x in enumerate(self.grid.x):
                writer.writerow([f"{x:.17g}", f"{phi:.17g}", f"{self.values[j, i]:.17g}"])
        return buf.getvalue() if stream is None else ""


def tomogram_from_charfn(F: CharacteristicFn, grid: OpticalGrid | None = None,
                         config: NumericsConfig = DEFAULT_CONFIG) -> OpticalTomogram:
    """omega(x, phi) = (1/2pi) int exp(-ixt) F(t cos phi, t sin phi) dt, trapezoid
    rule on [-T, T]."""
    grid = grid or OpticalGrid()
    t = line_nodes(config.fourier_T, config.fourier_dt)
    wt = trapezoid_weights(t)
    rays = F(np.cos(grid.phi)[:, None] * t, np.sin(grid.phi)[:, None] * t)
    rays = np.broadcast_to(np.asarray(rays, dtype=complex), (grid.n_phi, t.size))
    check_decay(rays, config)
    phase = np.exp(-1j * np.multiply.outer(grid.x, t))
    values = (rays * wt) @ phase.T / (2 * math.pi)
    residue = float(np.max(np.abs(values.imag)))
    if residue > 1e-10:
        raise ArithmeticError(f"tomogram has imaginary residue {residue:.3g}; F is not Hermitian")
    return OpticalTomogram(grid, values.real.copy())


def charfn_from_tomogram(omega: OpticalTomogram, t: float, phi: float) -> complex:
    """int exp(itx) omega(x, phi) dx on the tomogram's x grid."""
    grid = omega.grid
    t_max = math.pi / (2 * grid.dx)
    if abs(t) > t_max:
        raise ValueError(f"|t| = {abs(t)} exceeds the grid's safe range {t_max:.4g}")
    j = grid.phi_index(phi)
    return complex(np.sum(grid.x_weights * np.exp(1j * t * grid.x) * omega.values[j]))


@dataclass(frozen=True)
class GaussianChannelParams:
    kind: str
    k: float
    alpha: float

    def __post_init__(self):
        if self.kind not in ("covariant", "contravariant"):
            raise ChannelParameterError(f"kind must be covariant or contravariant, got {self.kind!r}")
        if self.k < 0:
            raise ChannelParameterError(f"violates k >= 0: k = {self.k}")
        if self.kind == "covariant":
            if self.k == 1:
                raise ChannelParameterError("violates k != 1 for the covariant channel")
            bound = abs(self.k**2 - 1) / 2
            if self.alpha < bound - _BOUND_SLACK:
                raise ChannelParameterError(
                    f"violates alpha >= |k^2-1|/2: alpha = {self.alpha} < {bound}"
                )
        else:
            bound = (self.k**2 + 1) / 2
            if self.alpha < bound - _BOUND_SLACK:
                raise ChannelParameterError(
                    f"violates alpha >= (k^2+1)/2: alpha = {self.alpha} < {bound}"
                )

    @property
    def noise_bound(self) -> float:
        if self.kind == "covariant":
            return abs(self.k**2 - 1) / 2
        return (self.k**2 + 1) / 2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "alpha": self.alpha}


def apply_gaussian_channel_direct(F: CharacteristicFn,
                                  params: GaussianChannelParams) -> CharacteristicFn:
    k, alpha = params.k, params.alpha
    sign = 1.0 if params.kind == "covariant" else -1.0

    def out(q, p):
        return F(k * q, sign * k * p) * np.exp(-alpha * (q**2 + p**2) / 2)

    return CharacteristicFn(out, f"{params.kind}({F.label})")


def apply_gaussian_kernel(omega: OpticalTomogram, params: GaussianChannelParams,
                          config: NumericsConfig = DEFAULT_CONFIG) -> OpticalTomogram:
    """Slice-wise Gaussian convolution; contravariant channels read the input
    slice at -phi."""
    grid = omega.grid
    values = omega.values
    if params.kind == "contravariant":
        values = values[grid.reflected_phi()]
    out = gaussian_convolve(values, params.k, params.alpha, grid.x, config)
    return OpticalTomogram(grid, out)


@dataclass(frozen=True, eq=False)
class KernelMarginals:
    """Integrals of the tomographic Gaussian kernel at sample points.

    ``output`` holds int K dx dphi for each input point, ``input`` holds
    int K dx' dphi' for each output point (inf when k = 0).
    """

    points: np.ndarray
    output: np.ndarray
    input: np.ndarray

    @property
    def input_divergent(self) -> bool:
        return bool(np.all(np.isinf(self.input)))

    @property
    def output_integral(self) -> float:
        return float(np.mean(self.output))

    @property
    def input_integral(self) -> float:
        return float(np.mean(self.input))


def kernel_marginals(params: GaussianChannelParams, points=None,
                     n_nodes: int = 4001, width: float = 14.0) -> KernelMarginals:
    """Trapezoid integrals of (1/sqrt(2 pi alpha)) exp(-(x - k x')^2/(2 alpha))
    over a window of ``width`` kernel standard deviations around its centre.

    The phase factor is a delta function and integrates to 1 exactly.
    """
    k, alpha = params.k, params.alpha
    pts = np.linspace(-4.0, 4.0, 9) if points is None else np.asarray(points, dtype=float)
    sd = math.sqrt(alpha)
    out = np.empty(pts.size)
    inp = np.empty(pts.size)
    for i, p in enumerate(pts):
        x = np.linspace(k * p - width * sd, k * p + width * sd, n_nodes)
        out[i] = trapezoid_weights(x) @ gaussian_kernel(x, k, alpha, [p])[:, 0]
        if k == 0:
            inp[i] = math.inf
        else:
            # substitute u = k x' so the window stays finite for tiny k
            u = np.linspace(p - width * sd, p + width * sd, n_nodes)
            with np.errstate(over="ignore"):  # 1/k beyond float range -> inf
                inp[i] = (gaussian_kernel([p], 1.0, alpha, u)[0] @ trapezoid_weights(u)) / k
    return KernelMarginals(pts, out, inp)


@dataclass(frozen=True, eq=False)
class PlaneDistribution:
    """Omega(r cos phi, r sin phi) = omega(r, phi) / r on r > 0.

    ``origin`` stores lim_{r->0} r Omega = omega(0, phi), needed for radial
    quadrature down to r = 0.
    """

    r: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # shape (n_phi, n_r)
    origin: np.ndarray  # shape (n_phi,)

    def radial_density(self) -> np.ndarray:
        """r * Omega on the nodes [0, r_1, ..., r_n]."""
        return np.concatenate([self.origin[:, None], self.values * self.r], axis=1)

    def radial_nodes(self) -> np.ndarray:
        return np.concatenate([[0.0], self.r])

    def integral(self) -> float:
        """int int Omega dx dy = int dphi int r Omega dr."""
        radial = self.radial_density() @ trapezoid_weights(self.radial_nodes())
        return float(np.sum(radial) * 2 * math.pi / self.phi.size)

    def normalization(self) -> float:
        """(1/2pi) int int Omega dx dy."""
        return self.integral() / (2 * math.pi)

    def charfn_on_ray(self, t: float, j: int) -> complex:
        """F(t cos phi_j, t sin phi_j) from the two opposite half-rays:
        int_0^inf r [e^{itr} Omega(r, phi) + e^{-itr} Omega(r, phi + pi)] dr."""
        opp = _opposite(self.phi.size)[j]
        rn = self.radial_nodes()
        w = trapezoid_weights(rn)
        dens = self.radial_density()
        return complex(np.sum(w * (np.exp(1j * t * rn) * dens[j] + np.exp(-1j * t * rn) * dens[opp])))

    def cartesian(self):
        x = np.cos(self.phi)[:, None] * self.r
        y = np.sin(self.phi)[:, None] * self.r
        return x, y, self.values

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "Omega"])
        x, y, v = self.cartesian()
        for idx in np.ndindex(v.shape):
            writer.writerow([f"{x[idx]:.17g}", f"{y[idx]:.17g}", f"{v[idx]:.17g}"])
        return buf.getvalue() if stream is None else ""


def _opposite(n_phi: int) -> np.ndarray:
    if n_phi % 2:
        raise GridAlignmentError(f"n_phi = {n_phi} is odd; phi + pi is not a grid node")
    return (np.arange(n_phi) + n_phi // 2) % n_phi


def plane_distribution(omega: OpticalTomogram) -> PlaneDistribution:
    grid = omega.grid
    if grid.n_x % 2 == 0:
        raise GridAlignmentError("plane representation needs x = 0 as a grid node (odd n_x)")
    _opposite(grid.n_phi)
    centre = grid.n_x // 2
    r = grid.x[centre + 1:]
    values = omega.values[:, centre + 1:] / r
    return PlaneDistribution(r.copy(), grid.phi.copy(), values, omega.values[:, centre].copy())


def apply_plane_channel(plane: PlaneDistribution, params: GaussianChannelParams,
                        config: NumericsConfig = DEFAULT_CONFIG) -> PlaneDistribution:
    """Radial Gaussian kernel on the plane.

    Output at radius rho on ray phi:
        (1/(rho sqrt(2 pi alpha))) int_0^inf r [exp(-(rho - k r)^2/(2 alpha)) Omega(r, phi)
                                            + exp(-(rho + k r)^2/(2 alpha)) Omega(r, phi + pi)] dr
    The contravariant channel reads the input at (x, y) -> (x, -y).
    """
    n_phi = plane.phi.size
    opp = _opposite(n_phi)
    src = np.arange(n_phi)
    if params.kind == "contravariant":
        src = (-src) % n_phi
    rn = plane.radial_nodes()
    w = trapezoid_weights(rn)
    dens = plane.radial_density()
    near = gaussian_kernel(rn, params.k, params.alpha, rn) * w
    far = gaussian_kernel(rn, -params.k, params.alpha, rn) * w
    out = dens[src] @ near.T + dens[opp[src]] @ far.T
    edge = float(np.max(out[:, -1]))
    if edge > config.boundary_mass_threshold:
        warnings.warn(
            f"output density {edge:.3g} at the radial cutoff; increase the grid range",
            TruncationWarning,
            stacklevel=2,
        )
    return PlaneDistribution(plane.r.copy(), plane.phi.copy(), out[:, 1:] / plane.r, out[:, 0].copy())
