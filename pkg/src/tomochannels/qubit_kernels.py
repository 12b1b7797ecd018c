"""Integral kernels acting on qubit tomograms.

A kernel K(x; x') maps a tomogram w to ``int K(x; x') w(x') dx'`` where the
integral sums over m' and the angular measure. All kernels here carry the
factor delta_{m m'}, so only the slice m' = m contributes.

Closed forms, with n = (cos a sin b, sin a sin b, cos b) and
s = (-n_x, -n_y, n_z):

    affine (t, lam):  delta [ (1 + 2 m t.s)/2 + (3/2) sum_i lam_i n_i n'_i ]

The identity kernel is lam = (1, 1, 1), the sigma_a conjugations are
lam = (1, -1, -1), (-1, 1, -1), (-1, -1, 1) with t = 0. The Kraus-derived kernel is
delta_{m m'} sum_i Tr(U(x) A_i D(x') A_i^dag), which reproduces the affine
form exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import DEFAULT_CONFIG, NumericsConfig
from .qstate import (
    AXES,
    AffineQubitChannel,
    ChannelSpec,
    ChoiMatrix,
    KrausChannel,
    PauliMixture,
    channel_map,
    choi_from_map,
    is_cp,
)
from .qubit_tomography import (
    AngularGrid,
    QubitTomogram,
    TomoPoint,
    _fmt,
    canonical_angles,
    dequantizer_array,
    measurement_axis,
    pauli_direction,
    quantizer_array,
    reconstruct_operator,
    sample_tomogram,
)

PAULI_SIGNS = {
    "x": (1.0, -1.0, -1.0),
    "y": (-1.0, 1.0, -1.0),
    "z": (-1.0, -1.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class QubitKernel:
    """A kernel variant plus a vectorised evaluator
    ``evaluate(m, alpha, beta, m2, alpha2, beta2)``."""

    kind: str
    params: dict
    evaluate: Callable = field(repr=False)

    def __call__(self, x: TomoPoint, x2: TomoPoint) -> float:
        return float(self.evaluate(x.m, x.alpha, x.beta, x2.m, x2.alpha, x2.beta))

    def matrix(self, out_points, in_points) -> np.ndarray:
        """Dense K[i, j] for flattened point arrays (m, alpha, beta)."""
        m, a, b = (np.ravel(v)[:, None] for v in out_points)
        m2, a2, b2 = (np.ravel(v)[None, :] for v in in_points)
        return np.asarray(self.evaluate(m, a, b, m2, a2, b2))


def _affine_evaluator(t, lam):
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)

    def evaluate(m, alpha, beta, m2, alpha2, beta2):
        m = np.asarray(m, dtype=float)
        n = measurement_axis(alpha, beta)
        n2 = measurement_axis(alpha2, beta2)
        s = pauli_direction(alpha, beta)
        value = 0.5 * (1 + 2 * m * (s @ t)) + 1.5 * np.sum(lam * n * n2, axis=-1)
        return np.where(np.asarray(m) == np.asarray(m2), value, 0.0)

    return evaluate


def identity_kernel() -> QubitKernel:
    return QubitKernel("identity", {}, _affine_evaluator((0, 0, 0), (1, 1, 1)))


def pauli_kernel(axis: str) -> QubitKernel:
    if axis not in PAULI_SIGNS:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return QubitKernel(f"pauli_{axis}", {"axis": axis},
                       _affine_evaluator((0, 0, 0), PAULI_SIGNS[axis]))


def general_kernel(t, lam) -> QubitKernel:
    t = tuple(float(v) for v in t)
    lam = tuple(float(v) for v in lam)
    return QubitKernel("general_affine", {"t": t, "lam": lam}, _affine_evaluator(t, lam))


def mixture_kernel(p: PauliMixture) -> QubitKernel:
    """Convex combination of the identity and the three Pauli kernels."""
    parts = [identity_kernel()] + [pauli_kernel(a) for a in AXES]
    weights = p.probabilities

    def evaluate(*args):
        return sum(w * k.evaluate(*args) for w, k in zip(weights, parts) if w)

    return QubitKernel("pauli_mixture", {"probabilities": tuple(weights)}, evaluate)


def kraus_kernel(ch: KrausChannel) -> QubitKernel:
    """delta_{m m'} sum_i Tr(U(x) A_i D(x') A_i^dag)."""
    if not isinstance(ch, KrausChannel):
        raise TypeError("kraus_kernel needs a KrausChannel (trace preservation is checked there)")

    def evaluate(m, alpha, beta, m2, alpha2, beta2):
        u = dequantizer_array(m, alpha, beta)
        d = quantizer_array(m2, alpha2, beta2)
        phi_d = sum(np.einsum("ij,...jk,lk->...il", a, d, a.conj()) for a in ch.operators)
        value = np.einsum("...ij,...ji->...", u, phi_d)
        if np.max(np.abs(np.imag(value)), initial=0.0) > 1e-12:
            raise ArithmeticError("Kraus kernel has a non-negligible imaginary part")
        value = np.real(value)
        return np.where(np.asarray(m) == np.asarray(m2), value, 0.0)

    return QubitKernel("kraus", {"n_operators": len(ch.operators)}, evaluate)


def kernel_for(spec: ChannelSpec) -> QubitKernel:
    if isinstance(spec, PauliMixture):
        return mixture_kernel(spec)
    if isinstance(spec, AffineQubitChannel):
        return general_kernel(spec.t, spec.lam)
    if isinstance(spec, KrausChannel):
        return kraus_kernel(spec)
    raise TypeError(f"unsupported channel spec {type(spec).__name__}")


def kernel_sigma(axis: str, x: TomoPoint, x2: TomoPoint) -> float:
    return pauli_kernel(axis)(x, x2)


def kernel_general(t, lam, x: TomoPoint, x2: TomoPoint) -> float:
    return general_kernel(t, lam)(x, x2)


def kernel_from_kraus(ch: KrausChannel, x: TomoPoint, x2: TomoPoint) -> float:
    return kraus_kernel(ch)(x, x2)


def kernel_matrix(kernel: QubitKernel, grid: AngularGrid) -> np.ndarray:
    """Dense node-by-node matrix, input weights folded in."""
    pts = grid.mesh()
    k = kernel.matrix(pts, pts)
    w = np.broadcast_to(grid.weights, grid.shape).ravel()
    return k * w[None, :]


def apply_kernel(kernel: QubitKernel, w: QubitTomogram) -> QubitTomogram:
    """out(x) = sum_{m'} sum_nodes weight K(x; x') w(x'), one m-slice of output
    nodes at a time."""
    grid = w.grid
    pts = grid.mesh()
    flat_in = np.asarray(w.values).ravel() * np.broadcast_to(grid.weights, grid.shape).ravel()
    out = np.empty(grid.shape, dtype=np.result_type(w.values, float))
    for i in range(2):
        rows = kernel.matrix(tuple(p[i] for p in pts), pts)
        out[i] = (rows @ flat_in).reshape(grid.shape[1:])
    return QubitTomogram(grid, out)


def angle_involution(axis: str, x: TomoPoint) -> TomoPoint:
    """Point y with sigma_a U(x) sigma_a = U(y).

    x: (a, b) -> (-a, pi - b);  y: (a, b) -> (pi - a, pi - b);
    z: (a, b) -> (a + pi, b).
    """
    if axis == "x":
        a, b = -x.alpha, math.pi - x.beta
    elif axis == "y":
        a, b = math.pi - x.alpha, math.pi - x.beta
    elif axis == "z":
        a, b = x.alpha + math.pi, x.beta
    else:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    a, b = canonical_angles(a, b)
    return TomoPoint(x.m, float(a), float(b))


def kernel_channel_map(kernel: QubitKernel, grid: AngularGrid | None = None):
    """Linear map op -> int D(x) [int K(x; x') Tr(op U(x')) dx'] dx."""
    grid = grid or AngularGrid()
    grid.require_exact()
    mat = kernel_matrix(kernel, grid)

    def linear_map(op):
        w = sample_tomogram(op, grid).values.ravel()
        out = (mat @ w).reshape(grid.shape)
        return reconstruct_operator(out, grid)

    return linear_map


def channel_from_kernel(kernel: QubitKernel, grid: AngularGrid | None = None) -> ChoiMatrix:
    return choi_from_map(kernel_channel_map(kernel, grid))


def scan_points(n_alpha: int = 32, n_beta: int = 16):
    """Flattened (m, alpha, beta) scan grid; beta includes both poles."""
    m = np.array([0.5, -0.5])[:, None, None]
    a = (2 * math.pi * np.arange(n_alpha) / n_alpha)[None, :, None]
    b = np.linspace(0.0, math.pi, n_beta)[None, None, :]
    shape = (2, n_alpha, n_beta)
    return tuple(np.broadcast_to(v, shape).ravel() for v in (m, a, b))


@dataclass(frozen=True)
class KernelDiagnostics:
    row_integral_max_dev: float
    column_integral_max_dev: float
    min_value: float
    min_value_location: tuple
    choi_min_eigenvalue: float
    cp: bool

    def to_dict(self) -> dict:
        return {
            "row_integral_max_dev": self.row_integral_max_dev,
            "column_integral_max_dev": self.column_integral_max_dev,
            "min_value": self.min_value,
            "min_value_location": [list(p) for p in self.min_value_location],
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "cp": self.cp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def row_integrals(kernel: QubitKernel, grid: AngularGrid) -> np.ndarray:
    """int K(x; x') dx' at every output node."""
    return kernel_matrix(kernel, grid).sum(axis=1).reshape(grid.shape)


def column_integrals(kernel: QubitKernel, grid: AngularGrid) -> np.ndarray:
    """int K(x; x') dx at every input node (trace preservation)."""
    pts = grid.mesh()
    w = np.broadcast_to(grid.weights, grid.shape).ravel()
    return (w @ kernel.matrix(pts, pts)).reshape(grid.shape)


def kernel_diagnostics(kernel: QubitKernel, grid: AngularGrid | None = None,
                       scan: tuple = (32, 16),
                       config: NumericsConfig = DEFAULT_CONFIG) -> KernelDiagnostics:
    """Row/column normalisation on the quadrature grid, minimum over the scan
    grid (a lower bound on the true negativity) and the CP verdict."""
    grid = grid or AngularGrid()
    rows = row_integrals(kernel, grid)
    cols = column_integrals(kernel, grid)
    pts = scan_points(*scan)
    values = kernel.matrix(pts, pts)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    loc = (
        tuple(float(p[i]) for p in pts),
        tuple(float(p[j]) for p in pts),
    )
    cp = is_cp(channel_from_kernel(kernel, grid), tol=config.cp_tol)
    return KernelDiagnostics(
        row_integral_max_dev=float(np.max(np.abs(rows - 1))),
        column_integral_max_dev=float(np.max(np.abs(cols - 1))),
        min_value=float(values[i, j]),
        min_value_location=loc,
        choi_min_eigenvalue=cp.min_eigenvalue,
        cp=cp.is_cp,
    )


def write_kernel_csv(kernel: QubitKernel, grid: AngularGrid | None = None, stream=None) -> str:
    """Header m,alpha,beta,m2,alpha2,beta2,K over all node pairs of ``grid``."""
    grid = grid or AngularGrid()
    pts = tuple(np.ravel(p) for p in grid.mesh())
    mat = kernel.matrix(pts, pts)
    buf = io.StringIO() if stream is None else stream
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "alpha", "beta", "m2", "alpha2", "beta2", "K"])
    n = pts[0].size
    for i in range(n):
        head = [_fmt(p[i]) for p in pts]
        for j in range(n):
            writer.writerow(head + [_fmt(p[j]) for p in pts] + [_fmt(mat[i, j])])
    return buf.getvalue() if stream is None else ""


def direct_output_tomogram(spec: ChannelSpec, rho, grid: AngularGrid) -> QubitTomogram:
    """Tomogram of Phi(rho) computed without kernels."""
    return sample_tomogram(channel_map(spec, np.asarray(rho, dtype=complex)), grid)


__all__ = [
    "QubitKernel",
    "identity_kernel",
    "pauli_kernel",
    "general_kernel",
    "mixture_kernel",
    "kraus_kernel",
    "kernel_for",
    "kernel_sigma",
    "kernel_general",
    "kernel_from_kraus",
    "kernel_matrix",
    "apply_kernel",
    "angle_involution",
    "channel_from_kernel",
    "kernel_channel_map",
    "kernel_diagnostics",
    "KernelDiagnostics",
    "row_integrals",
    "column_integrals",
    "scan_points",
    "write_kernel_csv",
    "direct_output_tomogram",
]
