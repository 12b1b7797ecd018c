"""Aggregated invariant checks behind ``tomochannels verify``.

Every check records the measured value, the threshold it is held to and a
pass flag; a suite passes only if every check does.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bosonic as bo
from . import qstate as qs
from . import qubit_kernels as qk
from . import qubit_tomography as qt
from .exceptions import TruncationWarning


@dataclass
class Check:
    name: str
    value: float | None
    threshold: float | None
    passed: bool
    criterion: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "value": _json_float(self.value),
            "threshold": _json_float(self.threshold),
            "passed": bool(self.passed),
            "detail": self.detail,
        }


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else str(v)


@dataclass
class RunReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, threshold, passed, criterion=None, detail=""):
        self.checks.append(Check(name, value, threshold, bool(passed), criterion, detail))

    def at_most(self, name, value, threshold, criterion=None, detail=""):
        self.add(name, value, threshold, value <= threshold, criterion, detail)

    def criteria(self) -> dict:
        """Criterion number -> overall pass flag."""
        out = {}
        for c in self.checks:
            if c.criterion is not None:
                out[c.criterion] = out.get(c.criterion, True) and c.passed
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "criteria": {str(k): v for k, v in self.criteria().items()},
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# sampling helpers shared with the test-suite and scripts


def random_states(rng, n: int):
    """Uniform samples from the Bloch ball."""
    out = []
    for _ in range(n):
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
        out.append(qs.bloch_to_density(v))
    return out


def simplex_mesh(steps: int = 3):
    """Pauli probability vectors with entries in multiples of 1/steps."""
    out = []
    for a, b, c in itertools.product(range(steps + 1), repeat=3):
        d = steps - a - b - c
        if d >= 0:
            out.append(qs.PauliMixture(a / steps, b / steps, c / steps, d / steps))
    return out


def random_cp_affine(rng, n: int, max_tries: int = 100000):
    """Diagonal affine channels accepted by the Choi test (rejection sampling)."""
    out = []
    for _ in range(max_tries):
        if len(out) == n:
            break
        lam = rng.uniform(-1, 1, size=3)
        t = rng.uniform(-0.5, 0.5, size=3) * rng.uniform()
        ch = qs.AffineQubitChannel(tuple(t), tuple(lam))
        if qs.is_cp(qs.choi_of(ch), tol=0.0):
            out.append(ch)
    return out


def random_kraus(rng, n: int, rank: int | None = None):
    """Kraus sets cut from Haar-like random isometries C^2 -> C^(2r)."""
    out = []
    for _ in range(n):
        r = rank or int(rng.integers(1, 5))
        z = rng.normal(size=(2 * r, 2)) + 1j * rng.normal(size=(2 * r, 2))
        q, _ = np.linalg.qr(z)
        out.append(qs.KrausChannel(tuple(q[2 * i:2 * i + 2] for i in range(r))))
    return out


def shifted_angle_point(axis: str, x: qt.TomoPoint) -> qt.TomoPoint:
    """Quarter-turn substitutions (a -+ pi/2, b + pi/2; b - pi/2) that are
    that look like sigma conjugations. They do not satisfy the identity."""
    h = math.pi / 2
    a, b = {
        "x": (x.alpha - h, x.beta + h),
        "y": (x.alpha + h, x.beta + h),
        "z": (x.alpha, x.beta - h),
    }[axis]
    return qt.TomoPoint(x.m, a, b)


def _random_points(rng, n):
    return [
        qt.TomoPoint(float(rng.choice(qt.M_VALUES)), float(rng.uniform(0, 2 * math.pi)),
                     float(rng.uniform(0, math.pi)))
        for _ in range(n)
    ]


def qubit_suite(seed: int = 2024) -> RunReport:
    rng = np.random.default_rng(seed)
    rep = RunReport("qubit")
    grid = qt.AngularGrid()

    # 1: round trip
    err = max(
        float(np.max(np.abs(qt.reconstruct(qt.sample_tomogram(r, grid)).entries - r.entries)))
        for r in random_states(rng, 100)
    )
    rep.at_most("round-trip reconstruction, 100 states, 8x4 grid", err, 1e-12, 1)

    # module invariants
    mesh = grid.mesh()
    rep.at_most("frame integral of U equals I",
                float(np.max(np.abs(qt.frame_integral(qt.dequantizer_array(*mesh), grid) - qs.IDENTITY))),
                1e-12)
    rep.at_most("frame integral of D equals I",
                float(np.max(np.abs(qt.frame_integral(qt.quantizer_array(*mesh), grid) - qs.IDENTITY))),
                1e-12)
    states = random_states(rng, 20)
    reproducing = 0.0
    tomo_norm = 0.0
    for r in states:
        w = qt.sample_tomogram(r, grid)
        u = qt.dequantizer_array(*mesh).reshape(-1, 2, 2)
        d = qt.quantizer_array(*mesh).reshape(-1, 2, 2)
        tud = np.einsum("aij,bji->ab", u, d).real
        wt = 0.5 * np.broadcast_to(grid.weights, grid.shape).ravel()
        back = tud @ (wt * w.values.ravel())
        reproducing = max(reproducing, float(np.max(np.abs(back - w.values.ravel()))))
        tomo_norm = max(tomo_norm, float(np.max(np.abs(w.values.sum(axis=0) - 1))),
                        float(np.max(np.abs(w.slice_integrals() - 1))))
    rep.at_most("reproducing property int Tr(U(x)D(y)) w(y) dy = w(x)", reproducing, 1e-10)
    rep.at_most("tomogram normalisation (sum over m, per-slice integral)", tomo_norm, 1e-12)

    # 2: dual path
    channels = simplex_mesh(3) + random_cp_affine(rng, 50) + random_kraus(rng, 50)
    worst = 0.0
    for ch in channels:
        mat = qk.kernel_matrix(qk.kernel_for(ch), grid)
        for r in states:
            w = qt.sample_tomogram(r, grid).values.ravel()
            direct = qk.direct_output_tomogram(ch, r, grid).values.ravel()
            worst = max(worst, float(np.max(np.abs(mat @ w - direct))))
    rep.at_most(f"dual-path agreement, {len(channels)} channels x {len(states)} states",
                worst, 1e-10, 2)

    # 3: negativity witnesses
    pts = qk.scan_points(32, 16)
    for axis in qs.AXES:
        lo = float(np.min(qk.pauli_kernel(axis).matrix(pts, pts)))
        rep.add(f"K_{axis} minimum on 32x16 scan grid", lo, -1 + 1e-12, lo <= -1 + 1e-12, 3)
    kz = qk.kernel_sigma("z", qt.TomoPoint(0.5, 0.0, 0.0), qt.TomoPoint(0.5, 0.0, math.pi))
    rep.add("K_z(m=m', a=a'=0, b=0, b'=pi) == -1", kz, -1.0, kz == -1.0, 3)

    # 4: row normalisation of closed-form kernels
    ad = qs.extreme_point_channel(0.8, 0.8)
    closed = [
        ("identity", qk.identity_kernel()),
        ("K_x", qk.pauli_kernel("x")),
        ("K_y", qk.pauli_kernel("y")),
        ("K_z", qk.pauli_kernel("z")),
        ("general t=0 lam=(0.5,-0.3,0.2)", qk.general_kernel((0, 0, 0), (0.5, -0.3, 0.2))),
        ("general amplitude damping t_z=0.36", qk.general_kernel(ad.t, ad.lam)),
    ]
    for name, k in closed:
        dev = float(np.max(np.abs(qk.row_integrals(k, grid) - 1)))
        rep.at_most(f"row integral int K dx' = 1, {name}", dev, 1e-12, 4,
                    detail="non-unital kernels have row integral 1 + 2 m t.s" if "damping" in name else "")
        col = float(np.max(np.abs(qk.column_integrals(k, grid) - 1)))
        rep.at_most(f"column integral int K dx = 1 (trace preservation), {name}", col, 1e-12)
    mix = qs.PauliMixture(0.1, 0.2, 0.3, 0.4)
    lhs = qk.mixture_kernel(mix).matrix(pts, pts)
    rhs = sum(p * k.matrix(pts, pts) for p, k in zip(
        mix.probabilities, [qk.identity_kernel()] + [qk.pauli_kernel(a) for a in qs.AXES]))
    rep.at_most("mixture kernel is the convex combination of basic kernels",
                float(np.max(np.abs(lhs - rhs))), 1e-12)

    # 5: CP oracle on extreme points
    lows = []
    inflated = []
    for lx, ly, sign in [(0.8, 0.6, 1), (0.8, 0.8, 1), (0.3, -0.7, -1), (0.0, 0.5, 1), (0.95, 0.2, -1)]:
        ch = qs.extreme_point_channel(lx, ly, sign)
        lows.append(qs.is_cp(qs.choi_of(ch)).min_eigenvalue)
        bad = qs.AffineQubitChannel((0, 0, 1.2 * ch.t[2]), ch.lam)
        inflated.append(qs.is_cp(qs.choi_of(bad)).min_eigenvalue)
    rep.add("extreme-point Choi minimum eigenvalue >= -1e-10", min(lows), -1e-10, min(lows) >= -1e-10, 5)
    rep.add("t_z inflated by 20%: Choi minimum eigenvalue < -1e-3", max(inflated), -1e-3,
            max(inflated) < -1e-3, 5)
    kraus_ptr = max(
        float(np.max(np.abs(qs.choi_of(ch).partial_trace_output() - qs.IDENTITY)))
        for ch in random_kraus(rng, 20)
    )
    rep.at_most("Kraus Choi partial trace over output equals I", kraus_ptr, 1e-10)
    kc = max(
        float(np.max(np.abs(qk.channel_from_kernel(qk.kernel_for(ch), grid).entries
                            - qs.choi_of(ch).entries)))
        for ch in [ad, mix, *random_kraus(rng, 5)]
    )
    rep.at_most("Choi reconstructed from kernel matches Choi of channel", kc, 1e-10)

    # 6: conjugation identity
    points = _random_points(rng, 1000)
    dev = 0.0
    shifted = 0.0
    for x in points:
        u = qt.dequantizer(x)
        for axis in qs.AXES:
            s = qs.pauli(axis)
            lhs = s @ u @ s
            dev = max(dev, float(np.max(np.abs(lhs - qt.dequantizer(qk.angle_involution(axis, x))))))
            shifted = max(shifted, float(np.max(np.abs(lhs - qt.dequantizer(shifted_angle_point(axis, x))))))
    rep.at_most("sigma_a U(x) sigma_a = U(involution_a(x)), 1000 points", dev, 1e-15, 6)
    rep.add("quarter-turn angle substitutions violate the identity (documentation case)",
            shifted, 1e-3, shifted > 1e-3, 6)
    return rep


SWEEP_STATES = (
    bo.Vacuum(),
    bo.Coherent(1.5, -1.0),
    bo.Thermal(0.5),
    bo.Fock(2),
    bo.Squeezed(0.3, 0.7),
)


def channel_sweep():
    out = []
    for kind in ("covariant", "contravariant"):
        for k in (0.0, 0.5, 2.0):
            bound = abs(k**2 - 1) / 2 if kind == "covariant" else (k**2 + 1) / 2
            for alpha in (bound, bound + 0.5):
                out.append(bo.GaussianChannelParams(kind, k, alpha))
    return out


def boson_suite() -> RunReport:
    rep = RunReport("boson")
    grid = bo.OpticalGrid()
    params = channel_sweep()
    worst = 0.0
    charf = 0.0
    symmetry = 0.0
    opp = bo._opposite(grid.n_phi)
    rng = np.random.default_rng(7)
    q, p = rng.normal(scale=2.0, size=(2, 200))
    # k = 2 outputs reach the edge of [-8, 8]; agreement is still node-wise
    for st in SWEEP_STATES:
        F = bo.char_fn(st)
        charf = max(charf, abs(complex(F(0.0, 0.0)) - 1),
                    float(np.max(np.abs(F(-q, -p) - np.conj(F(q, p))))))
        omega = bo.tomogram_from_charfn(F, grid)
        symmetry = max(symmetry, float(np.max(np.abs(omega.values[opp] - omega.values[:, ::-1]))))
        for prm in params:
            direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, prm), grid)
            kernel = bo.apply_gaussian_kernel(omega, prm)
            worst = max(worst, float(np.max(np.abs(direct.values - kernel.values))))
    rep.at_most("F(0,0) = 1 and F(-q,-p) = conj F(q,p)", charf, 1e-12)
    rep.at_most("omega(x, phi+pi) = omega(-x, phi)", symmetry, 1e-10)
    rep.at_most(f"bosonic dual-path agreement, {len(SWEEP_STATES)} states x {len(params)} channels",
                worst, 1e-6, 7)

    # 8: moment law
    vac = bo.tomogram_from_charfn(bo.char_fn(bo.Vacuum()), grid)
    for prm, expected in [(bo.GaussianChannelParams("covariant", 0.5, 0.5), 0.625),
                          (bo.GaussianChannelParams("contravariant", 1.0, 1.0), 1.5)]:
        _, var = bo.apply_gaussian_kernel(vac, prm).moments()
        dev = float(np.max(np.abs(var - expected)))
        rep.at_most(f"output variance {expected} for {prm.kind} k={prm.k} alpha={prm.alpha}", dev, 1e-6, 8)
    coh = bo.Coherent(1.0, 0.5)
    mean, cov = bo.gaussian_moments(coh)
    prm = bo.GaussianChannelParams("covariant", 0.5, 0.5)
    out = bo.apply_gaussian_kernel(bo.tomogram_from_charfn(bo.char_fn(coh), grid), prm)
    m_out, v_out = out.moments()
    c, s = np.cos(grid.phi), np.sin(grid.phi)
    m_exp = prm.k * (mean[0] * c + mean[1] * s)
    v_exp = prm.k**2 * (cov[0, 0] * c**2 + 2 * cov[0, 1] * c * s + cov[1, 1] * s**2) + prm.alpha
    rep.at_most("moment law mean = k mean_in, var = k^2 var_in + alpha (coherent input)",
                float(max(np.max(np.abs(m_out - m_exp)), np.max(np.abs(v_out - v_exp)))), 1e-6)

    # 9: kernel marginals
    for kind, k, alpha in [("covariant", 0.5, 0.5), ("covariant", 2.0, 1.5),
                           ("contravariant", 0.5, 0.625), ("contravariant", 2.0, 2.5)]:
        marg = bo.kernel_marginals(bo.GaussianChannelParams(kind, k, alpha))
        rep.at_most(f"{kind} k={k}: output marginal = 1", float(np.max(np.abs(marg.output - 1))), 1e-8, 9)
        rep.at_most(f"{kind} k={k}: input marginal = 1/k", float(np.max(np.abs(marg.input - 1 / k))), 1e-8, 9)

    # 10: plane representation
    prm = bo.GaussianChannelParams("covariant", 0.5, 0.5)
    plane = bo.plane_distribution(vac)
    out_plane = bo.apply_plane_channel(plane, prm)
    norm = max(abs(plane.normalization() - 1), abs(out_plane.normalization() - 1))
    rep.at_most("(1/2pi) int int Omega dx dy = 1", norm, 1e-6, 10,
                detail=f"measured {plane.normalization():.12g}; (1/pi) int int Omega = "
                       f"{plane.integral() / math.pi:.12g}")
    lo = float(min(plane.values.min(), out_plane.values.min()))
    rep.add("Omega >= -1e-10", lo, -1e-10, lo >= -1e-10, 10)
    agree = 0.0
    for prm in [bo.GaussianChannelParams("covariant", 0.5, 0.5),
                bo.GaussianChannelParams("contravariant", 1.0, 1.0),
                bo.GaussianChannelParams("covariant", 0.0, 0.5)]:
        for st in (bo.Vacuum(), bo.Coherent(1.5, -1.0), bo.Squeezed(0.3, 0.7)):
            omega = bo.tomogram_from_charfn(bo.char_fn(st), grid)
            a = bo.apply_plane_channel(bo.plane_distribution(omega), prm)
            b = bo.plane_distribution(bo.apply_gaussian_kernel(omega, prm))
            agree = max(agree, float(np.max(np.abs(a.values - b.values))))
    rep.at_most("plane channel agrees with the polar pipeline", agree, 1e-6, 10)

    # 11: Fock(1)
    f1 = bo.tomogram_from_charfn(bo.char_fn(bo.Fock(1)), grid)
    x = grid.x
    err = float(np.max(np.abs(f1.values - 2 / math.sqrt(math.pi) * x**2 * np.exp(-(x**2)))))
    rep.at_most("Fock(1) tomogram equals (2/sqrt(pi)) x^2 exp(-x^2)", err, 1e-8, 11)
    return rep


def run_suite(name: str) -> RunReport:
    if name not in ("qubit", "boson", "all"):
        raise ValueError(f"unknown suite {name!r}")
    rep = RunReport(name)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        if name in ("qubit", "all"):
            rep.checks += qubit_suite().checks
        if name in ("boson", "all"):
            rep.checks += boson_suite().checks
    return rep
