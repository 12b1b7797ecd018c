"""Property-based checks over random states, channels and sample points."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from tomochannels import bosonic as bo
from tomochannels import qstate as qs
from tomochannels import qubit_kernels as qk
from tomochannels import qubit_tomography as qt

GRID = qt.AngularGrid()
unit = st.floats(-1, 1, allow_nan=False)
angle = st.floats(0, 2 * math.pi, allow_nan=False)
polar = st.floats(0, math.pi, allow_nan=False)
m_val = st.sampled_from(qt.M_VALUES)


@st.composite
def bloch_vectors(draw):
    v = np.array([draw(unit), draw(unit), draw(unit)])
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


@st.composite
def extreme_channels(draw):
    return qs.extreme_point_channel(draw(unit), draw(unit), draw(st.sampled_from([-1, 1])))


@st.composite
def pauli_mixtures(draw):
    raw = np.array([draw(st.floats(0, 1)) for _ in range(4)]) + 1e-9
    return qs.PauliMixture(*(raw / raw.sum()))


@settings(max_examples=60, deadline=None)
@given(bloch_vectors())
def test_round_trip(a):
    rho = qs.bloch_to_density(a)
    assert np.max(np.abs(qt.reconstruct(qt.sample_tomogram(rho, GRID)).entries - rho.entries)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(bloch_vectors(), m_val, angle, polar)
def test_tomogram_is_probability(a, m, alpha, beta):
    rho = qs.bloch_to_density(a)
    w = qt.tomogram_of(rho, qt.TomoPoint(m, alpha, beta))
    w_other = qt.tomogram_of(rho, qt.TomoPoint(-m, alpha, beta))
    assert -1e-15 <= w <= 1 + 1e-15
    assert abs(w + w_other - 1) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.one_of(extreme_channels(), pauli_mixtures()), bloch_vectors())
def test_dual_path(ch, a):
    rho = qs.bloch_to_density(a)
    w = qt.sample_tomogram(rho, GRID)
    out = qk.apply_kernel(qk.kernel_for(ch), w).values
    assert np.max(np.abs(out - qk.direct_output_tomogram(ch, rho, GRID).values)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(extreme_channels())
def test_extreme_points_are_cp_and_boundary(ch):
    assert qs.is_cp(qs.choi_of(ch)).min_eigenvalue >= -1e-10
    # the Choi matrix of an extreme point is singular
    assert abs(qs.choi_of(ch).eigenvalues()[0]) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(qs.AXES), m_val, angle, polar)
def test_conjugation_identity(axis, m, alpha, beta):
    x = qt.TomoPoint(m, alpha, beta)
    s = qs.pauli(axis)
    assert np.max(np.abs(s @ qt.dequantizer(x) @ s - qt.dequantizer(qk.angle_involution(axis, x)))) <= 1e-15


@settings(max_examples=100, deadline=None)
@given(m_val, angle, st.floats(-10, 10, allow_nan=False))
def test_canonical_angles_preserve_dequantizer(m, alpha, beta):
    x = qt.TomoPoint(m, alpha, beta)
    c = x.canonical()
    assert 0 <= c.beta <= math.pi and 0 <= c.alpha < 2 * math.pi
    assert np.max(np.abs(qt.dequantizer(x) - qt.dequantizer(c))) < 1e-13


@st.composite
def gaussian_params(draw):
    kind = draw(st.sampled_from(["covariant", "contravariant"]))
    # k = 0 or a scale where 1/k is a representable float
    k = draw(st.one_of(st.just(0.0), st.floats(1e-300, 1.5))
             .filter(lambda v: abs(v - 1) > 1e-3 or kind == "contravariant"))
    bound = abs(k**2 - 1) / 2 if kind == "covariant" else (k**2 + 1) / 2
    return bo.GaussianChannelParams(kind, k, bound + draw(st.floats(0, 1)))


SMALL = bo.OpticalGrid(12.0, 241, 16)


@settings(max_examples=25, deadline=None)
@given(gaussian_params(), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_bosonic_dual_path_and_normalisation(prm, q, p):
    F = bo.char_fn(bo.Coherent(q, p))
    omega = bo.tomogram_from_charfn(F, SMALL)
    kernel = bo.apply_gaussian_kernel(omega, prm)
    direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, prm), SMALL)
    assert np.max(np.abs(kernel.values - direct.values)) < 1e-6
    assert np.max(np.abs(kernel.normalization() - 1)) < 1e-6
    assert kernel.values.min() > -1e-10


@settings(max_examples=25, deadline=None)
@given(gaussian_params())
def test_kernel_output_marginal_is_one(prm):
    marg = bo.kernel_marginals(prm, points=[-1.0, 0.0, 2.0])
    assert np.max(np.abs(marg.output - 1)) < 1e-8
    if prm.k > 0:
        assert np.max(np.abs(prm.k * marg.input - 1)) < 1e-8
