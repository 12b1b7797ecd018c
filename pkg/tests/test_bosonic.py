import math
import re
import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm

from tomochannels import bosonic as bo
from tomochannels.exceptions import ChannelParameterError, GridAlignmentError, TruncationWarning
from tomochannels.verification import SWEEP_STATES, channel_sweep

GRID = bo.OpticalGrid()
X = GRID.x
PHI = GRID.phi


def _quadratures(dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return (a + a.T) / math.sqrt(2), (a - a.T) / (1j * math.sqrt(2))


def _fock_charfn_oracle(n, q, p, dim=40):
    Q, P = _quadratures(dim)
    return expm(1j * (q * Q + p * P))[n, n]


def _tomo(state, grid=GRID):
    return bo.tomogram_from_charfn(bo.char_fn(state), grid)


def test_vacuum_charfn_against_wavefunction_integral():
    re, _ = quad(lambda x: math.cos(2 * x) * math.exp(-(x**2)) / math.sqrt(math.pi), -np.inf, np.inf)
    assert complex(bo.char_fn(bo.Vacuum())(2.0, 0.0)) == pytest.approx(re, abs=1e-12)
    assert re == pytest.approx(math.exp(-1), abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_fock_charfn_against_truncated_displacement(n, rng):
    F = bo.char_fn(bo.Fock(n))
    for q, p in rng.normal(scale=1.2, size=(6, 2)):
        assert complex(F(q, p)) == pytest.approx(_fock_charfn_oracle(n, q, p), abs=1e-10)


def test_fock_one_closed_form(rng):
    F = bo.char_fn(bo.Fock(1))
    for q, p in rng.normal(size=(10, 2)):
        s = q**2 + p**2
        assert complex(F(q, p)) == pytest.approx((1 - s / 2) * math.exp(-s / 4), abs=1e-15)


@pytest.mark.parametrize("state", [bo.Coherent(0.7, -1.1), bo.Thermal(0.8), bo.Squeezed(0.4, 1.2)])
def test_gaussian_charfns_against_operator_oracle(state, rng):
    """Build rho in a truncated Fock basis from the state's definition."""
    dim = 50
    Q, P = _quadratures(dim)
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    vac = np.zeros(dim)
    vac[0] = 1
    if isinstance(state, bo.Coherent):
        alpha = (state.q + 1j * state.p) / math.sqrt(2)
        psi = expm(alpha * a.T - np.conj(alpha) * a) @ vac
        rho = np.outer(psi, psi.conj())
    elif isinstance(state, bo.Thermal):
        nb = state.nbar
        rho = np.diag([nb**k / (1 + nb) ** (k + 1) for k in range(dim)])
    else:
        z = state.r * np.exp(1j * state.theta)
        psi = expm(0.5 * (np.conj(z) * a @ a - z * a.T @ a.T)) @ vac
        rho = np.outer(psi, psi.conj())
    F = bo.char_fn(state)
    for q, p in rng.normal(scale=0.8, size=(5, 2)):
        oracle = np.trace(rho @ expm(1j * (q * Q + p * P)))
        assert complex(F(q, p)) == pytest.approx(oracle, abs=1e-8)


@pytest.mark.parametrize("state", SWEEP_STATES)
def test_charfn_hermiticity(state, rng):
    F = bo.char_fn(state)
    q, p = rng.normal(scale=2, size=(2, 50))
    assert complex(F(0.0, 0.0)) == pytest.approx(1, abs=1e-15)
    assert np.max(np.abs(F(-q, -p) - np.conj(F(q, p)))) < 1e-14


def test_vacuum_tomogram():
    omega = _tomo(bo.Vacuum())
    assert np.max(np.abs(omega.values - np.exp(-(X**2)) / math.sqrt(math.pi))) < 1e-12


def test_coherent_tomogram_mean_and_variance():
    mean, var = _tomo(bo.Coherent(2, 0)).moments()
    assert np.max(np.abs(mean - 2 * np.cos(PHI))) < 1e-10
    assert np.max(np.abs(var - 0.5)) < 1e-10


def test_fock_one_tomogram_is_hermite_function_squared():
    omega = _tomo(bo.Fock(1))
    assert np.max(np.abs(omega.values - 2 / math.sqrt(math.pi) * X**2 * np.exp(-(X**2)))) < 1e-8


@pytest.mark.parametrize("state", SWEEP_STATES)
def test_tomogram_normalisation_and_symmetry(state):
    omega = _tomo(state)
    assert np.max(np.abs(omega.normalization() - 1)) < 1e-10
    opp = (np.arange(GRID.n_phi) + GRID.n_phi // 2) % GRID.n_phi
    assert np.max(np.abs(omega.values[opp] - omega.values[:, ::-1])) < 1e-10


def test_squeezed_tomogram_variance_along_axis():
    st = bo.Squeezed(0.3, 0.7)
    _, var = _tomo(st).moments()
    _, cov = bo.gaussian_moments(st)
    c, s = np.cos(PHI), np.sin(PHI)
    expected = cov[0, 0] * c**2 + 2 * cov[0, 1] * c * s + cov[1, 1] * s**2
    assert np.max(np.abs(var - expected)) < 1e-9
    assert var.min() >= math.exp(-0.6) / 2 - 1e-9


def test_charfn_from_tomogram_examples():
    vac = _tomo(bo.Vacuum())
    assert bo.charfn_from_tomogram(vac, 0.0, 0.0) == pytest.approx(1, abs=1e-12)
    assert bo.charfn_from_tomogram(vac, 1.0, 0.0) == pytest.approx(math.exp(-0.25), abs=1e-12)
    f1 = _tomo(bo.Fock(1))
    assert bo.charfn_from_tomogram(f1, 1.0, 0.0) == pytest.approx(0.5 * math.exp(-0.25), abs=1e-9)
    with pytest.raises(ValueError):
        bo.charfn_from_tomogram(vac, 1.0, 0.1)  # phi off the grid
    with pytest.raises(ValueError):
        bo.charfn_from_tomogram(vac, 100.0, 0.0)


def test_fock_cap():
    with pytest.raises(ValueError):
        bo.Fock(11)
    with pytest.raises(ValueError):
        bo.Fock(1.5)


def test_direct_channel_examples(rng):
    q, p = rng.normal(size=(2, 20))
    out = bo.apply_gaussian_channel_direct(bo.char_fn(bo.Vacuum()), bo.GaussianChannelParams("covariant", 0.5, 0.5))
    assert np.allclose(out(q, p), np.exp(-(q**2 + p**2) * (0.0625 + 0.25)), atol=1e-15)
    for st in SWEEP_STATES:
        out = bo.apply_gaussian_channel_direct(bo.char_fn(st), bo.GaussianChannelParams("covariant", 0.0, 0.5))
        assert np.allclose(out(q, p), np.exp(-(q**2 + p**2) / 4), atol=1e-15)


@pytest.mark.parametrize("kind, k, alpha, message", [
    ("covariant", 0.5, 0.3, "alpha >= |k^2-1|/2"),
    ("contravariant", 0.5, 0.6, "alpha >= (k^2+1)/2"),
    ("covariant", 1.0, 1.0, "k != 1"),
    ("covariant", -0.5, 1.0, "k >= 0"),
    ("beamsplitter", 0.5, 1.0, "kind"),
])
def test_parameter_bounds(kind, k, alpha, message):
    with pytest.raises(ChannelParameterError, match=re.escape(message)):
        bo.GaussianChannelParams(kind, k, alpha)


def test_boundary_parameters_accepted():
    assert bo.GaussianChannelParams("covariant", 0.5, 0.375).noise_bound == 0.375
    assert bo.GaussianChannelParams("contravariant", 1.0, 1.0).noise_bound == 1.0


def test_covariant_kernel_on_vacuum():
    out = bo.apply_gaussian_kernel(_tomo(bo.Vacuum()), bo.GaussianChannelParams("covariant", 0.5, 0.5))
    mean, var = out.moments()
    assert np.max(np.abs(var - 0.625)) < 1e-6 and np.max(np.abs(mean)) < 1e-12
    gauss = np.exp(-(X**2) / 1.25) / math.sqrt(1.25 * math.pi)
    assert np.max(np.abs(out.values - gauss)) < 1e-10


def test_boundary_kernel_dual_path():
    prm = bo.GaussianChannelParams("covariant", 0.5, 0.375)
    F = bo.char_fn(bo.Coherent(1.0, 0.5))
    direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, prm), GRID)
    kernel = bo.apply_gaussian_kernel(bo.tomogram_from_charfn(F, GRID), prm)
    assert np.max(np.abs(direct.values - kernel.values)) < 1e-6


def test_contravariant_on_coherent_state_reflects_phase():
    """p -> -p mirrors the mean curve: 2 cos(phi) stays 2 cos(phi) for a
    q-displaced input; a p-displaced input has its mean curve negated."""
    prm = bo.GaussianChannelParams("contravariant", 1.0, 1.0)
    mean, var = bo.apply_gaussian_kernel(_tomo(bo.Coherent(2, 0)), prm).moments()
    # tails of the variance-1.5 output reach x = 8, hence 1e-5
    assert np.max(np.abs(mean - 2 * np.cos(PHI))) < 1e-5
    assert np.max(np.abs(var - 1.5)) < 1e-4
    mean, _ = bo.apply_gaussian_kernel(_tomo(bo.Coherent(0, 2)), prm).moments()
    assert np.max(np.abs(mean + 2 * np.sin(PHI))) < 1e-5


def test_quarter_turn_contravariant_rule_fails_dual_path():
    """Documentation case: reading the input slice at phi - pi/2 instead of
    -phi does not reproduce the characteristic-function path."""
    prm = bo.GaussianChannelParams("contravariant", 1.0, 1.0)
    F = bo.char_fn(bo.Coherent(2, 0))
    direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, prm), GRID)
    omega = bo.tomogram_from_charfn(F, GRID)
    rotated = omega.values[(np.arange(GRID.n_phi) - GRID.n_phi // 4) % GRID.n_phi]
    quarter = bo.gaussian_convolve(rotated, prm.k, prm.alpha, X)
    assert np.max(np.abs(quarter - direct.values)) > 0.1
    assert np.max(np.abs(bo.apply_gaussian_kernel(omega, prm).values - direct.values)) < 1e-6
    # the quarter-turn rule gives the mean curve 2 cos(phi - pi/2)
    mean, _ = bo.OpticalTomogram(GRID, quarter).moments()
    assert np.max(np.abs(mean - 2 * np.cos(PHI - math.pi / 2))) < 1e-5


def test_dual_path_sweep(quiet):
    params = channel_sweep()
    assert len(params) == 12
    worst = 0.0
    for st in SWEEP_STATES:
        F = bo.char_fn(st)
        omega = bo.tomogram_from_charfn(F, GRID)
        for prm in params:
            direct = bo.tomogram_from_charfn(bo.apply_gaussian_channel_direct(F, prm), GRID)
            worst = max(worst, np.max(np.abs(direct.values - bo.apply_gaussian_kernel(omega, prm).values)))
    assert worst < 1e-6


@pytest.mark.parametrize("prm", channel_sweep(), ids=lambda p: f"{p.kind}-{p.k}-{p.alpha}")
def test_output_normalisation_on_wide_grid(prm):
    grid = bo.OpticalGrid(20.0, 1001, 16)
    for st in (bo.Vacuum(), bo.Fock(2)):
        out = bo.apply_gaussian_kernel(_tomo(st, grid), prm)
        assert np.max(np.abs(out.normalization() - 1)) < 1e-8


def test_moment_law_for_gaussian_inputs(quiet):
    for st in (bo.Coherent(1.0, -0.5), bo.Squeezed(0.3, 0.7), bo.Thermal(0.5)):
        mean_in, cov = bo.gaussian_moments(st)
        for prm in (bo.GaussianChannelParams("covariant", 0.5, 0.5),
                    bo.GaussianChannelParams("contravariant", 0.5, 0.625)):
            m, v = bo.apply_gaussian_kernel(_tomo(st), prm).moments()
            sgn = 1 if prm.kind == "covariant" else -1
            c, s = np.cos(PHI), sgn * np.sin(PHI)
            assert np.max(np.abs(m - prm.k * (mean_in[0] * c + mean_in[1] * s))) < 1e-6
            var_in = cov[0, 0] * c**2 + 2 * cov[0, 1] * c * s + cov[1, 1] * s**2
            assert np.max(np.abs(v - (prm.k**2 * var_in + prm.alpha))) < 1e-6


def test_edge_warning_for_wide_outputs():
    grid = bo.OpticalGrid(3.0, 61, 8)
    with pytest.warns(TruncationWarning):
        bo.apply_gaussian_kernel(_tomo(bo.Thermal(3.0), grid), bo.GaussianChannelParams("covariant", 0.5, 0.5))


@pytest.mark.parametrize("kind, k, alpha, expected_in", [
    ("covariant", 0.5, 0.5, 2.0),
    ("covariant", 2.0, 1.5, 0.5),
    ("contravariant", 1.0, 1.0, 1.0),
])
def test_kernel_marginals(kind, k, alpha, expected_in):
    marg = bo.kernel_marginals(bo.GaussianChannelParams(kind, k, alpha))
    assert np.max(np.abs(marg.output - 1)) < 1e-8
    assert np.max(np.abs(marg.input - expected_in)) < 1e-8


def test_kernel_marginal_diverges_at_zero_scaling():
    marg = bo.kernel_marginals(bo.GaussianChannelParams("covariant", 0.0, 0.5))
    assert marg.input_divergent and math.isinf(marg.input_integral)
    assert marg.output_integral == pytest.approx(1, abs=1e-8)


def test_plane_distribution_of_vacuum():
    plane = bo.plane_distribution(_tomo(bo.Vacuum()))
    r = plane.r
    assert np.max(np.abs(plane.values - np.exp(-(r**2)) / (math.sqrt(math.pi) * r))) < 1e-11
    assert np.all(plane.values >= -1e-10)


def test_plane_integral_is_half_of_two_pi():
    """The plane function integrates to pi, not 2 pi: each direction is
    covered by the two half-rays phi and phi + pi, which together carry the
    unit mass of one tomogram slice."""
    for st in (bo.Vacuum(), bo.Coherent(1.5, -1.0), bo.Fock(2)):
        plane = bo.plane_distribution(_tomo(st))
        assert plane.normalization() == pytest.approx(0.5, abs=1e-6)
        assert plane.integral() / math.pi == pytest.approx(1, abs=1e-6)


def test_plane_radial_density_peaks_on_displacement_ray():
    """r * Omega peaks on the phi = 0 ray at r = 2. Omega itself does not:
    its 1/r factor favours small radii on neighbouring rays."""
    plane = bo.plane_distribution(_tomo(bo.Coherent(2, 0)))
    dens = plane.values * plane.r
    j, i = np.unravel_index(np.argmax(dens), dens.shape)
    assert PHI[j] == 0.0 and plane.r[i] == pytest.approx(2.0)
    j, i = np.unravel_index(np.argmax(plane.values), plane.values.shape)
    assert PHI[j] != 0.0


def test_two_half_ray_charfn_reconstruction():
    for st in (bo.Vacuum(), bo.Coherent(1.5, -1.0), bo.Fock(1)):
        plane = bo.plane_distribution(_tomo(st))
        F = bo.char_fn(st)
        for j in (0, 5, 17, 40):
            for t in (0.3, 1.0, 2.0):
                expected = complex(F(t * math.cos(PHI[j]), t * math.sin(PHI[j])))
                assert plane.charfn_on_ray(t, j) == pytest.approx(expected, abs=1e-5)


def test_single_half_ray_reconstruction_fails():
    """Documentation case: integrating r e^{itr} Omega over the half-ray at
    phi alone misses the contribution of the opposite half-ray."""
    plane = bo.plane_distribution(_tomo(bo.Vacuum()))
    rn = plane.radial_nodes()
    w = bo.trapezoid_weights(rn)
    single = complex(np.sum(w * np.exp(1j * rn) * plane.radial_density()[0]))
    assert abs(single - math.exp(-0.25)) > 0.1


def test_plane_channel_matches_polar_pipeline(quiet):
    for prm in (bo.GaussianChannelParams("covariant", 0.5, 0.5),
                bo.GaussianChannelParams("covariant", 0.0, 0.5),
                bo.GaussianChannelParams("contravariant", 1.0, 1.0)):
        for st in (bo.Vacuum(), bo.Coherent(1.5, -1.0), bo.Squeezed(0.3, 0.7)):
            omega = _tomo(st)
            a = bo.apply_plane_channel(bo.plane_distribution(omega), prm)
            b = bo.plane_distribution(bo.apply_gaussian_kernel(omega, prm))
            assert np.max(np.abs(a.values - b.values)) < 1e-6
            assert np.max(np.abs(a.origin - b.origin)) < 1e-6


def test_plane_channel_on_vacuum_is_wider_gaussian():
    out = bo.apply_plane_channel(bo.plane_distribution(_tomo(bo.Vacuum())),
                                 bo.GaussianChannelParams("covariant", 0.5, 0.5))
    r = out.r
    expected = np.exp(-(r**2) / 1.25) / (math.sqrt(1.25 * math.pi) * r)
    assert np.max(np.abs(out.values - expected)) < 1e-6
    assert out.normalization() == pytest.approx(0.5, abs=1e-6)


def test_contravariant_plane_output_is_mirror_of_covariant():
    """Same k and alpha: the contravariant output equals the covariant one
    with (x, y) -> (x, -y); the quarter-turn map (x, y) -> (y, -x) does not."""
    st = bo.Coherent(1.5, -1.0)
    plane = bo.plane_distribution(_tomo(st))
    co = bo.apply_plane_channel(plane, bo.GaussianChannelParams("covariant", 0.5, 0.625))
    contra = bo.apply_plane_channel(plane, bo.GaussianChannelParams("contravariant", 0.5, 0.625))
    n = GRID.n_phi
    mirror = (-np.arange(n)) % n
    assert np.max(np.abs(contra.values - co.values[mirror])) < 1e-12
    quarter = (np.arange(n) - n // 4) % n
    assert np.max(np.abs(contra.values - co.values[quarter])) > 1e-2


def test_plane_grid_alignment_errors():
    with pytest.raises(GridAlignmentError):
        bo.plane_distribution(_tomo(bo.Vacuum(), bo.OpticalGrid(8, 400, 64)))
    with pytest.raises(GridAlignmentError):
        bo.plane_distribution(_tomo(bo.Vacuum(), bo.OpticalGrid(8, 401, 63)))


def test_plane_channel_warns_when_mass_reaches_cutoff():
    grid = bo.OpticalGrid(4.0, 81, 8)
    plane = bo.plane_distribution(_tomo(bo.Thermal(0.5), grid))
    with pytest.warns(TruncationWarning):
        bo.apply_plane_channel(plane, bo.GaussianChannelParams("covariant", 2.0, 1.5))


def test_csv_headers():
    small = bo.OpticalGrid(2.0, 5, 4)
    omega = _tomo(bo.Vacuum(), small)
    assert omega.to_csv().split("\n")[0] == "x,phi,omega"
    text = bo.plane_distribution(omega).to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "x,y,Omega" and len(lines) == 1 + 4 * 2


def test_non_hermitian_charfn_rejected():
    bad = bo.CharacteristicFn(lambda q, p: np.exp(1j * q * 0.5 - q**2 - p**2) * (1 + 0.1j))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ArithmeticError):
            bo.tomogram_from_charfn(bad, bo.OpticalGrid(4, 41, 4))
