import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyosc.coherent import (
    CoherentState, MeasureSpec, adaptive_nmax, basis_block, coefficients, density, eigen_residual, evolve,
    ladder_pair, lower_spectral, mean_energy, measure_moments, normalization_c0, overlap,
    pochhammer_bases, resolution_of_identity,
)
from susyosc.errors import DomainError, SubspaceMismatch
from susyosc.grid import integrate, uniform_grid
from susyosc.ladder import EPS_SINGLET, apply_ladder
from susyosc.specfun import hyp_1f4

from conftest import rel_err

NUS = [-2, 1]
EPS_RANGE = st.floats(-1.45, 0.45)
Z = st.complex_numbers(max_magnitude=200.0, allow_nan=False, allow_infinity=False)


def test_zero_label():
    c = coefficients(1, 0.0, 0.0, 5)
    assert c[0] == 1.0 and np.all(c[1:] == 0)
    assert normalization_c0(-2, 0.0, 0.0) == 1.0


def test_singlet_is_zero_label_coherent_state():
    pair = ladder_pair(0.0, 2.0)
    # L- psi_eps = 0 = z psi_eps with z = 0
    assert apply_ladder(pair, "lower", pair.state(EPS_SINGLET))[0] == 0.0


def test_nu1_z10_nmax40():
    s = CoherentState(1, 10.0, nmax=40)
    assert abs(s.norm2() - 1) < 1e-10
    assert eigen_residual(s) < 1e-8


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("r", [1.0, 10.0, 100.0, 200.0])
def test_adaptive_normalization_and_eigenvector(nu, r):
    s = CoherentState(nu, r * cmath.exp(0.7j))
    assert abs(s.norm2() - 1) < 1e-10
    assert eigen_residual(s) < 1e-8 * max(1.0, r)
    assert abs(s.coeffs[-1]) ** 2 < 1e-16 * np.max(np.abs(s.coeffs) ** 2)


@given(st.sampled_from(NUS), EPS_RANGE, Z)
def test_coefficient_ratio(nu, eps, z):
    c = coefficients(nu, eps, z, 20)
    a, b, cc, d = pochhammer_bases(nu, eps)
    n = np.arange(1, 21)
    want = (z / 4) / np.sqrt((a + n - 1) * (b + n - 1) * (cc + n - 1) * (d + n - 1))
    keep = (np.abs(c[:-1]) > 1e-280) & (np.abs(c[1:]) > 1e-280)
    assert np.allclose(c[1:][keep] / c[:-1][keep], want[keep], rtol=1e-12, atol=0)


@given(st.sampled_from(NUS), EPS_RANGE)
def test_bases_never_poles_in_range(nu, eps):
    for p in pochhammer_bases(nu, eps):
        assert not (p <= 0 and float(p).is_integer())


def test_parameter_range_rejected():
    with pytest.raises(ValueError):
        coefficients(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        coefficients(1, 0.7, 1.0)


def test_c0_golden(golden):
    for nu, eps, r, want in golden["c0"]:
        assert rel_err(normalization_c0(nu, eps, r), want) < 1e-12


@given(st.sampled_from(NUS), EPS_RANGE, st.floats(0, 150))
def test_c0_definition_consistency(nu, eps, r):
    c0 = normalization_c0(nu, eps, r)
    assert c0 ** 2 * hyp_1f4(*pochhammer_bases(nu, eps), r * r / 16).value == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(NUS), Z)
def test_spectral_lowering_exact(nu, z):
    s = CoherentState(nu, z)
    low = lower_spectral(s)
    scale = max(1.0, abs(z))
    assert np.max(np.abs(low - z * s.coeffs[:-1])) < 1e-10 * scale


# overlaps

def test_overlap_diagonal_and_spot_value():
    s = CoherentState(-2, 4 + 1j)
    assert overlap(s, s) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("nu", NUS)
def test_overlap_scan(nu):
    z = 4 + 1j
    ref = CoherentState(nu, z)
    for dz in np.linspace(0.25, 5.0, 20):
        other = CoherentState(nu, z + dz * cmath.exp(1j * dz))
        assert abs(overlap(other, ref)) < 1


@pytest.mark.parametrize("nu", NUS)
def test_overlap_continuity(nu):
    z = 4 + 1j
    ref = CoherentState(nu, z)
    mods = [abs(overlap(CoherentState(nu, z + d * (1 + 1j)), ref)) for d in (1.0, 0.1, 0.01, 1e-3)]
    assert all(m2 >= m1 for m1, m2 in zip(mods, mods[1:]))
    assert 1 - mods[-1] < 1e-5


@given(st.sampled_from(NUS), Z, Z)
def test_overlap_hermitian(nu, z1, z2):
    a, b = CoherentState(nu, z1), CoherentState(nu, z2)
    assert abs(overlap(a, b) - overlap(b, a).conjugate()) < 1e-12


def test_overlap_matches_coefficient_sum():
    a, b = CoherentState(1, 3 - 2j), CoherentState(1, 5 + 1j)
    n = max(a.nmax, b.nmax)
    want = np.vdot(coefficients(1, 0.0, a.z, n), coefficients(1, 0.0, b.z, n))
    assert abs(overlap(a, b) - want) < 1e-13


def test_overlap_subspace_mismatch():
    a, b = CoherentState(-2, 1.0), CoherentState(1, 1.0)
    with pytest.raises(SubspaceMismatch):
        overlap(a, b)
    assert overlap(a, b, orthogonal_zero=True) == 0


# mean energy

def test_mean_energy_golden(golden):
    for nu, eps, r, want in golden["mean_energy"]:
        assert rel_err(mean_energy(CoherentState(nu, r, eps)).direct, want) < 1e-12


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("eps", [0.0, -0.25, -0.75])
def test_mean_energy_small_z(nu, eps):
    # leading term of E - (nu + 1/2) = 2<N> is 2 |z|^2 / (16 abcd)
    a, b, c, d = pochhammer_bases(nu, eps)
    for r in (1e-2, 1e-3, 1e-4):
        gap = mean_energy(CoherentState(nu, r, eps)).direct - (nu + 0.5)
        lead = 2 * r * r / (16 * a * b * c * d)
        assert abs(gap - lead) < r * r * lead + 1e-15
    assert abs(mean_energy(CoherentState(nu, 1e-6, eps)).direct - (nu + 0.5)) < 1e-10


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("eps", [-0.25, -0.75])
def test_mean_energy_monotone(nu, eps):
    vals = [mean_energy(CoherentState(nu, r, eps)).direct for r in np.linspace(0, 100, 201)]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("nu", NUS)
def test_mean_energy_slower_than_standard(nu):
    # a standard coherent state with level spacing 2 has nu + 1/2 + 2|z|^2
    r = 100.0
    assert mean_energy(CoherentState(nu, r)).direct < nu + 0.5 + 2 * r * r


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("r", [0.5, 10.0, 100.0])
def test_mean_energy_closed_forms(nu, r):
    m = mean_energy(CoherentState(nu, r, -0.25))
    assert rel_err(m.closed_form_corrected, m.direct) < 1e-12
    assert float(m) == m.direct


def test_mean_energy_printed_form_disagrees():
    m = mean_energy(CoherentState(-2, 100.0))
    assert abs(m.closed_form_printed - m.direct) > 1.0


@pytest.mark.parametrize("nu", NUS)
def test_mean_energy_nmax_invariance(nu):
    s = CoherentState(nu, 60.0)
    bigger = CoherentState(nu, 60.0, nmax=s.nmax + 40)
    assert abs(mean_energy(s).direct - mean_energy(bigger).direct) < 1e-10


# time evolution and densities

def test_evolve_period_and_identity():
    s = CoherentState(-2, 3 + 4j)
    phase, same = evolve(s, 0.0)
    assert phase == 1 and same.z == s.z
    phase, back = evolve(s, math.pi)
    assert abs(back.z - s.z) < 1e-12
    assert abs(phase - cmath.exp(-1j * (-1.5) * math.pi)) < 1e-15


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_evolve_composition(t1, t2):
    s = CoherentState(1, 2 - 1j)
    p1, a = evolve(s, t1)
    p2, b = evolve(a, t2)
    p12, c = evolve(s, t1 + t2)
    assert abs(b.z - c.z) < 1e-12
    assert abs(p1 * p2 - p12) < 1e-12


@pytest.fixture(scope="module")
def density_setup():
    x = uniform_grid(-10, 10, 2001)
    out = {}
    for nu in NUS:
        s = CoherentState(nu, 100.0)
        out[nu] = (s, basis_block(s, x, 12))
    return x, out


@pytest.mark.parametrize("nu", NUS)
def test_density_normalized_and_periodic(density_setup, nu):
    x, sets = density_setup
    s, block = sets[nu]
    for t in (0.0, 0.3, 1.1, 2.5):
        rho = density(s, x, t, 12, block)
        assert abs(integrate(rho, x) - 1) < 1e-6
        assert np.max(np.abs(density(s, x, t + math.pi, 12, block) - rho)) < 1e-10


@pytest.mark.parametrize("nu", NUS)
def test_two_wavepackets(density_setup, nu):
    x, sets = density_setup
    s, block = sets[nu]
    for t in np.linspace(math.pi / 4, 3 * math.pi / 4, 7):
        rho = density(s, x, t, 12, block)
        inner = np.arange(1, x.size - 1)
        peaks = inner[(rho[inner] > rho[inner - 1]) & (rho[inner] > rho[inner + 1]) & (rho[inner] > 0.05 * rho.max())]
        assert len(peaks) == 2
        assert x[peaks[0]] == pytest.approx(-x[peaks[1]], abs=0.02)
    # the packets meet near the origin at t = 0
    rho0 = density(s, x, 0.0, 12, block)
    assert abs(x[np.argmax(rho0)]) < 1.0


def test_zero_label_density_static():
    x = uniform_grid(-8, 8, 801)
    s = CoherentState(-2, 0.0)
    pair = ladder_pair(0.0, 2.0)
    want = pair.basis_function(-2, 0)(x) ** 2
    for t in (0.0, 0.7):
        assert np.max(np.abs(density(s, x, t, 12) - want)) < 1e-14


# completeness measure

def test_measure_moments():
    rows = measure_moments(MeasureSpec(1, 0.0), 5)
    assert [r[0] for r in rows] == [1, 2, 3, 4, 5]
    for _, q, g, err in rows:
        assert err < 1e-4 and rel_err(q, g) == err


def test_measure_positive():
    spec = MeasureSpec(1, 0.0)
    assert np.all(spec.f(np.geomspace(1e-3, 1e4, 50)) >= 0)
    assert np.all(MeasureSpec(-2, 0.0).f(np.geomspace(1e-3, 1e4, 50)) >= 0)


def test_measure_guards():
    with pytest.raises(ValueError):
        measure_moments(MeasureSpec(1, 0.0), 7)
    with pytest.raises(DomainError):
        measure_moments(MeasureSpec(-2, 0.0), 1)
    with pytest.raises(DomainError):
        resolution_of_identity(-2, 0.0)


def test_resolution_of_identity():
    block = resolution_of_identity(1, 0.0, 2)
    assert np.max(np.abs(block - np.eye(3))) < 1e-3


def test_subnormal_imaginary_label():
    s = CoherentState(-2, 2 + 5e-324j)
    assert np.allclose(s.coeffs, CoherentState(-2, 2).coeffs, rtol=0, atol=1e-15)
