import math

import numpy as np
import pytest

from duodyn.numerics import (Grid1D, WaveFunction1D, boundary_mass,
                             bracket_weighted_norm, gaussian, inner_product,
                             make_grid, moment, spectral_gradient,
                             spectral_second_derivative, trig_interpolate,
                             weighted_norm)


def test_grid_points_and_spacing():
    g = make_grid(-2.0, 2.0, 8)
    assert g.spacing == pytest.approx(0.5)
    assert g.points[0] == -2.0
    assert g.points[-1] == pytest.approx(1.5)
    assert g.length == pytest.approx(4.0)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        make_grid(0.0, 1.0, 48)
    with pytest.raises(ValueError):
        make_grid(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        make_grid(1.0, 1.0, 16)


def test_grid_frequencies_are_fft_wavenumbers():
    g = make_grid(0.0, 2.0 * math.pi, 16)
    np.testing.assert_allclose(np.sort(g.frequencies),
                               np.arange(-8, 8), atol=1e-12)


def test_gaussian_is_normalized():
    g = make_grid(-10.0, 10.0, 256)
    for width in (0.5, 1.0, 2.0):
        f = gaussian(g, center=0.3, width=width, momentum=1.2)
        assert f.norm() == pytest.approx(1.0, abs=1e-10)


def test_gaussian_moments():
    g = make_grid(-12.0, 12.0, 512)
    f = gaussian(g, center=0.7, width=1.3)
    assert moment(f, 1) == pytest.approx(0.7, abs=1e-12)
    # position variance of a width-a harmonic ground state is a^2/2
    assert moment(f, 2, centered=True) == pytest.approx(1.3**2 / 2, abs=1e-12)
    assert moment(f, 3, centered=True) == pytest.approx(0.0, abs=1e-12)


def test_moment_order_cap():
    g = make_grid(-10.0, 10.0, 64)
    f = gaussian(g)
    with pytest.raises(ValueError):
        moment(f, 7)


def test_inner_product_conjugate_linearity():
    g = make_grid(-8.0, 8.0, 128)
    f = gaussian(g, momentum=0.5)
    h = gaussian(g, center=0.2)
    assert inner_product(f, h) == pytest.approx(
        np.conj(inner_product(h, f)))
    assert inner_product(f, f).real == pytest.approx(1.0, abs=1e-12)


def test_spectral_derivatives_on_plane_wave():
    g = make_grid(0.0, 2.0 * math.pi, 64)
    k = 3.0
    f = WaveFunction1D(g, np.exp(1j * k * g.points))
    df = spectral_gradient(f)
    np.testing.assert_allclose(df.values, 1j * k * f.values, atol=1e-12)
    d2f = spectral_second_derivative(f)
    np.testing.assert_allclose(d2f.values, -(k**2) * f.values, atol=1e-11)


def test_spectral_gradient_of_gaussian():
    g = make_grid(-10.0, 10.0, 256)
    f = gaussian(g, width=1.0)
    df = spectral_gradient(f)
    expected = -g.points * f.values
    np.testing.assert_allclose(df.values, expected, atol=1e-10)


def test_weighted_norms_against_quadrature():
    g = make_grid(-12.0, 12.0, 512)
    f = gaussian(g, width=1.0)
    # ||u f||^2 = <u^2> = 1/2 for the unit-width ground state
    assert weighted_norm(f, 1) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    direct = math.sqrt(g.spacing * np.sum(
        (1 + g.points**2) * np.abs(g.points * f.values) ** 2))
    assert bracket_weighted_norm(f, 1.0, 1) == pytest.approx(direct)


def test_trig_interpolation_off_grid():
    g = make_grid(-6.0, 6.0, 128)
    f = gaussian(g, center=0.4, width=0.9, momentum=2.0)
    targets = np.linspace(-5.0, 5.0, 41)
    vals = trig_interpolate(f, targets)
    u = targets - 0.4
    expected = (np.pi * 0.9**2) ** (-0.25) * np.exp(
        -(u**2) / (2 * 0.9**2) + 2.0j * u)
    np.testing.assert_allclose(vals, expected, atol=1e-9)


def test_trig_interpolation_at_grid_points():
    g = make_grid(-4.0, 4.0, 64)
    rng = np.random.default_rng(7)
    f = WaveFunction1D(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    np.testing.assert_allclose(trig_interpolate(f, g.points), f.values,
                               atol=1e-12)


def test_boundary_mass_flags_leaky_state():
    g = make_grid(-3.0, 3.0, 64)
    centered = gaussian(g, width=0.5)
    shifted = gaussian(g, center=2.7, width=0.5)
    assert boundary_mass(centered) < 1e-12
    assert boundary_mass(shifted) > 1e-3


def test_wavefunction_norm_uses_cell():
    g = make_grid(0.0, 1.0, 16)
    f = WaveFunction1D(g, np.full(16, 2.0, dtype=complex))
    assert f.norm() == pytest.approx(2.0)
