import math

import numpy as np
import pytest

from beclab.eikonal import (CosinePhase, LinearPhase, QuadraticPhase, caustic_time, hj_residual,
                            invert_flow, phase_from_config, solve_amplitude, solve_eikonal,
                            solve_phase, spectral_interpolate, upwind_amplitude)
from beclab.errors import PastCaustic
from beclab.experiments import CosineAmplitude
from beclab.grid import PeriodicGrid

G = PeriodicGrid(1, 128, 2 * math.pi)


def smooth_amp(y):
    return (1 + 0.5 * np.cos(y[0])) + 0j


@pytest.mark.parametrize("phase, expected", [(QuadraticPhase(-1.0), 1.0), (QuadraticPhase(1.0), math.inf),
                                             (CosinePhase([0.5]), 2.0), (LinearPhase([2.0]), math.inf)])
def test_caustic_times(phase, expected):
    assert caustic_time(phase, G) == pytest.approx(expected, rel=1e-12)


def test_caustic_time_in_two_dimensions():
    g = PeriodicGrid(2, 32, 2 * math.pi)
    assert caustic_time(CosinePhase([0.25, 0.5]), g) == pytest.approx(2.0, rel=1e-12)
    assert caustic_time(QuadraticPhase(-1.0, dim_=2), g) == pytest.approx(1.0, rel=1e-12)


def test_quadratic_phase_closed_form():
    t = 0.7
    phi, grad = solve_phase(QuadraticPhase(1.0), G, t)
    x = G.x1
    assert np.max(np.abs(phi - x ** 2 / (2 * (1 + t)))) <= 1e-12
    assert np.max(np.abs(grad[0] - x / (1 + t))) <= 1e-12


def test_linear_phase_hj_residual():
    # phi = xi x - xi^2 t / 2 is reproduced exactly by centred differences
    assert hj_residual(LinearPhase([1.5]), G, 0.5, 1e-3) <= 1e-12


def test_hj_residual_second_order():
    ph = CosinePhase([0.5])
    r = [hj_residual(ph, PeriodicGrid(1, n, 2 * math.pi), 0.5, 2 * math.pi / n) for n in (64, 128, 256)]
    slopes = [math.log2(r[i] / r[i + 1]) for i in (0, 1)]
    assert all(abs(s - 2) <= 0.2 for s in slopes)


def test_flow_inversion():
    ph = CosinePhase([0.5])
    x = G.x1[None, :]
    y = invert_flow(ph, x, 1.5)
    assert np.max(np.abs(y + 1.5 * ph.grad(y) - x)) <= 1e-12


def test_linear_transport_with_rotation():
    xi, c0, t = 0.8, 2.0, 0.9
    a = solve_amplitude(smooth_amp, LinearPhase([xi]), G, c0, t)
    a_in = smooth_amp((G.x1 - xi * t)[None, :])
    exact = a_in * np.exp(-1j * c0 * np.abs(a_in) ** 2 * t)
    assert np.max(np.abs(a - exact)) <= 1e-8


def test_amplitude_mass_conserved():
    st0 = solve_eikonal(CosineAmplitude(0.5), CosinePhase([0.5]), G, 1.0, 0.0)
    st1 = solve_eikonal(CosineAmplitude(0.5), CosinePhase([0.5]), G, 1.0, 1.5)
    assert abs(st1.mass() - st0.mass()) <= 1e-6
    assert st1.caustic_time == pytest.approx(2.0)


def test_rotation_leaves_modulus_unchanged():
    ph = CosinePhase([0.5])
    a0 = solve_amplitude(smooth_amp, ph, G, 0.0, 1.0)
    a1 = solve_amplitude(smooth_amp, ph, G, 3.0, 1.0)
    assert np.max(np.abs(np.abs(a0) - np.abs(a1))) <= 1e-13


def test_upwind_cross_check_first_order():
    ph, c0, t = CosinePhase([0.5]), 1.0, 0.5
    errs = []
    for n in (64, 128, 256):
        g = PeriodicGrid(1, n, 2 * math.pi)
        ref = solve_amplitude(smooth_amp, ph, g, c0, t)
        errs.append(np.max(np.abs(upwind_amplitude(smooth_amp, ph, g, c0, t) - ref)))
    slopes = [math.log2(errs[i] / errs[i + 1]) for i in (0, 1)]
    assert all(abs(s - 1) <= 0.25 for s in slopes)


def test_past_caustic_raises():
    with pytest.raises(PastCaustic):
        solve_eikonal(smooth_amp, CosinePhase([0.5]), G, 0.0, 2.0)
    with pytest.raises(PastCaustic):
        solve_phase(QuadraticPhase(-1.0), G, 1.2)


def test_spectral_interpolation_exact_for_band_limited_data():
    y = np.array([[0.123, 1.7, -2.9]])
    f = np.cos(3 * G.x1) + 0.2 * np.sin(G.x1)
    out = spectral_interpolate(G, f, y)
    assert np.max(np.abs(out - (np.cos(3 * y[0]) + 0.2 * np.sin(y[0])))) <= 1e-12


def test_grid_samples_as_amplitude():
    ph = CosinePhase([0.5])
    a_fun = solve_amplitude(smooth_amp, ph, G, 1.0, 1.0)
    a_arr = solve_amplitude(smooth_amp(G.x1[None, :]), ph, G, 1.0, 1.0)
    assert np.max(np.abs(a_fun - a_arr)) <= 1e-12


def test_phase_config_round_trip():
    for ph in (CosinePhase([0.5], [2.0]), QuadraticPhase(-1.0), LinearPhase([1.0, 2.0])):
        assert phase_from_config(ph.to_config()).to_config() == ph.to_config()
