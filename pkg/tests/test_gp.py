import math

import numpy as np
import pytest

from beclab.errors import InsufficientSnapshots, StabilityViolation, UnresolvedKernel
from beclab.gp import (EffectiveKernel, WaveField, build_effective_kernel, continuity_residual,
                       energy, evolve, identity_approximation_error, l_term, observables,
                       radial_fourier_transform, strang_step)
from beclab.grid import PeriodicGrid
from beclab.regime import RegimeParams
from beclab.scattering import RadialPotential, solve_dirichlet, solve_neumann

G1 = PeriodicGrid(1, 256, 2 * math.pi)
UNIT = RadialPotential()


def plane_wave(grid, xi, eps):
    return WaveField(grid, np.exp(1j * xi * grid.x1) / math.sqrt(grid.volume) + 0j, eps)


def gaussian_samples(grid, width):
    x = grid.x1
    return np.exp(-x ** 2 / (2 * width ** 2)) / math.sqrt(2 * math.pi * width ** 2)


# grid ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        PeriodicGrid(1, 100, 1.0)
    g = PeriodicGrid(2, 16, 2.0)
    assert g.shape == (16, 16) and math.isclose(g.volume, 4.0)


def test_spectral_derivatives_and_sobolev_norm():
    x = G1.x1
    assert np.max(np.abs(G1.deriv(np.sin(3 * x), 0) - 3 * np.cos(3 * x))) < 1e-12
    # ||sin(kx)||_{H^s}^2 = (1 + k^2)^s pi
    assert math.isclose(G1.sobolev_norm(np.sin(3 * x), 2.0), math.sqrt(100 * math.pi), rel_tol=1e-12)


# kernels --------------------------------------------------------------------------

def test_zero_potential_gives_zero_kernel():
    p = RegimeParams(N=64, eps=0.5)
    z = RadialPotential(v0=0.0)
    K = build_effective_kernel(p, z, solve_dirichlet(z, p.mu), PeriodicGrid(3, 16, 1.0))
    assert K.g == 0.0 and K.integral == 0.0
    assert np.all(K.convolve(np.ones(K.grid.shape)) == 0)


def test_gp_toy_point_integral():
    p = RegimeParams(N=64, eps=0.5)
    sol = solve_dirichlet(UNIT, p.mu)
    g = PeriodicGrid(3, 64, 1.0)
    K = build_effective_kernel(p, UNIT, sol, g, mode="scaled")
    assert abs(K.integral / (4 * math.pi * sol.a0) - 1) <= 0.02
    # quadrature of the physical samples agrees with the multiplier at k = 0
    assert abs(g.integrate(K.physical()) - K.integral) <= 1e-10 * K.integral
    assert K.meta["profile_nonnegative"]


def test_scaled_kernel_needs_resolution():
    p = RegimeParams(N=64, eps=0.5)
    sol = solve_dirichlet(UNIT, p.mu)
    with pytest.raises(UnresolvedKernel):
        build_effective_kernel(p, UNIT, sol, PeriodicGrid(3, 16, 1.0), mode="scaled")


def test_neumann_input_rules():
    p = RegimeParams(N=1e4, eps=0.5)
    d0 = solve_dirichlet(UNIT, p.mu)
    g = PeriodicGrid(1, 64, 2 * math.pi)
    with pytest.raises(ValueError):
        build_effective_kernel(p, UNIT, d0, g, mode="delta")
    ngs = solve_neumann(UNIT, p.mu, p.L, a0=d0.a0)
    K = build_effective_kernel(p, UNIT, ngs, g, mode="delta")
    assert math.isclose(K.g, 4 * math.pi * d0.a0)


def test_hc_coupling_tends_to_capacity():
    vals = []
    for lnN in (1e2, 1e4, 1e8):
        p = RegimeParams.from_log(lnN, 0.5, alpha=0.5)
        sol = solve_dirichlet(UNIT, p.mu)
        K = EffectiveKernel.delta(G1, 4 * math.pi * p.mu_tilde * sol.a0)
        vals.append(K.g / p.mu_tilde)
    err = [abs(v - 4 * math.pi) for v in vals]
    # the gap is 4 pi eta(mu) with eta(mu) = sqrt(mu) tanh(1 / sqrt(mu)), mu = 1e-4 at the last point
    assert err[0] > err[1] > err[2] and abs(err[2] - 4 * math.pi * 1e-2) < 1e-12


def test_radial_fourier_transform_of_ball():
    r = np.linspace(0, 1, 4001)
    q = np.array([0.0, 1.0, 3.0])
    exact = 4 * math.pi * np.array([1 / 3] + [(math.sin(k) - k * math.cos(k)) / k ** 3 for k in q[1:]])
    assert np.max(np.abs(radial_fourier_transform(r, np.ones_like(r), q) - exact)) < 1e-10


def test_identity_approximation_improves_with_scale():
    x = G1.x1
    rho = (1 + 0.3 * np.cos(x)) / (2 * math.pi)
    errs = [identity_approximation_error(EffectiveKernel.from_samples(G1, gaussian_samples(G1, w)), rho)
            for w in (0.4, 0.2, 0.1)]
    assert errs[0] > errs[1] > errs[2]
    assert math.log(errs[0] / errs[2]) / math.log(4) >= 1


# propagation -----------------------------------------------------------------------

def test_plane_wave_exact_phase():
    eps = 0.1
    f0 = plane_wave(G1, 3, eps)
    tr = evolve(f0, EffectiveKernel.zero(G1), 0.01, 1.0)
    exact = f0.values * np.exp(-1j * eps * 9 / 2)
    assert np.max(np.abs(tr.snapshots[-1] - exact)) <= 1e-12


def test_gaussian_packet_closed_form():
    eps, sigma, p = 0.1, 0.3, 0.5
    g = PeriodicGrid(1, 512, 4 * math.pi)
    x = g.x1

    def packet(t):
        z = 1 + 1j * eps * t / (2 * sigma ** 2)
        return ((2 * math.pi * sigma ** 2) ** -0.25 / np.sqrt(z)
                * np.exp(-(x - p * t) ** 2 / (4 * sigma ** 2 * z) + 1j * p * (x - p * t / 2) / eps))

    tr = evolve(WaveField(g, packet(0.0), eps), EffectiveKernel.zero(g), 0.01, 1.0)
    assert np.max(np.abs(tr.snapshots[-1] - packet(1.0))) <= 1e-10


def test_constant_state_delta_kernel():
    eps, gc = 0.1, 1.0
    phi0 = np.full(G1.shape, 1 / math.sqrt(G1.volume), dtype=complex)
    tr = evolve(WaveField(G1, phi0, eps), EffectiveKernel.delta(G1, gc), 0.01, 1.0)
    exact = phi0 * np.exp(-1j * gc / G1.volume / eps)
    assert np.max(np.abs(tr.snapshots[-1] - exact)) <= 1e-12


@pytest.mark.parametrize("kind", ["plane", "gauss", "const", "wkb"])
def test_energy_and_mass_conservation(kind):
    eps = 0.1
    x = G1.x1
    if kind == "plane":
        f0, K = plane_wave(G1, 3, eps), EffectiveKernel.zero(G1)
    elif kind == "gauss":
        f0 = WaveField(G1, np.exp(-x ** 2 / 0.36 + 5j * x) + 0j, eps).normalized()
        K = EffectiveKernel.zero(G1)
    elif kind == "const":
        f0 = WaveField(G1, np.ones(G1.shape, complex), eps).normalized()
        K = EffectiveKernel.delta(G1, 1.0)
    else:
        f0 = WaveField.wkb(G1, 1 + 0.3 * np.cos(x), -0.3 * np.cos(x), eps)
        K = EffectiveKernel.delta(G1, 3.0)
    rep = evolve(f0, K, 0.01, 1.0).conservation_report()
    assert rep["mass_drift"] <= 1e-10
    assert rep["energy_drift_rel"] <= 1e-6


def test_stability_budget_enforced():
    f0 = plane_wave(G1, 1, 0.1)
    with pytest.raises(StabilityViolation):
        strang_step(f0, EffectiveKernel.zero(G1), 0.02)
    with pytest.raises(StabilityViolation):
        strang_step(f0, EffectiveKernel.delta(G1, 1e3), 0.005)


def test_energy_of_plane_wave():
    eps = 0.1
    assert math.isclose(energy(plane_wave(G1, 3, eps), EffectiveKernel.zero(G1)), eps ** 2 * 9 / 2,
                        rel_tol=1e-12)


# observables -------------------------------------------------------------------------

def test_plane_wave_observables():
    eps = 0.1
    o = observables(plane_wave(G1, 3, eps), EffectiveKernel.zero(G1))
    vol = G1.volume
    assert np.allclose(o.rho, 1 / vol, atol=1e-14)
    assert np.allclose(o.J[0], 3 * eps / vol, atol=1e-13)
    assert np.allclose(o.e_kin, eps ** 2 * 9 / (2 * vol), atol=1e-13)


def test_real_field_has_no_current():
    x = G1.x1
    o = observables(WaveField(G1, (1 + 0.2 * np.cos(x)) + 0j, 0.1), EffectiveKernel.zero(G1))
    assert np.max(np.abs(o.J[0])) <= 1e-15


def test_wkb_current():
    x = G1.x1
    rho = (1 + 0.3 * np.cos(x)) / (2 * math.pi)
    S = -0.3 * np.cos(x)
    errs = []
    for eps in (0.2, 0.1, 0.05):
        f = WaveField.wkb(G1, rho, S, eps)
        o = observables(f, EffectiveKernel.zero(G1))
        errs.append(G1.integrate(np.abs(o.J[0] - o.rho * 0.3 * np.sin(x))))
    # the WKB current is exactly rho grad S, so the O(eps) bound holds at round-off
    assert max(errs) <= 1e-12


def test_l_term_has_zero_integral():
    x = G1.x1
    rho = (1 + 0.3 * np.cos(x) + 0.1 * np.sin(3 * x)) / (2 * math.pi)
    K = EffectiveKernel.from_samples(G1, gaussian_samples(G1, 0.3))
    assert abs(G1.integrate(l_term(rho, K, G1)[0])) <= 1e-15


def test_continuity_residual_plane_wave():
    tr = evolve(plane_wave(G1, 2, 0.1), EffectiveKernel.zero(G1), 0.01, 0.1, every_steps=1)
    m, p, lint = continuity_residual(tr, EffectiveKernel.zero(G1))
    assert m <= 1e-10 and p <= 1e-10 and lint <= 1e-10


def test_continuity_residual_second_order():
    out = []
    for dt, n in ((0.004, 128), (0.002, 256), (0.001, 512)):
        g = PeriodicGrid(1, n, 2 * math.pi)
        x = g.x1
        K = EffectiveKernel.from_samples(g, gaussian_samples(g, 0.3))
        tr = evolve(WaveField.wkb(g, 1 + 0.3 * np.cos(x), 0.2 * np.sin(x), 0.1), K, dt, 0.05,
                    every_steps=1)
        out.append(continuity_residual(tr, K))
    for j in (0, 1):
        slope = math.log(out[0][j] / out[2][j]) / math.log(4)
        assert abs(slope - 2) <= 0.3


def test_continuity_needs_snapshots():
    tr = evolve(plane_wave(G1, 1, 0.1), EffectiveKernel.zero(G1), 0.01, 0.02, snapshots_per_unit=50)
    with pytest.raises(InsufficientSnapshots):
        continuity_residual(tr, EffectiveKernel.zero(G1))
