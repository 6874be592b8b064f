import math

import numpy as np
import pytest

from beclab.errors import ConfigInvalid, InvalidPotential, NonPositiveMu, StepTooCoarse
from beclab.regime import RegimeParams
from beclab.scattering import (RadialPotential, b0_by_gradient, capacity, closed_form_a0,
                               dirichlet_fd_a0, dirichlet_moment, eta, eta_rate_fit,
                               neumann_comparison_constant, neumann_fd_extrapolated,
                               potential_moment, rescaled_scattering_data,
                               scattering_length_by_integral, solution_table, solve_dirichlet,
                               solve_neumann)

UNIT = RadialPotential(v0=1.0, R0=1.0)
ZERO = RadialPotential(v0=0.0, R0=1.0)


@pytest.mark.parametrize("v0", [1.0, 5.0])
@pytest.mark.parametrize("mu", [1.0, 1e-2, 1e-4])
def test_constant_potential_matches_tanh_formula(v0, mu):
    sol = solve_dirichlet(RadialPotential(v0=v0), mu)
    assert abs(sol.a0 - closed_form_a0(v0, 1.0, mu)) <= 1e-8


def test_unit_potential_value():
    # 1 - tanh(1)
    assert abs(solve_dirichlet(UNIT, 1.0).a0 - 0.23840584404423515) <= 1e-8


def test_small_mu_eta_close_to_sqrt_mu():
    sol = solve_dirichlet(UNIT, 1e-4)
    assert abs(sol.a0 - (1 - 1e-2)) <= 1e-8
    assert abs(eta(sol, UNIT) - 1e-2) <= 1e-8


def test_closed_form_profile():
    mu = 0.3
    sol = solve_dirichlet(UNIT, mu)
    k = 1 / math.sqrt(mu)
    r = sol.r_grid[: sol.n_interior + 1]
    exact = np.sinh(k * r) / (k * math.cosh(k))
    assert np.max(np.abs(sol.m_values[: sol.n_interior + 1] - exact)) <= 1e-9
    assert abs(sol.log_c1 - math.log(1 / math.cosh(k))) <= 1e-9


def test_zero_potential():
    sol = solve_dirichlet(ZERO, 1.0)
    assert sol.a0 == 0.0
    assert np.allclose(sol.f, 1.0)
    assert np.allclose(sol.m_values, sol.r_grid)
    assert capacity(ZERO) == 0.0
    assert sol.b0 == 0.0


def test_exterior_tail_is_exact():
    sol = solve_dirichlet(UNIT, 1.0)
    r = np.array([1.5, 3.0, 10.0])
    assert np.allclose(sol.f_at(r), 1 - sol.a0 / r, rtol=0, atol=1e-15)
    assert np.allclose(sol.df_at(r), sol.a0 / r ** 2, rtol=0, atol=1e-15)


def test_integral_formula_and_identities():
    sol = solve_dirichlet(UNIT, 1.0)
    assert abs(scattering_length_by_integral(sol, UNIT) - (1 - math.tanh(1))) <= 1e-6
    assert abs(scattering_length_by_integral(sol, UNIT) - sol.a0) <= 1e-6
    assert abs(sol.b0 - b0_by_gradient(sol, UNIT)) <= 1e-6


def test_b0_closed_form():
    # b0 = a0 - (1/mu) int v m^2 with m = sinh(kr)/(k cosh k), mu = 1
    sol = solve_dirichlet(UNIT, 1.0)
    t = math.tanh(1.0)
    int_m2 = (0.5 * (math.sinh(2) / 2 - 1)) / math.cosh(1) ** 2
    assert abs(sol.b0 - (1 - t - int_m2)) <= 1e-8


def test_b0_ratio_tends_to_one():
    ratios = [solve_dirichlet(UNIT, mu).b0 / solve_dirichlet(UNIT, mu).a0 for mu in (1, 1e-2, 1e-4)]
    assert ratios[0] < ratios[1] < ratios[2] < 1
    assert 1 - ratios[2] < 1e-2


@pytest.mark.parametrize("R0", [1.0, 2.5])
def test_capacity(R0):
    assert capacity(RadialPotential(R0=R0)) == R0


@pytest.mark.parametrize("n", [0, 1, 2])
def test_capacity_of_vanishing_potentials(n):
    assert capacity(RadialPotential(kind="vanishing", n=n)) == 1.0


def test_banded_fd_oracle_agrees():
    v = RadialPotential(kind="vanishing", n=1.0, v0=3.0)
    sol = solve_dirichlet(v, 0.1)
    assert abs(dirichlet_fd_a0(v, 0.1, 1e-4) - sol.a0) <= 1e-6


def test_errors():
    with pytest.raises(NonPositiveMu):
        solve_dirichlet(UNIT, 0.0)
    with pytest.raises(StepTooCoarse):
        solve_dirichlet(UNIT, 1e-4, step=0.1)
    with pytest.raises(InvalidPotential):
        RadialPotential(v0=-1.0)
    with pytest.raises(InvalidPotential):
        RadialPotential(profile=lambda r: -np.ones_like(r), kind="custom")(np.array([0.5]))


def test_solution_table_columns():
    tab = solution_table(solve_dirichlet(UNIT, 1.0))
    assert tab.shape[1] == 4


# Neumann -------------------------------------------------------------------------

def test_neumann_zero_potential():
    ngs = solve_neumann(ZERO, 1.0, 10.0)
    assert ngs.E_gs == 0.0
    assert np.allclose(ngs.f_at(np.linspace(0.1, 10, 7)), 1.0)


# E_gs from an independent analytic shooting equation (brentq on the
# piecewise closed form), frozen here.
NEUMANN_RATIOS = {10.0: 1.0443714212678865, 20.0: 1.0218257140117613, 40.0: 1.0108210299148368}


@pytest.mark.parametrize("L", [10.0, 20.0, 40.0])
def test_neumann_energy_against_analytic_shooting(L):
    from scipy.optimize import brentq

    a0 = 1 - math.tanh(1)

    def F(E):
        k, q = math.sqrt(1 - E), math.sqrt(E)
        m1, d1 = math.sinh(k), k * math.cosh(k)
        x = L - 1
        m = m1 * math.cos(q * x) + d1 / q * math.sin(q * x)
        dm = -m1 * q * math.sin(q * x) + d1 * math.cos(q * x)
        return L * dm - m

    eb = 3 * a0 / L ** 3
    E = brentq(F, 1e-3 * eb, 2 * eb, xtol=1e-30, rtol=1e-15)
    ngs = solve_neumann(UNIT, 1.0, L)
    assert abs(ngs.E_gs / E - 1) <= 1e-9
    assert abs(ngs.E_gs * L ** 3 / (3 * a0) - NEUMANN_RATIOS[L]) <= 1e-8


@pytest.mark.parametrize("L", [10.0, 20.0, 40.0])
def test_neumann_fd_cross_check(L):
    ngs = solve_neumann(UNIT, 1.0, L)
    assert abs(neumann_fd_extrapolated(UNIT, 1.0, L) / ngs.E_gs - 1) <= 1e-6


def test_neumann_ratio_tends_to_one_from_above():
    a0 = solve_dirichlet(UNIT, 1.0).a0
    r = [solve_neumann(UNIT, 1.0, L).E_gs * L ** 3 / (3 * a0) for L in (10, 20, 40, 80)]
    assert all(x > 1 for x in r)
    assert np.all(np.diff(r) < 0)
    # leading correction (9/5) a0 / L
    assert abs((r[-1] - 1) * 80 / a0 - 1.8) < 0.1


def test_neumann_profile_close_to_dirichlet():
    d0 = solve_dirichlet(UNIT, 1.0)
    ngs = solve_neumann(UNIT, 1.0, 20.0, a0=d0.a0)
    C = neumann_comparison_constant(d0, ngs)
    assert 0 < C <= 5


def test_neumann_boundary_condition():
    ngs = solve_neumann(UNIT, 1.0, 20.0)
    f, df = ngs.exterior(np.array([20.0]))
    assert abs(f[0] - 1) <= 1e-10
    assert abs(df[0]) <= 1e-10


def test_potential_moments():
    # gaps to the Dirichlet values decay like a0 / L with an L-independent constant
    d0 = solve_dirichlet(UNIT, 1.0)
    c1, c2 = [], []
    for L in (10.0, 20.0, 40.0):
        ngs = solve_neumann(UNIT, 1.0, L, a0=d0.a0)
        c1.append((potential_moment(ngs, UNIT, 1) - 4 * math.pi * d0.a0) * L / d0.a0)
        c2.append((potential_moment(ngs, UNIT, 2) - dirichlet_moment(d0, UNIT, 2)) * L / d0.a0)
    for c in (c1, c2):
        assert 0 < min(c) and max(c) / min(c) < 1.1 and max(c) < 10
    assert potential_moment(solve_neumann(ZERO, 1.0, 10.0), ZERO, 1) == 0.0


# rates -------------------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2])
def test_eta_rate(n):
    v = RadialPotential(kind="vanishing", n=n)
    fit = eta_rate_fit(v, n, np.logspace(-2, -6, 9))
    assert abs(fit.slope - 1 / (n + 2)) <= 0.15 / (n + 2)


def test_rescaled_gp_product_is_a0():
    p = RegimeParams(N=1e3, eps=0.5)
    sol = solve_dirichlet(UNIT, p.mu)
    a_N, prod, target, dev = rescaled_scattering_data(p, sol, UNIT)
    assert abs(p.N * a_N * p.eps ** 2 - sol.a0) <= 1e-12
    assert prod == sol.a0


def test_rescaled_hc_deviation_is_eta():
    p = RegimeParams.from_log(1e4, 0.5, alpha=0.5)
    sol = solve_dirichlet(UNIT, p.mu)
    _, _, _, dev = rescaled_scattering_data(p, sol, UNIT)
    assert abs(dev - eta(sol, UNIT)) <= 1e-14


# regime ------------------------------------------------------------------------

def test_regime_classifier():
    assert RegimeParams(N=100, eps=0.5).regime == "GP"
    assert RegimeParams(N=100, eps=0.5, alpha=0.5).regime == "HC"
    assert RegimeParams(N=100, eps=0.5, kappa=0.0).regime == "SGP"
    assert RegimeParams(N=100, eps=0.5, kappa=0.5).regime == "BGP"
    assert RegimeParams(N=100, eps=0.5, beta=1.5).regime == "HD"


def test_regime_derived_values():
    p = RegimeParams(N=64, eps=0.5)
    assert p.mu == 1.0 and p.lam == 1.0
    assert math.isclose(p.scale, 16.0) and p.ell == 0.0625 and math.isclose(p.L, 1.0)


def test_huge_particle_numbers():
    p = RegimeParams.from_log(27825.0, 0.5, alpha=0.5)
    assert math.isinf(p.N) and math.isinf(p.scale)
    assert abs(p.mu - 1 / math.sqrt(27825.0)) <= 1e-15


@pytest.mark.parametrize("bad", [dict(N=2.0, eps=0.5), dict(N=10, eps=0.0), dict(N=10, eps=0.5, beta=0.5),
                                 dict(N=10, eps=0.5, kappa=2.0), dict(N=10, eps=0.5, alpha=1.0)])
def test_regime_validation(bad):
    with pytest.raises(ConfigInvalid):
        RegimeParams(**bad)
