import math

import numpy as np
import pytest
from scipy.integrate import quad

from beclab.diagnostics import fit_slope
from beclab.errors import GridMismatch, UnresolvedSupport
from beclab.pair import (ConstantDensity, GaussianDensity, PairKernel, hs_constant_density_closed_form,
                         kinetic_correction_check, neumann_gradient_integral,
                         neumann_gradient_integral_dual)
from beclab.regime import RegimeParams
from beclab.scattering import RadialPotential, solve_dirichlet, solve_neumann

V = RadialPotential()
D0 = solve_dirichlet(V, 1.0)
P = RegimeParams(N=1e4, eps=0.5)
NGS = solve_neumann(V, 1.0, P.L, a0=D0.a0)


def test_gaussian_density_closed_forms():
    g = GaussianDensity(0.7)
    mass = quad(lambda r: g.rho(r) * 4 * math.pi * r * r, 0, g.r_max)[0]
    assert abs(mass - 1) <= 1e-10
    # autocorrelation at 0 is int rho^2
    a0 = quad(lambda r: g.rho(r) ** 2 * 4 * math.pi * r * r, 0, g.r_max)[0]
    assert abs(g.autocorr(0.0) - a0) <= 1e-12
    # sphere mean at R = 0 is rho(r)
    assert abs(g.sphere_mean(0.0, 0.9) - g.rho(0.9)) <= 1e-14
    R, W = g.outer_nodes()
    assert abs(np.sum(W * g.rho(R)) - 1) <= 1e-12


def test_constant_density_hs_norm():
    vol = 8.0
    k = PairKernel(NGS, ConstantDensity(vol), P)
    assert abs(k.hs_norm() / hs_constant_density_closed_form(NGS, P, vol) - 1) <= 1e-6


def test_zero_potential_gives_zero_kernel():
    z = RadialPotential(v0=0.0)
    k = PairKernel(solve_neumann(z, 1.0, P.L), GaussianDensity(1.0), P)
    assert k.hs_norm() <= 1e-12 and k.grad_hs_norm() <= 1e-12
    X = np.zeros((3, 1))
    assert np.all(np.abs(k.evaluate(X, X + 1e-3)) <= 1e-12)


def test_neumann_gradient_integral_two_ways():
    a = neumann_gradient_integral(NGS)
    b = neumann_gradient_integral_dual(NGS, V)
    assert abs(a / b - 1) <= 1e-8


def test_pointwise_bound():
    k = PairKernel(NGS, GaussianDensity(1.0), P)
    rng = np.random.default_rng(0)
    X = 0.5 * rng.standard_normal((3, 2000))
    Y = X + 0.002 * rng.standard_normal((3, 2000))
    assert np.all(np.abs(k.evaluate(X, Y)) <= k.pointwise_bound(X, Y, C=1.0) * (1 + 1e-12))


def test_dense_kernel_is_symmetric():
    k = PairKernel(NGS, GaussianDensity(1.0), P)
    pts = 0.01 * np.random.default_rng(1).standard_normal((3, 50))
    M = k.dense(pts)
    assert np.allclose(M, M.T, rtol=0, atol=1e-14 * np.max(np.abs(M)))
    assert np.all(M <= 0)


def test_diagnostics_constants_positive():
    dg = PairKernel(NGS, GaussianDensity(1.0), P).diagnostics()
    cs = dg.constants()
    assert all(cs[key] > 0 for key in ("hs", "grad", "sup"))
    assert set(dg.to_dict()) >= {"hs_norm", "grad_hs_norm", "sup_slice_norm", "constants"}


def test_kinetic_residual_decays_like_inverse_scale():
    dens = GaussianDensity(1.0)
    rows = []
    for N in (1e3, 2e3, 4e3, 8e3):
        p = RegimeParams(N=N, eps=0.5)
        ngs = solve_neumann(V, 1.0, p.L, a0=D0.a0)
        rows.append((p.scale, kinetic_correction_check(ngs, dens, p, D0.b0)))
    rep = fit_slope([r[0] for r in rows], [r[1] for r in rows], "scale", -1.0, drop="smallest")
    assert abs(rep.fitted_slope + 1) <= 0.15


def test_input_guards():
    with pytest.raises(GridMismatch):
        PairKernel(solve_dirichlet(V, 0.5), GaussianDensity(1.0), P)
    huge = RegimeParams.from_log(1e4, 0.5, alpha=0.5)
    with pytest.raises(UnresolvedSupport):
        PairKernel(solve_dirichlet(V, huge.mu), GaussianDensity(1.0), huge)
