"""Modulated energy, WKB error sweeps, energy split and slope fitting."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .eikonal import Phase, solve_amplitude, solve_phase
from .errors import DesyncedTrajectories, GridMismatch
from .euler import EulerTrajectory, FluidState
from .gp import EffectiveKernel, Trajectory, WaveField, dt_budget, evolve
from .grid import PeriodicGrid
from .regime import RegimeParams
from .scattering import RadialPotential, capacity, solve_dirichlet


# slope fitting -----------------------------------------------------------------

@dataclass
class SlopeReport:
    sweep_variable: str
    values: List[float]
    errors: List[float]
    fitted_slope: float
    expected_slope: Optional[float]
    residual: float
    used: List[bool] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_slope(values: Sequence[float], errors: Sequence[float], sweep_variable: str = "eps",
              expected: Optional[float] = None, drop: Optional[str] = "largest") -> SlopeReport:
    """OLS fit of log(error) against log(value).

    ``drop`` discards the largest (default) or smallest sweep value as a
    pre-asymptotic guard; residual is the max absolute log-residual.
    """
    x = np.asarray(values, dtype=float)
    y = np.asarray(errors, dtype=float)
    used = np.ones(x.size, dtype=bool)
    if drop == "largest" and x.size > 2:
        used[np.argmax(x)] = False
    elif drop == "smallest" and x.size > 2:
        used[np.argmin(x)] = False
    lx, ly = np.log(x[used]), np.log(y[used])
    slope, icpt = np.polyfit(lx, ly, 1)
    res = float(np.max(np.abs(ly - (icpt + slope * lx))))
    return SlopeReport(sweep_variable, x.tolist(), y.tolist(), float(slope), expected, res,
                       used.tolist())


def within_rel(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol * abs(target)


def stable_within(values: Sequence[float], factor: float = 2.0) -> bool:
    """All values share a sign and max|v| / min|v| < factor."""
    v = np.asarray(values, dtype=float)
    if np.any(v == 0) or not (np.all(v > 0) or np.all(v < 0)):
        return False
    a = np.abs(v)
    return bool(a.max() / a.min() < factor)


# modulated energy ---------------------------------------------------------------

@dataclass
class ModulatedEnergyParts:
    total: float
    kinetic: float
    potential: float
    density_L2_err: float


def modulated_energy_parts(field_: WaveField, fluid: FluidState, kernel: EffectiveKernel,
                           c: float) -> ModulatedEnergyParts:
    """1/2 int |(i eps grad + u) phi|^2 + 1/2 int (K * rho_eps) rho_eps + c/2 int (rho^2 - 2 rho rho_eps)."""
    g = field_.grid
    g.same_as(fluid.grid)
    phi = field_.values
    eps = field_.eps
    dphi = g.grad(phi, real=False)
    cov = [1j * eps * d + u * phi for d, u in zip(dphi, fluid.u)]
    kin = 0.5 * g.integrate(sum(np.abs(x) ** 2 for x in cov))
    rho_e = np.abs(phi) ** 2
    rho = fluid.rho
    pot = 0.5 * g.integrate(kernel.convolve(rho_e) * rho_e) + 0.5 * c * g.integrate(rho * rho - 2 * rho * rho_e)
    err = math.sqrt(g.integrate((rho_e - rho) ** 2))
    return ModulatedEnergyParts(kin + pot, kin, pot, err)


def modulated_energy(field_: WaveField, fluid: FluidState, kernel: EffectiveKernel, c: float) -> float:
    return modulated_energy_parts(field_, fluid, kernel, c).total


def wkb_initial_modulated_energy(grid: PeriodicGrid, rho, eps: float) -> float:
    """(eps^2/2) int |grad sqrt(rho)|^2, the value for exact WKB data and g = c."""
    d = grid.grad(np.sqrt(rho))
    return 0.5 * eps ** 2 * grid.integrate(sum(x * x for x in d))


@dataclass
class ModulatedEnergyReport:
    t_grid: List[float]
    M_values: List[float]
    M_kin: List[float]
    M_pot: List[float]
    density_L2_err: List[float]
    momentum_L1_err: List[float]
    kinetic_L1_err: List[float]
    coercivity_defect: List[float]
    momentum_chain_ok: bool
    kinetic_chain_ok: bool
    C_fit: float
    kappa_fit: float
    base: float

    def to_dict(self) -> dict:
        return asdict(self)


def gronwall_check(gp_traj: Trajectory, euler_traj: EulerTrajectory, kernel: EffectiveKernel,
                   c: float, params: Optional[RegimeParams] = None, eta: float = 0.0,
                   lam_over_L: Optional[float] = None) -> ModulatedEnergyReport:
    """Modulated energy along synchronized trajectories and the Gronwall fit.

    C_fit is the smallest real C with
        M(t) + lam/L <= exp(C t) (M(0) + eps^2 + lam/L + eta)
    at every snapshot t > 0 (it is negative when M decays below the base).
    kappa_fit is the smallest constant with
        ||rho_eps - rho||^2 <= kappa exp(C_fit t) (M(0) + eps^2 + lam/L + eta).
    For delta kernels lam/L is 0 by default.
    """
    if euler_traj.blew_up:
        raise DesyncedTrajectories("Euler trajectory ended with a blow-up proxy")
    if len(gp_traj.times) != len(euler_traj.times) or \
            np.max(np.abs(gp_traj.times - euler_traj.times)) > 1e-10:
        raise DesyncedTrajectories("snapshot times differ")
    if lam_over_L is None:
        lam_over_L = 0.0 if (kernel.mode == "delta" or params is None) else params.lam / params.L
    g = gp_traj.grid
    eps = gp_traj.eps
    out = {k: [] for k in ("M", "kin", "pot", "d", "j", "k", "coer")}
    mom_ok = kin_ok = True
    for i in range(len(gp_traj.times)):
        f = gp_traj.field(i)
        fl = euler_traj.state(i)
        parts = modulated_energy_parts(f, fl, kernel, c)
        phi = f.values
        dphi = g.grad(phi, real=False)
        cov_p = [1j * eps * d + u * phi for d, u in zip(dphi, fl.u)]
        cov_m = [1j * eps * d - u * phi for d, u in zip(dphi, fl.u)]
        n_p = math.sqrt(g.integrate(sum(np.abs(x) ** 2 for x in cov_p)))
        n_m = math.sqrt(g.integrate(sum(np.abs(x) ** 2 for x in cov_m)))
        rho_e = np.abs(phi) ** 2
        J = [np.imag(eps * d * np.conj(phi)) for d in dphi]
        mom = g.integrate(np.sqrt(sum((Jj - fl.rho * u) ** 2 for Jj, u in zip(J, fl.u))))
        u2 = sum(u * u for u in fl.u)
        kin = g.integrate(np.abs(sum(np.abs(eps * d) ** 2 for d in dphi) - fl.rho * u2))
        nphi = math.sqrt(g.integrate(rho_e))
        nu2 = math.sqrt(g.integrate(u2))
        nu4sq = math.sqrt(g.integrate(u2 * u2))
        tol = 1e-12 * (1 + n_p)
        mom_ok &= mom <= nphi * n_p + nu2 * parts.density_L2_err + tol
        kin_ok &= kin <= n_p * n_m + parts.density_L2_err * nu4sq + tol
        coer = 0.5 * parts.kinetic + 0.5 * c * parts.density_L2_err ** 2 - parts.total
        out["M"].append(parts.total)
        out["kin"].append(parts.kinetic)
        out["pot"].append(parts.potential)
        out["d"].append(parts.density_L2_err)
        out["j"].append(mom)
        out["k"].append(kin)
        out["coer"].append(max(coer, 0.0))
    t = gp_traj.times
    M = np.array(out["M"])
    base = M[0] + eps ** 2 + lam_over_L + eta
    lhs = M[1:] + lam_over_L
    if np.any(lhs <= 0):
        C = -math.inf
    else:
        C = float(np.max(np.log(lhs / base) / t[1:]))
    d2 = np.array(out["d"]) ** 2
    kappa = float(np.max(d2 / (base * np.exp(C * t)))) if math.isfinite(C) else math.inf
    return ModulatedEnergyReport(t.tolist(), out["M"], out["kin"], out["pot"], out["d"], out["j"],
                                 out["k"], out["coer"], bool(mom_ok), bool(kin_ok), C, kappa, base)


# WKB ------------------------------------------------------------------------------

@dataclass
class WkbRun:
    eps: float
    N: float
    error: float
    g: float
    a0: float
    mu: float
    eta: float


def wkb_amplitude_error(params: RegimeParams, grid: PeriodicGrid, a_in: Callable, phi_in: Phase,
                        T: float, v: RadialPotential, s: float = 2.0, reference: str = "eikonal",
                        c0_ref: Optional[float] = None, dt_factor: float = 0.025) -> WkbRun:
    """||a_N^eps(T) - a(T)||_{H^s} for one parameter point.

    The GP side runs the delta-kernel equation with g = 4 pi mu~ a0^mu from
    WKB data a_in exp(i phi_in / eps).  ``reference="eikonal"`` compares with
    the characteristic amplitude with rotation ``c0_ref``; ``reference="free"``
    compares with the same GP run with g = 0, isolating the interaction part.
    """
    eps = params.eps
    mu = params.mu
    sol = solve_dirichlet(v, mu)
    g_coupling = 4 * math.pi * params.mu_tilde * sol.a0
    x = np.stack(grid.coords)
    a0_grid = np.asarray(a_in(x), dtype=complex)
    phase0 = phi_in.value(x)
    field0 = WaveField(grid, a0_grid * np.exp(1j * phase0 / eps), eps)
    kern = EffectiveKernel.delta(grid, g_coupling)
    dt = min(dt_factor * eps, dt_budget(field0, kern))
    tr = evolve(field0, kern, dt, T, snapshots_per_unit=1.0 / T)
    phi_T = tr.snapshots[-1]
    ph_eik, _ = solve_phase(phi_in, grid, T)
    a_N = phi_T * np.exp(-1j * ph_eik / eps)
    if reference == "free":
        tr0 = evolve(field0, EffectiveKernel.zero(grid), dt, T, snapshots_per_unit=1.0 / T)
        a_ref = tr0.snapshots[-1] * np.exp(-1j * ph_eik / eps)
    else:
        c0 = 0.0 if c0_ref is None else c0_ref
        a_ref = solve_amplitude(lambda y: a_in(y), phi_in, grid, c0, T)
    err = grid.sobolev_norm(a_N - a_ref, s)
    return WkbRun(eps, params.N, err, g_coupling, sol.a0, mu, capacity(v) - sol.a0)


def wkb_error_sweep(params_list: Sequence[RegimeParams], grid: PeriodicGrid, a_in: Callable,
                    phi_in: Phase, T: float, v: RadialPotential, s: float = 2.0,
                    sweep: str = "eps", expected: Optional[float] = None,
                    reference: Optional[str] = None, runner=map) -> tuple:
    """Run the WKB comparison over a parameter list and fit the slope.

    The reference is chosen from the regime: SGP compares with the eikonal
    amplitude without rotation, BGP with rotation 4 pi c0, HD with the
    interaction-free GP evolution (sweep variable N).
    """
    regimes = {p.regime for p in params_list}
    if len(regimes) != 1:
        raise GridMismatch("sweep mixes regimes")
    regime = regimes.pop()
    if regime not in ("SGP", "BGP", "HD"):
        raise ValueError(f"WKB sweeps need SGP, BGP or HD parameters, got {regime}")
    c0_ref = 4 * math.pi * capacity(v) if regime == "BGP" else 0.0
    if reference is None:
        reference = "free" if regime == "HD" else "eikonal"
    job = _WkbJob(grid, a_in, phi_in, T, v, s, reference, c0_ref)
    runs = list(runner(job, params_list))
    if sweep == "N":
        vals = [r.N for r in runs]
        rep = fit_slope(vals, [r.error for r in runs], "N", expected, drop="smallest")
    else:
        vals = [r.eps for r in runs]
        rep = fit_slope(vals, [r.error for r in runs], "eps", expected, drop="largest")
    return rep, runs


@dataclass
class _WkbJob:
    grid: PeriodicGrid
    a_in: Callable
    phi_in: Phase
    T: float
    v: RadialPotential
    s: float
    reference: str
    c0_ref: float

    def __call__(self, params):
        return wkb_amplitude_error(params, self.grid, self.a_in, self.phi_in, self.T, self.v,
                                   self.s, self.reference, self.c0_ref)


# energy split -----------------------------------------------------------------------

def energy_density_split(scattering, v: RadialPotential, params: RegimeParams, density=None) -> dict:
    """Split of the internal energy coefficient 4 pi mu~ a0 into kinetic and interaction shares.

    Shares are coefficients of rho^2.  If a radial ``density`` is given, the
    interaction share is compared in L^1 with the directly computed main term
    (K_f2 * rho) rho.
    """
    from .pair import interaction_main_term

    a0, b0 = scattering.a0, scattering.b0
    mt = params.mu_tilde
    out = {"mu": scattering.mu, "total": 4 * math.pi * mt * a0, "kinetic_share": 4 * math.pi * mt * b0,
           "interaction_share": 4 * math.pi * mt * (a0 - b0), "theta": b0 / a0 if a0 > 0 else 0.0,
           "hard_core_total": 4 * math.pi * mt * capacity(v),
           "eta": capacity(v) - a0}
    out["kinetic_residual"] = abs(out["hard_core_total"] - out["kinetic_share"])
    if density is not None and a0 > 0:
        direct, pred, res = interaction_main_term(scattering, v, density, params, a0, b0)
        out.update(direct_interaction_L1=direct, predicted_interaction_L1=pred,
                   interaction_L1_residual=res)
    return out
