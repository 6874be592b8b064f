"""Acceptance suite: one function per criterion, each returning a CriterionResult.

Every criterion reads optional overrides from its own config table and
writes only deterministic numbers into its tables; wall times are kept
separately so that CSV output is reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .diagnostics import (energy_density_split, fit_slope, gronwall_check, stable_within,
                          wkb_error_sweep, within_rel)
from .eikonal import CosinePhase
from .euler import acoustic_frequency, evolve_euler, FluidState, state_distance, time_reversal_error
from .experiments import CosineAmplitude, FluidData
from .gp import EffectiveKernel, WaveField, continuity_residual, dt_budget, evolve
from .grid import PeriodicGrid
from .pair import GaussianDensity, PairKernel, kinetic_correction_check
from .regime import RegimeParams
from .scattering import (RadialPotential, b0_by_gradient, closed_form_a0, default_step, eta_rate_fit,
                         neumann_comparison_constant, neumann_fd_extrapolated,
                         scattering_length_by_integral, solve_dirichlet, solve_neumann)

TITLES = {
    1: "closed-form scattering oracle",
    2: "eta rate reproduction",
    3: "Neumann ground-state asymptotics",
    4: "scattering identities",
    5: "GP conservation",
    6: "continuity residuals",
    7: "Euler solver",
    8: "modulated-energy mechanism",
    9: "WKB rates",
    10: "energy split",
    11: "pair-kernel bounds",
    12: "determinism",
}


@dataclass
class Table:
    name: str
    header: List[str]
    rows: List[list]


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: Dict[str, bool]
    metrics: Dict[str, float]
    tables: List[Table] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, ok in self.checks.items() if not ok]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"criterion {self.number:2d} {status}  {self.title}{tail}"


def _result(number, checks, metrics, tables, t0) -> CriterionResult:
    return CriterionResult(number, TITLES[number], {k: bool(v) for k, v in checks.items()},
                           metrics, tables, time.perf_counter() - t0)


def _potential(cfg: dict, **defaults) -> RadialPotential:
    d = dict(defaults)
    d.update(cfg.get("potential", {}))
    return RadialPotential.from_config(d)


# 1 -------------------------------------------------------------------------------

def criterion_1(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    rows = []
    for v0 in cfg.get("v0", [1.0, 5.0]):
        v = RadialPotential(v0=float(v0), R0=1.0)
        for mu in cfg.get("mu", [1.0, 1e-2, 1e-4]):
            sol = solve_dirichlet(v, float(mu))
            exact = closed_form_a0(float(v0), 1.0, float(mu))
            rows.append([float(v0), float(mu), sol.a0, exact, abs(sol.a0 - exact)])
    err = max(r[-1] for r in rows)
    elapsed = time.perf_counter() - t0
    checks = {"a0_error_le_1e-8": err <= 1e-8, "runtime_lt_1s": elapsed < 1.0}
    tab = Table("closed_form", ["v0", "mu", "a0_solver", "a0_closed_form", "abs_error"], rows)
    return _result(1, checks, {"max_abs_error": err}, [tab], t0)


# 2 -------------------------------------------------------------------------------

def criterion_2(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    mus = np.logspace(math.log10(cfg.get("mu_max", 1e-2)), math.log10(cfg.get("mu_min", 1e-6)),
                      int(cfg.get("points", 9)))
    checks, metrics, tables, summary = {}, {}, [], []
    for n in cfg.get("orders", [0, 1, 2]):
        v = RadialPotential(kind="vanishing", v0=1.0, R0=1.0, n=float(n))
        fit = eta_rate_fit(v, float(n), mus)
        expected = 1.0 / (n + 2)
        ok = within_rel(fit.slope, expected, 0.15)
        checks[f"slope_n{n}"] = ok
        metrics[f"slope_n{n}"] = fit.slope
        summary.append([int(n), fit.slope, expected, abs(fit.slope - expected) / expected,
                        int(fit.used.sum())])
        tables.append(Table(f"eta_n{n}", ["mu", "eta", "used"],
                            [[m, e, bool(u)] for m, e, u in zip(fit.mu, fit.eta, fit.used)]))
    checks["points_ge_8"] = len(mus) >= 8
    checks["runtime_lt_30s"] = time.perf_counter() - t0 < 30.0
    tables.insert(0, Table("slopes", ["n", "fitted_slope", "expected_slope", "rel_deviation",
                                      "points_used"], summary))
    return _result(2, checks, metrics, tables, t0)


# 3 -------------------------------------------------------------------------------

def criterion_3(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    v = RadialPotential(v0=1.0, R0=1.0)
    mu = float(cfg.get("mu", 1.0))
    d0 = solve_dirichlet(v, mu)
    rows, ratios, fd_rel, comp = [], [], [], []
    for L in cfg.get("L", [10.0, 20.0, 40.0]):
        ngs = solve_neumann(v, mu, float(L), a0=d0.a0)
        ratio = ngs.E_gs * L ** 3 / (3 * mu * d0.a0)
        fd = neumann_fd_extrapolated(v, mu, float(L))
        rel = abs(fd - ngs.E_gs) / ngs.E_gs
        cc = neumann_comparison_constant(d0, ngs)
        ratios.append(ratio)
        fd_rel.append(rel)
        comp.append(cc)
        rows.append([float(L), ngs.E_gs, ratio, fd, rel, cc])
    checks = {"ratio_in_(0.8,1.0]": all(0.8 < r <= 1.0 for r in ratios),
              "ratio_increasing": bool(np.all(np.diff(ratios) > 0)),
              "fd_cross_check_1e-6": max(fd_rel) <= 1e-6,
              "runtime_lt_10s": time.perf_counter() - t0 < 10.0}
    metrics = {"ratios": ratios, "max_fd_rel_diff": max(fd_rel), "comparison_constants": comp}
    tab = Table("neumann", ["L", "E_gs", "ratio", "E_fd", "fd_rel_diff", "comparison_constant"], rows)
    return _result(3, checks, metrics, [tab], t0)


# 4 -------------------------------------------------------------------------------

def _suite_instances() -> List[Tuple[str, RadialPotential, float, Optional[float]]]:
    """Every Dirichlet instance solved elsewhere in the suite."""
    out = []
    for v0 in (1.0, 5.0):
        for mu in (1.0, 1e-2, 1e-4):
            out.append((f"constant_v0={v0:g}", RadialPotential(v0=v0), mu, None))
    for n in (0, 1, 2):
        v = RadialPotential(kind="vanishing", n=float(n))
        for mu in np.logspace(-2, -6, 9):
            out.append((f"vanishing_n={n}", v, float(mu), default_step(v, float(mu), 0.05)))
    for eps in (0.2, 0.1, 0.05, 0.025):
        out.append(("bgp_sweep", RadialPotential(), RegimeParams(N=100, eps=eps, kappa=0.5).mu, None))
    for N in (1e1, 1e2, 1e3, 1e4):
        out.append(("hd_sweep", RadialPotential(),
                    RegimeParams(N=N, eps=0.1, beta=1.5, kappa=0.0).mu, None))
    for mu in (1e-2, 1e-4):
        out.append(("energy_split", RadialPotential(), mu, None))
    return out


def criterion_4(cfg: Optional[dict] = None) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    for label, v, mu, step in _suite_instances():
        sol = solve_dirichlet(v, mu, step=step)
        da = abs(sol.a0 - scattering_length_by_integral(sol, v))
        db = abs(sol.b0 - b0_by_gradient(sol, v))
        rows.append([label, mu, sol.a0, da, sol.b0, db])
    ma = max(r[3] for r in rows)
    mb = max(r[5] for r in rows)
    checks = {"a0_geometric_vs_integral_1e-6": ma <= 1e-6, "b0_formulas_1e-6": mb <= 1e-6}
    tab = Table("identities", ["instance", "mu", "a0", "a0_abs_diff", "b0", "b0_abs_diff"], rows)
    return _result(4, checks, {"max_a0_diff": ma, "max_b0_diff": mb, "instances": len(rows)},
                   [tab], t0)


# 5 -------------------------------------------------------------------------------

def _gaussian_packet(x, t, eps, sigma, p):
    z = 1 + 1j * eps * t / (2 * sigma ** 2)
    return ((2 * math.pi * sigma ** 2) ** -0.25 / np.sqrt(z)
            * np.exp(-(x - p * t) ** 2 / (4 * sigma ** 2 * z) + 1j * p * (x - p * t / 2) / eps))


def _gp_configs(eps: float):
    """(name, field, kernel, exact(t) or None) for the conservation checks."""
    g = PeriodicGrid(1, 256, 2 * math.pi)
    x = g.x1
    # the packet gets a wider box so that its periodic images stay below round-off
    gw = PeriodicGrid(1, 512, 4 * math.pi)
    xw = gw.x1
    pw = WaveField(g, np.exp(3j * x) / math.sqrt(g.volume) + 0j, eps)
    pw_exact = lambda t: pw.values * np.exp(-1j * eps * t * 9 / 2)
    sigma, p = 0.3, 0.5
    gp = WaveField(gw, _gaussian_packet(xw, 0.0, eps, sigma, p), eps)
    gp_exact = lambda t: _gaussian_packet(xw, t, eps, sigma, p)
    gc = 1.0
    cs = WaveField(g, np.full(x.shape, 1 / math.sqrt(g.volume), dtype=complex), eps)
    cs_exact = lambda t: cs.values * np.exp(-1j * gc / g.volume * t / eps)
    c = 4 * math.pi * closed_form_a0(1.0, 1.0, 1.0)
    wk = FluidData().wave(g, eps)
    return [("plane_wave", pw, EffectiveKernel.zero(g), pw_exact),
            ("gaussian_packet", gp, EffectiveKernel.zero(gw), gp_exact),
            ("constant_delta", cs, EffectiveKernel.delta(g, gc), cs_exact),
            ("wkb_delta", wk, EffectiveKernel.delta(g, c), None)]


def criterion_5(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    eps = float(cfg.get("eps", 0.1))
    T = float(cfg.get("T", 1.0))
    floor = 1e-13
    rows, checks = [], {}
    per_unit = 32
    for name, f0, K, exact in _gp_configs(eps):
        # largest step within budget that is commensurate with the snapshot cadence,
        # so that dt / 2 is an exact halving of the effective step
        slot = T / round(T * per_unit)
        dt = slot / math.ceil(slot / dt_budget(f0, K) - 1e-9)
        drifts = []
        for h in (dt, dt / 2):
            tr = evolve(f0, K, h, T, snapshots_per_unit=per_unit)
            rep = tr.conservation_report()
            err = float(np.max(np.abs(tr.snapshots[-1] - exact(T)))) if exact else float("nan")
            drifts.append(rep["energy_drift_rel"])
            rows.append([name, tr.dt, rep["mass_drift"], rep["energy_drift_rel"], err])
            checks[f"{name}_mass_1e-10"] = checks.get(f"{name}_mass_1e-10", True) and \
                rep["mass_drift"] <= 1e-10
            checks[f"{name}_energy_1e-6"] = checks.get(f"{name}_energy_1e-6", True) and \
                rep["energy_drift_rel"] <= 1e-6
            if exact:
                tol = 1e-12 if name == "plane_wave" else 1e-10
                checks[f"{name}_exact"] = checks.get(f"{name}_exact", True) and err <= tol
        if drifts[0] > floor:
            ratio = drifts[0] / drifts[1]
            checks[f"{name}_halving_x4"] = 3.2 <= ratio <= 4.8
        elif name == "wkb_delta":
            checks[f"{name}_halving_x4"] = False
    checks["runtime_lt_60s"] = time.perf_counter() - t0 < 60.0
    tab = Table("conservation", ["config", "dt", "mass_drift", "energy_drift_rel", "max_error_vs_exact"],
                rows)
    wk = [r for r in rows if r[0] == "wkb_delta"]
    return _result(5, checks, {"wkb_drift_ratio": wk[0][3] / wk[1][3]}, [tab], t0)


# 6 -------------------------------------------------------------------------------

def criterion_6(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    eps = float(cfg.get("eps", 0.1))
    T = float(cfg.get("T", 0.1))
    width = float(cfg.get("kernel_width", 0.3))
    levels = [(0.004, 256), (0.002, 512), (0.001, 1024)]
    rows = []
    for dt, n in levels:
        g = PeriodicGrid(1, n, 2 * math.pi)
        x = g.x1
        f0 = WaveField.wkb(g, 1 + 0.3 * np.cos(x), 0.2 * np.sin(x), eps)
        ks = np.exp(-x ** 2 / (2 * width ** 2)) / math.sqrt(2 * math.pi * width ** 2)
        K = EffectiveKernel.from_samples(g, ks)
        tr = evolve(f0, K, dt, T, every_steps=1)
        m, p, lint = continuity_residual(tr, K)
        rows.append([dt, g.dx, m, p, lint])
    dts = [r[0] for r in rows]
    sm = fit_slope(dts, [r[2] for r in rows], "dt", 2.0, drop=None)
    sp = fit_slope(dts, [r[3] for r in rows], "dt", 2.0, drop=None)
    lmax = max(r[4] for r in rows)
    checks = {"mass_slope_2": within_rel(sm.fitted_slope, 2.0, 0.15),
              "momentum_slope_2": within_rel(sp.fitted_slope, 2.0, 0.15),
              "int_l_le_1e-10": lmax <= 1e-10}
    tab = Table("continuity", ["dt", "dx", "mass_residual", "momentum_residual", "max_abs_int_l"], rows)
    return _result(6, checks, {"mass_slope": sm.fitted_slope, "momentum_slope": sp.fitted_slope,
                               "max_int_l": lmax}, [tab], t0)


# 7 -------------------------------------------------------------------------------

def criterion_7(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    c = float(cfg.get("c", 3.0))
    g = PeriodicGrid(1, 64, 2 * math.pi)
    x = g.x1
    rb = 1 / g.volume
    lin = FluidState(g, rb * (1 + 1e-4 * np.cos(x)), [np.zeros_like(x)], c)
    tr = evolve_euler(lin, 0.01, 20.0, snapshots_per_unit=32)
    w = acoustic_frequency(tr)
    w_exact = math.sqrt(c * rb)
    st = FluidData(0.3, 0.1).fluid(g, c)
    T = float(cfg.get("T", 1.0))
    rep = evolve_euler(st, 0.01, T).report()
    Tr = 0.5
    dt = 0.01
    rev = time_reversal_error(st, dt, Tr)
    a = evolve_euler(st, dt, Tr, snapshots_per_unit=1 / Tr)
    b = evolve_euler(st, dt / 2, Tr, snapshots_per_unit=1 / Tr)
    trunc = 2 * state_distance(a.state(-1), b.state(-1))
    checks = {"acoustic_frequency_1pct": abs(w - w_exact) <= 0.01 * w_exact,
              "energy_drift_1e-6": rep["energy_drift_rel"] <= 1e-6,
              "time_reversal_10x_truncation": rev <= 10 * trunc}
    rows = [["acoustic_omega", w], ["acoustic_omega_exact", w_exact],
            ["energy_drift_rel", rep["energy_drift_rel"]], ["t_reached", rep["t_reached"]],
            ["time_reversal_error", rev], ["truncation_estimate", trunc]]
    return _result(7, checks, {"omega_rel_err": abs(w / w_exact - 1), "reversal_error": rev,
                               "truncation": trunc}, [Table("euler", ["quantity", "value"], rows)], t0)


# 8 -------------------------------------------------------------------------------

def criterion_8(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    epss = [float(e) for e in cfg.get("eps", [0.2, 0.1, 0.05, 0.025])]
    T = float(cfg.get("T", 0.5))
    n = int(cfg.get("n", 256))
    g = PeriodicGrid(1, n, 2 * math.pi)
    data = FluidData(0.3, 0.3)
    c = 4 * math.pi * solve_dirichlet(RadialPotential(), 1.0).a0
    et = evolve_euler(data.fluid(g, c), 0.002, T, snapshots_per_unit=16)
    rows, M0, err, Cs, traj_rows = [], [], [], [], []
    for eps in epss:
        K = EffectiveKernel.delta(g, c)
        tr = evolve(data.wave(g, eps), K, 0.02 * eps, T, snapshots_per_unit=16)
        rep = gronwall_check(tr, et, K, c)
        M0.append(rep.M_values[0])
        err.append(rep.density_L2_err[-1])
        Cs.append(rep.C_fit)
        rows.append([eps, rep.M_values[0], rep.density_L2_err[-1], rep.C_fit, rep.kappa_fit,
                     rep.momentum_chain_ok, rep.kinetic_chain_ok])
        for t, M, d in zip(rep.t_grid, rep.M_values, rep.density_L2_err):
            traj_rows.append([eps, t, M, d])
    sM = fit_slope(epss, M0, "eps", 2.0)
    sE = fit_slope(epss, err, "eps", 1.0)
    checks = {"M0_slope_2": abs(sM.fitted_slope - 2.0) <= 0.2,
              "density_error_slope_1": abs(sE.fitted_slope - 1.0) <= 0.2,
              "C_fit_stable_2x": stable_within(Cs, 2.0),
              "chain_inequalities": all(r[5] and r[6] for r in rows),
              "runtime_lt_5min": time.perf_counter() - t0 < 300.0}
    tabs = [Table("modulated_energy", ["eps", "M0", "density_L2_error_T", "C_fit", "kappa_fit",
                                       "momentum_chain_ok", "kinetic_chain_ok"], rows),
            Table("modulated_energy_history", ["eps", "t", "M", "density_L2_error"], traj_rows)]
    return _result(8, checks, {"M0_slope": sM.fitted_slope, "density_slope": sE.fitted_slope,
                               "C_fit": Cs}, tabs, t0)


# 9 -------------------------------------------------------------------------------

def criterion_9(cfg: Optional[dict] = None, runner=map) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    g = PeriodicGrid(1, int(cfg.get("n", 512)), 2 * math.pi)
    a_in = CosineAmplitude(0.5)
    ph = CosinePhase([float(cfg.get("phase_amplitude", 0.25))])
    T = float(cfg.get("T", 0.5))
    s = float(cfg.get("s", 2.0))
    v = _potential(cfg)
    epss = [float(e) for e in cfg.get("eps", [0.2, 0.1, 0.05, 0.025])]
    Ns = [float(N) for N in cfg.get("N_hd", [1e1, 1e2, 1e3, 1e4])]
    beta = float(cfg.get("beta_hd", 1.5))
    eps_hd = float(cfg.get("eps_hd", 0.1))
    sgp, sgp_runs = wkb_error_sweep([RegimeParams(N=100, eps=e, kappa=0.0) for e in epss], g, a_in,
                                    ph, T, v, s, expected=1.0, runner=runner)
    bgp, bgp_runs = wkb_error_sweep([RegimeParams(N=100, eps=e, kappa=0.5) for e in epss], g, a_in,
                                    ph, T, v, s, runner=runner)
    hd, hd_runs = wkb_error_sweep([RegimeParams(N=N, eps=eps_hd, beta=beta, kappa=0.0) for N in Ns],
                                  g, a_in, ph, T, v, s, sweep="N", expected=1 - beta, runner=runner)
    consts = [r.error / (r.eps + r.eta) for r in bgp_runs]
    checks = {"sgp_slope_1": abs(sgp.fitted_slope - 1.0) <= 0.2,
              "bgp_bound_constant_stable_2x": stable_within(consts, 2.0),
              "hd_slope_1_minus_beta": abs(hd.fitted_slope - (1 - beta)) <= 0.2,
              "runtime_lt_10min": time.perf_counter() - t0 < 600.0}
    rows = []
    for regime, rep, runs in (("SGP", sgp, sgp_runs), ("BGP", bgp, bgp_runs), ("HD", hd, hd_runs)):
        for r, used in zip(runs, rep.used):
            val = r.N if regime == "HD" else r.eps
            bound = r.eps + r.eta
            rows.append([regime, val, r.error, r.eta, r.error / bound, bool(used)])
    fits = [["SGP", "eps", sgp.fitted_slope, 1.0], ["BGP", "eps", bgp.fitted_slope, float("nan")],
            ["HD", "N", hd.fitted_slope, 1 - beta]]
    tabs = [Table("wkb_errors", ["regime", "sweep_value", "error", "eta", "error_over_eps_plus_eta",
                                 "used_in_fit"], rows),
            Table("wkb_slopes", ["regime", "sweep_variable", "fitted_slope", "expected_slope"], fits)]
    return _result(9, checks, {"sgp_slope": sgp.fitted_slope, "bgp_slope": bgp.fitted_slope,
                               "hd_slope": hd.fitted_slope,
                               "bgp_constant_spread": max(consts) / min(consts)}, tabs, t0)


# 10 ------------------------------------------------------------------------------

def _split_params(mu: float, eps: float = 0.5, alpha: float = 0.5) -> RegimeParams:
    """mu~ = 1 regime point with lam = 1/mu (GP for mu = 1, HC otherwise)."""
    if mu == 1.0:
        return RegimeParams(N=1e4, eps=eps)
    return RegimeParams.from_log((1.0 / mu) ** (1.0 / alpha), eps, alpha=alpha)


def criterion_10(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    v = RadialPotential()
    dens = GaussianDensity(1.0)
    rows = []
    for mu in cfg.get("mu", [1.0, 1e-2, 1e-4]):
        p = _split_params(float(mu))
        sol = solve_dirichlet(v, p.mu)
        d = energy_density_split(sol, v, p, dens)
        rows.append([p.mu, p.regime, d["interaction_share"], d["kinetic_share"], d["hard_core_total"],
                     d["kinetic_residual"], d["eta"], d["kinetic_residual"] / d["eta"],
                     d["interaction_L1_residual"]])
    inter = [r[2] for r in rows]
    resid = [r[5] for r in rows]
    consts = [r[7] for r in rows]
    checks = {"interaction_share_decreasing": bool(np.all(np.diff(inter) < 0)),
              "kinetic_share_approaching_hard_core": bool(np.all(np.diff(resid) < 0)),
              "residual_over_eta_stable_2x": stable_within(consts, 2.0)}
    tab = Table("energy_split", ["mu", "regime", "interaction_share", "kinetic_share",
                                 "hard_core_total", "kinetic_residual", "eta", "residual_over_eta",
                                 "interaction_L1_residual"], rows)
    return _result(10, checks, {"residual_over_eta": consts}, [tab], t0)


# 11 ------------------------------------------------------------------------------

def criterion_11(cfg: Optional[dict] = None) -> CriterionResult:
    cfg = cfg or {}
    t0 = time.perf_counter()
    v = RadialPotential()
    d0 = solve_dirichlet(v, 1.0)
    dens = GaussianDensity(float(cfg.get("sigma", 1.0)))
    N = float(cfg.get("N", 1e7))
    rows, consts = [], {"hs": [], "grad": [], "sup": []}
    for eps in cfg.get("eps", [0.4, 0.2, 0.1]):
        p = RegimeParams(N=N, eps=float(eps))
        ngs = solve_neumann(v, 1.0, p.L, a0=d0.a0)
        dg = PairKernel(ngs, dens, p).diagnostics()
        cs = dg.constants()
        for k in consts:
            consts[k].append(cs[k])
        rows.append([float(eps), p.L, dg.hs_norm, dg.hs_bound, cs["hs"], dg.grad_hs_norm,
                     dg.grad_bound, cs["grad"], dg.sup_slice_norm, dg.sup_bound, cs["sup"]])
    kin_rows = []
    for Nk in cfg.get("N_kinetic", [1e3, 2e3, 4e3, 8e3, 1.6e4]):
        p = RegimeParams(N=float(Nk), eps=float(cfg.get("eps_kinetic", 0.5)))
        ngs = solve_neumann(v, 1.0, p.L, a0=d0.a0)
        kin_rows.append([float(Nk), p.scale, kinetic_correction_check(ngs, dens, p, d0.b0)])
    sk = fit_slope([r[1] for r in kin_rows], [r[2] for r in kin_rows], "scale", -1.0,
                   drop="smallest")
    checks = {f"{k}_constant_stable_2x": stable_within(c, 2.0) for k, c in consts.items()}
    checks["kinetic_residual_slope_-1"] = within_rel(sk.fitted_slope, -1.0, 0.15)
    tabs = [Table("pair_norms", ["eps", "L", "hs_norm", "hs_bound", "hs_constant", "grad_hs_norm",
                                 "grad_bound", "grad_constant", "sup_slice_norm", "sup_bound",
                                 "sup_constant"], rows),
            Table("kinetic_residual", ["N", "scale", "L1_residual"], kin_rows)]
    return _result(11, checks, {"kinetic_slope": sk.fitted_slope, **{f"{k}_constants": c
                                                                    for k, c in consts.items()}},
                   tabs, t0)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11}


def run_criterion(args) -> CriterionResult:
    """Picklable entry point: args = (number, config table)."""
    number, cfg = args
    return CRITERIA[number](cfg)


def run_suite(numbers: Sequence[int] = tuple(CRITERIA), config: Optional[dict] = None,
              runner=map) -> List[CriterionResult]:
    config = config or {}
    jobs = [(k, config.get(f"criterion_{k}", {})) for k in numbers]
    return list(runner(run_criterion, jobs))
