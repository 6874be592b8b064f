"""Command-line front end: ``bec-lab <subcommand> --config <path> [--out <dir>] [--jobs <k>]``.

Exit codes: 0 success, 2 invalid config, 3 solver failure, 4 failing
acceptance criteria.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from . import __version__
from .errors import AcceptanceFailure, ConfigInvalid, SolverFailure
from .experiments import CosineAmplitude, FluidData, worker_pool
from .grid import PeriodicGrid
from .io import get, load_config, require, section, write_csv, write_field_csv, write_gnuplot, \
    write_json, write_manifest
from .regime import RegimeParams
from .scattering import RadialPotential

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_ACCEPTANCE = 0, 2, 3, 4


class RunContext:
    """Output directory, worker count and the derived/status record of one run."""

    def __init__(self, out: Path, jobs: int):
        self.out = out
        self.jobs = jobs
        self.derived: dict = {}
        self.timings: dict = {}
        self.extra: dict = {}

    def path(self, name: str) -> Path:
        return self.out / name


# config helpers ------------------------------------------------------------------

def _potential(cfg: dict, **defaults) -> RadialPotential:
    d = dict(defaults)
    d.update(section(cfg, "potential"))
    try:
        return RadialPotential.from_config(d)
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"invalid potential: {exc}") from None


def _grid(cfg: dict, n: int = 256) -> PeriodicGrid:
    g = section(cfg, "grid")
    try:
        return PeriodicGrid(int(g.get("dim", 1)), int(g.get("n", n)), float(g.get("box", 2 * math.pi)))
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"invalid grid: {exc}") from None


def _regime(cfg: dict) -> RegimeParams:
    r = section(cfg, "regime", required=True)
    return RegimeParams.from_config(r)


def _positive(cfg: dict, key: str, default=None) -> float:
    val = get(cfg, key, default) if default is not None else require(cfg, key)
    if not (val > 0):
        raise ConfigInvalid(f"{key} must be positive")
    return val


# subcommands -----------------------------------------------------------------------

def cmd_scatter(cfg: dict, ctx: RunContext):
    from .scattering import (b0_by_gradient, capacity, eta, scattering_length_by_integral,
                             solution_table, solve_dirichlet)

    v = _potential(cfg)
    mu = _positive(cfg, "mu")
    step = cfg.get("step")
    sol = solve_dirichlet(v, mu, step=None if step is None else float(step))
    write_csv(ctx.path("solution.csv"), ["r", "m", "f", "df"], solution_table(sol).tolist())
    rows = [["a0", sol.a0], ["b0", sol.b0], ["log_c1", sol.log_c1], ["step", sol.step],
            ["capacity", capacity(v)], ["eta", eta(sol, v)]]
    if not v.is_zero:
        rows += [["a0_integral", scattering_length_by_integral(sol, v)],
                 ["b0_gradient", b0_by_gradient(sol, v)]]
    write_csv(ctx.path("summary.csv"), ["quantity", "value"], rows)
    write_gnuplot(ctx.path("solution.gp"), "solution.csv", "scattering solution", "r", "f(r)",
                  [(1, 3, "f")])
    ctx.derived.update({k: v_ for k, v_ in rows})


def cmd_neumann(cfg: dict, ctx: RunContext):
    from .scattering import (neumann_comparison_constant, neumann_fd_extrapolated, solve_dirichlet,
                             solve_neumann)

    v = _potential(cfg)
    mu = _positive(cfg, "mu", 1.0)
    Ls = get(cfg, "L", [10.0, 20.0, 40.0], list)
    fd = bool(cfg.get("fd_check", True))
    d0 = solve_dirichlet(v, mu)
    rows = []
    for L in Ls:
        ngs = solve_neumann(v, mu, L, a0=d0.a0)
        ratio = ngs.E_gs * L ** 3 / (3 * mu * d0.a0) if d0.a0 > 0 else float("nan")
        e_fd = neumann_fd_extrapolated(v, mu, L) if fd else float("nan")
        rows.append([L, ngs.E_gs, ratio, e_fd, abs(e_fd - ngs.E_gs) / ngs.E_gs if fd else float("nan"),
                     neumann_comparison_constant(d0, ngs)])
    write_csv(ctx.path("neumann.csv"), ["L", "E_gs", "ratio", "E_fd", "fd_rel_diff",
                                         "comparison_constant"], rows)
    write_gnuplot(ctx.path("neumann.gp"), "neumann.csv", "E_gs L^3 / (3 mu a0)", "L", "ratio",
                  [(1, 3, "ratio")], logx=True)
    ctx.derived.update({"a0": d0.a0, "ratios": [r[2] for r in rows]})


def cmd_rate(cfg: dict, ctx: RunContext):
    from .scattering import eta_rate_fit

    n = get(cfg, "n", 0.0)
    base = _potential(cfg)
    try:
        v = RadialPotential(kind="vanishing", v0=base.v0, R0=base.R0, n=n)
    except ValueError as exc:
        raise ConfigInvalid(f"invalid potential: {exc}") from None
    mus = np.logspace(math.log10(_positive(cfg, "mu_max", 1e-2)), math.log10(_positive(cfg, "mu_min", 1e-6)),
                      int(get(cfg, "points", 9, int)))
    fit = eta_rate_fit(v, n, mus, step_factor=get(cfg, "step_factor", 0.05),
                       window=get(cfg, "window", 0.3))
    write_csv(ctx.path("rate.csv"), ["mu", "eta", "used"],
              [[m, e, bool(u)] for m, e, u in zip(fit.mu, fit.eta, fit.used)])
    write_gnuplot(ctx.path("rate.gp"), "rate.csv", "eta(mu)", "mu", "eta", [(1, 2, "eta")],
                  logx=True, logy=True)
    ctx.derived.update({"fitted_slope": fit.slope, "expected_slope": 1.0 / (n + 2),
                        "fit_residual": fit.residual, "points_used": int(fit.used.sum())})


def _build_kernel(cfg: dict, grid: PeriodicGrid, eps_default: float):
    from .gp import EffectiveKernel, build_effective_kernel
    from .scattering import solve_dirichlet, solve_neumann

    kc = section(cfg, "kernel")
    mode = kc.get("mode", "delta")
    if "regime" in cfg:
        params = _regime(cfg)
        v = _potential(cfg)
        dirichlet = solve_dirichlet(v, params.mu)
        if params.regime == "HD" or params.L < 2 * v.R0:
            sc = dirichlet
        else:
            sc = solve_neumann(v, params.mu, params.L, a0=dirichlet.a0)
        if mode not in ("delta", "scaled"):
            raise ConfigInvalid(f"kernel mode must be 'delta' or 'scaled', got {mode!r}")
        try:
            return build_effective_kernel(params, v, sc, grid, mode), params.eps, params
        except ValueError as exc:
            if isinstance(exc, SolverFailure):
                raise
            raise ConfigInvalid(str(exc)) from None
    if mode != "delta":
        raise ConfigInvalid("without a [regime] table only kernel mode 'delta' is available")
    return EffectiveKernel.delta(grid, get(kc, "g", 0.0)), get(cfg, "eps", eps_default), None


def _observable_export(ctx: RunContext, grid: PeriodicGrid, tr, kernel, stride: int):
    from .gp import observables

    obs = [observables(tr.field(i), kernel) for i in range(len(tr.times))]
    sl = tuple(slice(None, None, stride) for _ in range(grid.dim))
    coords = [c[sl] for c in grid.coords]
    fields = {"rho": [o.rho for o in obs], "e_kin": [o.e_kin for o in obs],
              "e_int": [o.e_int for o in obs], "P": [o.P for o in obs]}
    for j in range(grid.dim):
        fields[f"J{j + 1}"] = [o.J[j] for o in obs]
    for name, vals in fields.items():
        write_field_csv(ctx.path(f"{name}.csv"), tr.times, coords, [[v[sl] for v in vals]])


def cmd_gp_run(cfg: dict, ctx: RunContext):
    from .gp import dt_budget, evolve

    grid = _grid(cfg)
    kernel, eps, params = _build_kernel(cfg, grid, 0.1)
    init = section(cfg, "initial")
    data = FluidData(get(init, "rho_amp", 0.3), get(init, "u_amp", 0.3))
    seed = init.get("seed")
    field0 = data.wave(grid, eps, noise=get(init, "noise", 0.0), seed=seed)
    T = _positive(cfg, "T", 1.0)
    dt = float(cfg["dt"]) if "dt" in cfg else dt_budget(field0, kernel)
    spu = get(cfg, "snapshots_per_unit", 32.0)
    tr = evolve(field0, kernel, dt, T, snapshots_per_unit=spu)
    write_csv(ctx.path("history.csv"), ["t", "mass", "energy"],
              [[t, m, e] for t, m, e in zip(tr.times, tr.mass, tr.energy)])
    _observable_export(ctx, grid, tr, kernel, int(get(cfg, "export_stride", 1, int)))
    rep = tr.conservation_report()
    write_json(ctx.path("gp_run.json"), {"params": params.to_dict() if params else {"eps": eps},
                                         "grid": grid.to_dict(), "dt": tr.dt,
                                         "kernel_mode": kernel.mode, "conservation_report": rep})
    write_gnuplot(ctx.path("history.gp"), "history.csv", "GP energy", "t", "energy", [(1, 3, "E")])
    ctx.derived.update({"dt": tr.dt, "steps": tr.steps, **rep})
    ctx.extra["rng"] = {"bit_generator": "Philox", "seed": 0 if seed is None else int(seed)}


def cmd_euler_run(cfg: dict, ctx: RunContext):
    from .euler import evolve_euler

    grid = _grid(cfg, n=128)
    init = section(cfg, "initial")
    data = FluidData(get(init, "rho_amp", 0.3), get(init, "u_amp", 0.3))
    c = _positive(cfg, "c", 3.0)
    tr = evolve_euler(data.fluid(grid, c), _positive(cfg, "dt", 0.01), _positive(cfg, "T", 1.0),
                      snapshots_per_unit=get(cfg, "snapshots_per_unit", 32.0))
    write_csv(ctx.path("history.csv"), ["t", "mass", "energy", "cfl"],
              [[t, m, e, cf] for t, m, e, cf in zip(tr.times, tr.mass, tr.energy, [0.0] + tr.cfl)])
    write_field_csv(ctx.path("rho.csv"), tr.times, grid.coords, [tr.rho])
    for j in range(grid.dim):
        write_field_csv(ctx.path(f"u{j + 1}.csv"), tr.times, grid.coords, [[u[j] for u in tr.u]])
    rep = tr.report()
    write_json(ctx.path("euler_run.json"), {"grid": grid.to_dict(), "c": c, "dt": tr.dt,
                                            "report": rep, "blowup": repr(tr.status)
                                            if tr.blew_up else None})
    write_gnuplot(ctx.path("history.gp"), "history.csv", "Euler energy", "t", "energy", [(1, 3, "E")])
    ctx.derived.update(rep)


def cmd_eikonal_run(cfg: dict, ctx: RunContext):
    from .eikonal import caustic_time, phase_from_config, solve_eikonal

    grid = _grid(cfg)
    try:
        phase = phase_from_config(section(cfg, "phase"))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigInvalid(f"invalid phase: {exc}") from None
    amp = section(cfg, "amplitude")
    a_in = CosineAmplitude(get(amp, "amp", 0.5), int(get(amp, "k", 1, int)), grid.box, grid.dim)
    c0 = get(cfg, "c0", 0.0)
    times = get(cfg, "times", [0.25, 0.5], list)
    tc = caustic_time(phase, grid)
    rows = []
    x = grid.coords
    for t in times:
        st = solve_eikonal(a_in, phase, grid, c0, t)
        for j in range(x[0].size):
            rows.append([t] + [float(c.ravel()[j]) for c in x]
                        + [float(st.phi_eik.ravel()[j]), float(st.a.real.ravel()[j]),
                           float(st.a.imag.ravel()[j])])
    write_csv(ctx.path("eikonal.csv"), ["t"] + [f"x{i + 1}" for i in range(grid.dim)]
              + ["phi", "re_a", "im_a"], rows)
    write_json(ctx.path("eikonal_run.json"), {"caustic_time": tc, "times": times, "c0": c0})
    ctx.derived.update({"caustic_time": tc})


def cmd_modenergy(cfg: dict, ctx: RunContext):
    from .acceptance import criterion_8

    res = criterion_8(cfg)
    _write_tables(ctx, res, prefix="")
    write_gnuplot(ctx.path("modulated_energy.gp"), "modulated_energy.csv", "modulated energy sweep",
                  "eps", "value", [(1, 2, "M(0)"), (1, 3, "density L2 error")], logx=True, logy=True)
    ctx.derived.update({"checks": res.checks, **res.metrics})


def cmd_wkb_sweep(cfg: dict, ctx: RunContext):
    from .diagnostics import wkb_error_sweep
    from .eikonal import phase_from_config

    grid = _grid(cfg, n=512)
    sweep = cfg.get("sweep", "eps")
    if sweep not in ("eps", "N"):
        raise ConfigInvalid("sweep must be 'eps' or 'N'")
    values = get(cfg, "values", [0.2, 0.1, 0.05, 0.025], list)
    base = section(cfg, "regime", required=True)
    plist = []
    for val in values:
        r = dict(base)
        r[sweep] = val
        plist.append(RegimeParams.from_config(r))
    try:
        phase = phase_from_config(section(cfg, "phase"))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigInvalid(f"invalid phase: {exc}") from None
    amp = section(cfg, "amplitude")
    a_in = CosineAmplitude(get(amp, "amp", 0.5), int(get(amp, "k", 1, int)), grid.box, grid.dim)
    v = _potential(cfg)
    expected = cfg.get("expected_slope")
    with worker_pool(ctx.jobs) as runner:
        try:
            rep, runs = wkb_error_sweep(plist, grid, a_in, phase, _positive(cfg, "T", 0.5), v,
                                        get(cfg, "s", 2.0), sweep=sweep,
                                        expected=None if expected is None else float(expected),
                                        runner=runner)
        except ValueError as exc:
            if isinstance(exc, SolverFailure):
                raise
            raise ConfigInvalid(str(exc)) from None
    lx = np.log(rep.values)
    icpt = np.mean(np.log(np.asarray(rep.errors)[rep.used]) - rep.fitted_slope * lx[rep.used])
    resid = np.log(rep.errors) - (icpt + rep.fitted_slope * lx)
    write_csv(ctx.path("wkb_sweep.csv"), ["sweep_value", "error", "fit_residual", "eta", "used"],
              [[x, e, r, run.eta, bool(u)] for x, e, r, run, u in
               zip(rep.values, rep.errors, resid, runs, rep.used)])
    write_json(ctx.path("wkb_sweep.json"), rep.to_dict())
    write_gnuplot(ctx.path("wkb_sweep.gp"), "wkb_sweep.csv", "WKB amplitude error", sweep, "error",
                  [(1, 2, "error")], logx=True, logy=True)
    ctx.derived.update({"regime": plist[0].regime, "fitted_slope": rep.fitted_slope,
                        "expected_slope": rep.expected_slope, "fit_residual": rep.residual})


def cmd_pair_check(cfg: dict, ctx: RunContext):
    from .acceptance import criterion_11

    res = criterion_11(cfg)
    _write_tables(ctx, res, prefix="")
    write_gnuplot(ctx.path("kinetic_residual.gp"), "kinetic_residual.csv", "kinetic correction residual",
                  "N^beta eps^(2 kappa)", "L1 residual", [(2, 3, "residual")], logx=True, logy=True)
    ctx.derived.update({"checks": res.checks, **res.metrics})


_PLOTS = {
    "c02_eta_n0.csv": ("eta(mu), n = 0", "mu", "eta", [(1, 2, "eta")]),
    "c08_modulated_energy.csv": ("modulated energy sweep", "eps", "value",
                                 [(1, 2, "M(0)"), (1, 3, "density L2 error")]),
    "c11_kinetic_residual.csv": ("kinetic correction residual", "scale", "residual", [(2, 3, "L1")]),
}


def _write_tables(ctx: RunContext, res, prefix: str):
    for tab in res.tables:
        write_csv(ctx.path(f"{prefix}{tab.name}.csv"), tab.header, tab.rows)


def cmd_acceptance(cfg: dict, ctx: RunContext):
    from .acceptance import CRITERIA, run_suite

    numbers = [int(k) for k in cfg.get("criteria", list(CRITERIA))]
    bad = [k for k in numbers if k not in CRITERIA]
    if bad:
        raise ConfigInvalid(f"unknown criteria {bad}")
    with worker_pool(ctx.jobs) as runner:
        results = run_suite(numbers, cfg, runner)
    summary = []
    for res in results:
        _write_tables(ctx, res, prefix=f"c{res.number:02d}_")
        failed = [k for k, ok in res.checks.items() if not ok]
        summary.append([res.number, res.title, "pass" if res.passed else "fail", ";".join(failed)])
        ctx.timings[f"criterion_{res.number}"] = res.runtime
        ctx.derived[f"criterion_{res.number}"] = {"passed": res.passed, "checks": res.checks,
                                                  "metrics": res.metrics}
        print(res.line())
    write_csv(ctx.path("summary.csv"), ["criterion", "title", "status", "failed_checks"], summary)
    for name, (title, xl, yl, cols) in _PLOTS.items():
        if ctx.path(name).exists():
            write_gnuplot(ctx.path(name.replace(".csv", ".gp")), name, title, xl, yl, cols,
                          logx=True, logy=True)
    failing = [r.number for r in results if not r.passed]
    if failing:
        raise AcceptanceFailure(failing)


COMMANDS: Dict[str, Callable] = {
    "scatter": cmd_scatter, "neumann": cmd_neumann, "rate": cmd_rate, "gp-run": cmd_gp_run,
    "euler-run": cmd_euler_run, "eikonal-run": cmd_eikonal_run, "modenergy": cmd_modenergy,
    "wkb-sweep": cmd_wkb_sweep, "pair-check": cmd_pair_check, "acceptance": cmd_acceptance,
}


def default_config(subcommand: str) -> Path:
    return Path(str(resources.files("beclab") / "configs" / f"{subcommand}.toml"))


def _jobs(arg: Optional[int]) -> int:
    if arg is not None:
        jobs = arg
    else:
        env = os.environ.get("BECLAB_JOBS", "1")
        try:
            jobs = int(env)
        except ValueError:
            raise ConfigInvalid(f"BECLAB_JOBS must be an integer, got {env!r}") from None
    if jobs < 1:
        raise ConfigInvalid("--jobs must be >= 1")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bec-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, default=None,
                   help="TOML, JSON or INI config (default: the shipped config for the subcommand)")
    p.add_argument("--out", type=Path, default=None, help="output directory (default results/<subcommand>)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $BECLAB_JOBS or 1)")
    return p


def run(subcommand: str, config: Optional[Path] = None, out: Optional[Path] = None,
        jobs: Optional[int] = None) -> int:
    out = Path(out) if out is not None else Path("results") / subcommand
    cfg_path = config if config is not None else default_config(subcommand)
    ctx = RunContext(out, 1)
    status: dict = {"exit_code": EXIT_OK, "state": "ok"}
    cfg: dict = {}
    t0 = time.perf_counter()
    try:
        ctx.jobs = _jobs(jobs)
        cfg = load_config(cfg_path)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[subcommand](cfg, ctx)
    except ConfigInvalid as exc:
        status = {"exit_code": EXIT_CONFIG, "state": "config_invalid", "error": str(exc)}
    except AcceptanceFailure as exc:
        status = {"exit_code": EXIT_ACCEPTANCE, "state": "acceptance_failure",
                  "failing_criteria": exc.failing, "error": str(exc)}
    except SolverFailure as exc:
        status = {"exit_code": EXIT_SOLVER, "state": "solver_failure",
                  "error_type": type(exc).__name__, "error": str(exc)}
    ctx.timings["total"] = time.perf_counter() - t0
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, __version__, subcommand, {"path": str(cfg_path), "config": cfg},
                   ctx.derived, ctx.timings, status, ctx.extra or None)
    if status["exit_code"] != EXIT_OK:
        print(f"bec-lab {subcommand}: {status['state']}: {status.get('error', '')}", file=sys.stderr)
    return status["exit_code"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.jobs)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
