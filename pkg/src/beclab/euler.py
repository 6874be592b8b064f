"""Pseudo-spectral compressible Euler system in velocity form.

    d_t rho + div(rho u) = 0,     d_t u + (u . grad) u + c grad rho = 0,

i.e. the pressure law P = c rho^2 / 2.  Products are dealiased with the
2/3 rule, time stepping is classical RK4.  No artificial viscosity: the
solver is meant for smooth solutions only and stops with a blow-up proxy
once the velocity gradient has grown by a fixed factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import CFLViolation, SolverFailure
from .grid import PeriodicGrid

BLOWUP_FACTOR = 50.0


@dataclass
class FluidState:
    grid: PeriodicGrid
    rho: np.ndarray
    u: List[np.ndarray]
    c: float
    time: float = 0.0

    def copy(self) -> "FluidState":
        return FluidState(self.grid, self.rho.copy(), [x.copy() for x in self.u], self.c, self.time)

    def mass(self) -> float:
        return self.grid.integrate(self.rho)

    def momentum(self) -> np.ndarray:
        return np.array([self.grid.integrate(self.rho * x) for x in self.u])

    def energy(self) -> float:
        ke = 0.5 * self.rho * sum(x * x for x in self.u)
        return self.grid.integrate(ke + 0.5 * self.c * self.rho ** 2)

    def reversed(self) -> "FluidState":
        return FluidState(self.grid, self.rho.copy(), [-x for x in self.u], self.c, self.time)

    def grad_u_max(self) -> float:
        g = self.grid
        return float(max(np.max(np.abs(g.deriv(x, k))) for x in self.u for k in range(g.dim)))


class BlowUpProxy:
    """Terminal status: velocity gradient exceeded the blow-up threshold."""

    def __init__(self, time: float, grad_u: float, threshold: float):
        self.time = time
        self.grad_u = grad_u
        self.threshold = threshold

    def __repr__(self):
        return f"BlowUpProxy(time={self.time:.6g})"


def _dealiased(grid: PeriodicGrid, f):
    return np.fft.fftn(f) * grid.dealias_mask


def euler_rhs(state: FluidState, forcing=None):
    """(drho, du) = (-div(rho u), -(u.grad)u - c grad rho)."""
    g = state.grid
    rho, u = state.rho, state.u
    drho = np.zeros_like(rho)
    for j in range(g.dim):
        drho -= np.fft.ifftn(1j * g.wavevectors[j] * _dealiased(g, rho * u[j])).real
    grads = [g.grad(x) for x in u]
    grho = g.grad(rho)
    du = []
    for j in range(g.dim):
        adv = sum(u[k] * grads[j][k] for k in range(g.dim))
        adv = np.fft.ifftn(_dealiased(g, adv)).real
        du.append(-adv - state.c * grho[j])
    if forcing is not None:
        fr, fu = forcing(state.time)
        drho = drho + fr
        du = [a + b for a, b in zip(du, fu)]
    return drho, du


def cfl_number(state: FluidState, dt: float) -> float:
    umax = max(float(np.max(np.abs(x))) for x in state.u)
    cs = math.sqrt(2 * state.c * max(float(np.max(state.rho)), 0.0))
    return dt * (umax + cs) * state.grid.kmax


def _axpy(state, a, d):
    drho, du = d
    return FluidState(state.grid, state.rho + a * drho, [x + a * y for x, y in zip(state.u, du)],
                      state.c, state.time + a)


def rk4_step(state: FluidState, dt: float, forcing=None) -> FluidState:
    k1 = euler_rhs(state, forcing)
    s2 = _axpy(state, 0.5 * dt, k1)
    k2 = euler_rhs(s2, forcing)
    s3 = _axpy(state, 0.5 * dt, k2)
    k3 = euler_rhs(s3, forcing)
    s4 = _axpy(state, dt, k3)
    k4 = euler_rhs(s4, forcing)
    rho = state.rho + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    u = [x + dt / 6 * (a + 2 * b + 2 * c + d)
         for x, a, b, c, d in zip(state.u, k1[1], k2[1], k3[1], k4[1])]
    return FluidState(state.grid, rho, u, state.c, state.time + dt)


@dataclass
class EulerTrajectory:
    grid: PeriodicGrid
    c: float
    dt: float
    times: np.ndarray
    rho: List[np.ndarray]
    u: List[List[np.ndarray]]
    mass: np.ndarray
    energy: np.ndarray
    momentum: np.ndarray
    cfl: List[float] = field(default_factory=list)
    status: object = "ok"

    @property
    def blew_up(self) -> bool:
        return isinstance(self.status, BlowUpProxy)

    def state(self, i: int) -> FluidState:
        return FluidState(self.grid, self.rho[i], self.u[i], self.c, float(self.times[i]))

    def report(self) -> dict:
        e0 = self.energy[0]
        p0 = self.momentum[0]
        pscale = max(float(np.max(np.abs(p0))), math.sqrt(2 * abs(e0)), 1e-300)
        return {"mass_drift": float(np.max(np.abs(self.mass - self.mass[0]))),
                "energy_drift_rel": float(np.max(np.abs(self.energy - e0)) / max(abs(e0), 1e-300)),
                "momentum_drift_rel": float(np.max(np.abs(self.momentum - p0)) / pscale),
                "status": "ok" if not self.blew_up else "blowup",
                "t_reached": float(self.times[-1])}


def evolve_euler(state: FluidState, dt: float, T: float, snapshots_per_unit: float = 32,
                 forcing=None) -> EulerTrajectory:
    """RK4 evolution with CFL guard and blow-up proxy.

    The step is shrunk so that snapshots fall on step boundaries.  The blow-up
    reference gradient is max(||grad u0||_inf, sqrt(c max rho0) * 2 pi / box),
    so that initially quiescent flows are measured against the acoustic scale.
    """
    n_snap = max(1, int(round(T * snapshots_per_unit)))
    per = max(1, int(math.ceil(T / n_snap / dt - 1e-9)))
    h = T / (n_snap * per)
    cur = state.copy()
    ref = max(cur.grad_u_max(), math.sqrt(max(state.c * float(np.max(state.rho)), 0.0))
              * 2 * math.pi / state.grid.box, 1e-12)
    threshold = BLOWUP_FACTOR * ref
    times, rhos, us = [cur.time], [cur.rho.copy()], [[x.copy() for x in cur.u]]
    mass, en, mom, cfl = [cur.mass()], [cur.energy()], [cur.momentum()], []
    status: object = "ok"
    for i in range(1, n_snap * per + 1):
        c = cfl_number(cur, h)
        if c > 1.0:
            raise CFLViolation(f"CFL number {c:.3g} > 1 at t = {cur.time:.4g}")
        cur = rk4_step(cur, h, forcing)
        if not np.all(np.isfinite(cur.rho)):
            raise SolverFailure("non-finite Euler state")
        if np.min(cur.rho) < -1e-10:
            raise SolverFailure(f"negative density {np.min(cur.rho):.3g}")
        gu = cur.grad_u_max()
        stop = gu > threshold
        if i % per == 0 or stop:
            cfl.append(c)
            times.append(cur.time)
            rhos.append(cur.rho.copy())
            us.append([x.copy() for x in cur.u])
            mass.append(cur.mass())
            en.append(cur.energy())
            mom.append(cur.momentum())
        if stop:
            status = BlowUpProxy(cur.time, gu, threshold)
            break
    return EulerTrajectory(state.grid, state.c, h, np.array(times), rhos, us, np.array(mass),
                           np.array(en), np.array(mom), cfl, status)


def acoustic_frequency(traj: EulerTrajectory, k: int = 1) -> float:
    """Angular frequency of the k-th density mode of a 1D standing wave.

    Fits the projection a(t) = <rho - rho_bar, cos(kx)> to A cos(w t) using
    the zero crossings of a(t) (linear interpolation between snapshots
    refined by a local cubic).
    """
    g = traj.grid
    x = g.coords[0]
    a = np.array([g.integrate((r - r.mean()) * np.cos(k * 2 * np.pi / g.box * x)) for r in traj.rho])
    t = traj.times
    roots = []
    for i in range(len(a) - 1):
        if a[i] == 0 or a[i] * a[i + 1] < 0:
            lo, hi = max(0, i - 1), min(len(a), i + 3)
            p = np.polyfit(t[lo:hi] - t[i], a[lo:hi], min(3, hi - lo - 1))
            rr = [z.real + t[i] for z in np.roots(p) if abs(z.imag) < 1e-12
                  and -1e-12 <= z.real <= t[i + 1] - t[i] + 1e-12]
            roots.append(rr[0] if rr else t[i] - a[i] * (t[i + 1] - t[i]) / (a[i + 1] - a[i]))
    if not roots:
        raise SolverFailure("no zero crossing of the acoustic mode")
    roots = np.array(roots)
    # cos(w t) vanishes at t_j = (j + 1/2) pi / w
    j = np.arange(len(roots))
    w = np.polyfit(j + 0.5, roots, 1)[0]
    return float(math.pi / w)


def time_reversal_error(state: FluidState, dt: float, T: float) -> float:
    """Evolve to T, flip u, evolve T again; L2 distance to the flipped initial data."""
    fwd = evolve_euler(state, dt, T, snapshots_per_unit=1.0 / T)
    mid = fwd.state(len(fwd.times) - 1).reversed()
    back = evolve_euler(mid, dt, T, snapshots_per_unit=1.0 / T)
    end = back.state(len(back.times) - 1)
    g = state.grid
    err = g.integrate((end.rho - state.rho) ** 2)
    err += sum(g.integrate((a + b) ** 2) for a, b in zip(end.u, state.u))
    return math.sqrt(err)


def state_distance(a: FluidState, b: FluidState) -> float:
    g = a.grid
    d = g.integrate((a.rho - b.rho) ** 2) + sum(g.integrate((x - y) ** 2) for x, y in zip(a.u, b.u))
    return math.sqrt(d)
