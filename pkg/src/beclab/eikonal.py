"""Eikonal system solved by characteristics.

    d_t phi + |grad phi|^2 / 2 = 0,
    d_t a + grad phi . grad a + a Lap(phi) / 2 = -i c0 |a|^2 a.

Characteristics are straight lines X(t, y) = y + t grad phi_in(y).  Along
them |a|^2 J = |a_in|^2 with J = det(I + t D^2 phi_in), and the cubic term
only rotates the phase by theta = -c0 |a_in(y)|^2 int_0^t ds / J(s, y).
Initial phases are analytic objects exposing value, gradient and Hessian at
arbitrary points, so no differentiation of grid data is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import NewtonDivergence, PastCaustic
from .grid import PeriodicGrid

NEWTON_TOL = 1e-12
NEWTON_MAXIT = 50


# initial phases -------------------------------------------------------------

class Phase:
    """Analytic phase; points have shape (dim, ...)."""

    dim: int = 1

    def value(self, y):
        raise NotImplementedError

    def grad(self, y):
        raise NotImplementedError

    def hess(self, y):
        """Array of shape (dim, dim, ...)."""
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass
class LinearPhase(Phase):
    """xi . x; handled analytically (not periodic)."""

    xi: Sequence[float]

    @property
    def dim(self):
        return len(self.xi)

    def value(self, y):
        return sum(k * y[j] for j, k in enumerate(self.xi))

    def grad(self, y):
        return np.stack([np.full(y.shape[1:], float(k)) for k in self.xi])

    def hess(self, y):
        d = self.dim
        return np.zeros((d, d) + y.shape[1:])

    def to_config(self):
        return {"kind": "linear", "xi": list(self.xi)}


@dataclass
class QuadraticPhase(Phase):
    """sign |x|^2 / 2, e.g. sign = -1 gives a focusing lens with caustic at t = 1."""

    sign: float = 1.0
    dim_: int = 1

    @property
    def dim(self):
        return self.dim_

    def value(self, y):
        return 0.5 * self.sign * np.sum(y * y, axis=0)

    def grad(self, y):
        return self.sign * y

    def hess(self, y):
        d = self.dim
        eye = np.eye(d).reshape((d, d) + (1,) * (y.ndim - 1))
        return self.sign * np.broadcast_to(eye, (d, d) + y.shape[1:]).copy()

    def to_config(self):
        return {"kind": "quadratic", "sign": self.sign, "dim": self.dim}


@dataclass
class CosinePhase(Phase):
    """sum_j A_j cos(k_j x_j): periodic phase with caustic at 1/max(A_j k_j^2)."""

    amplitude: Sequence[float]
    wavenumber: Optional[Sequence[float]] = None

    @property
    def dim(self):
        return len(self.amplitude)

    def _k(self):
        return [1.0] * self.dim if self.wavenumber is None else list(self.wavenumber)

    def value(self, y):
        return sum(A * np.cos(k * y[j]) for j, (A, k) in enumerate(zip(self.amplitude, self._k())))

    def grad(self, y):
        return np.stack([-A * k * np.sin(k * y[j])
                         for j, (A, k) in enumerate(zip(self.amplitude, self._k()))])

    def hess(self, y):
        d = self.dim
        H = np.zeros((d, d) + y.shape[1:])
        for j, (A, k) in enumerate(zip(self.amplitude, self._k())):
            H[j, j] = -A * k * k * np.cos(k * y[j])
        return H

    def to_config(self):
        return {"kind": "cosine", "amplitude": list(self.amplitude), "wavenumber": self._k()}


def phase_from_config(cfg: dict) -> Phase:
    kind = cfg.get("kind", "cosine")
    if kind == "linear":
        return LinearPhase(list(cfg["xi"]))
    if kind == "quadratic":
        return QuadraticPhase(float(cfg.get("sign", 1.0)), int(cfg.get("dim", 1)))
    if kind == "cosine":
        amp = cfg.get("amplitude", [0.5])
        amp = [amp] if np.isscalar(amp) else list(amp)
        k = cfg.get("wavenumber")
        if k is not None and np.isscalar(k):
            k = [k] * len(amp)
        return CosinePhase(amp, k)
    raise ValueError(f"unknown phase kind {kind!r}")


# caustics and flow inversion ------------------------------------------------

def _points(grid: PeriodicGrid):
    return np.stack(grid.coords)


def _det(t, H):
    d = H.shape[0]
    M = np.moveaxis(np.eye(d).reshape((d, d) + (1,) * (H.ndim - 2)) + t * H, (0, 1), (-2, -1))
    return np.linalg.det(M)


def caustic_time(phi_in: Phase, grid: PeriodicGrid, t_max: float = 1e6) -> float:
    """Smallest t > 0 with min_grid det(I + t D^2 phi_in) <= 0 (inf if beyond t_max).

    det(I + tH) = prod(1 + t lambda_i), so the first root at a node is
    -1/lambda_min whenever lambda_min < 0.
    """
    H = phi_in.hess(_points(grid))
    d = H.shape[0]
    M = np.moveaxis(H, (0, 1), (-2, -1)).reshape(-1, d, d)
    lam_min = np.min(np.linalg.eigvalsh(M), axis=-1)
    neg = lam_min[lam_min < 0]
    if neg.size == 0:
        return math.inf
    t = float(np.min(-1.0 / neg))
    return t if t <= t_max else math.inf


def invert_flow(phi_in: Phase, x, t: float):
    """Solve y + t grad phi_in(y) = x by damped Newton; x has shape (dim, ...)."""
    y = x - t * phi_in.grad(x)
    d = x.shape[0]
    shape = x.shape[1:]

    def resid(yy):
        return yy + t * phi_in.grad(yy) - x

    r = resid(y)
    for it in range(NEWTON_MAXIT):
        rn = np.sqrt(np.sum(r * r, axis=0))
        if np.max(rn) <= NEWTON_TOL:
            return y
        H = phi_in.hess(y)
        A = np.moveaxis(np.eye(d).reshape((d, d) + (1,) * len(shape)) + t * H, (0, 1), (-2, -1))
        step = np.linalg.solve(A, np.moveaxis(r, 0, -1)[..., None])[..., 0]
        step = np.moveaxis(step, -1, 0)
        damp = np.ones(shape)
        y_new = y - step
        r_new = resid(y_new)
        for _ in range(30):
            bad = np.sqrt(np.sum(r_new * r_new, axis=0)) > np.maximum(rn, NEWTON_TOL)
            if not np.any(bad):
                break
            damp = np.where(bad, 0.5 * damp, damp)
            y_new = y - damp * step
            r_new = resid(y_new)
        y, r = y_new, r_new
    rn = np.sqrt(np.sum(r * r, axis=0))
    if np.max(rn) > NEWTON_TOL:
        idx = np.unravel_index(int(np.argmax(rn)), shape)
        raise NewtonDivergence(f"flow inversion residual {np.max(rn):.3g} at node {idx}",
                               location=tuple(int(i) for i in idx))
    return y


def _check_time(phi_in, grid, t):
    tc = caustic_time(phi_in, grid)
    if not t < tc:
        raise PastCaustic(f"t = {t:g} is not before the caustic time {tc:g}")
    return tc


def solve_phase(phi_in: Phase, grid: PeriodicGrid, t: float, x=None):
    """(phi_eik, grad phi_eik) at time t on the grid (or at points x)."""
    _check_time(phi_in, grid, t)
    x = _points(grid) if x is None else x
    y = invert_flow(phi_in, x, t)
    gy = phi_in.grad(y)
    phi = phi_in.value(y) + 0.5 * t * np.sum(gy * gy, axis=0)
    return phi, gy


def phase_hessian(phi_in: Phase, grid: PeriodicGrid, t: float):
    """D^2 phi(t, x) = H (I + tH)^{-1} evaluated at the characteristic foot."""
    x = _points(grid)
    y = invert_flow(phi_in, x, t)
    H = phi_in.hess(y)
    d = H.shape[0]
    Hm = np.moveaxis(H, (0, 1), (-2, -1))
    A = np.eye(d) + t * Hm
    out = Hm @ np.linalg.inv(A)
    return np.moveaxis(out, (-2, -1), (0, 1))


# amplitudes -----------------------------------------------------------------

AmplitudeLike = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def spectral_interpolate(grid: PeriodicGrid, samples, y, chunk: int = 512):
    """Evaluate the trigonometric interpolant of periodic samples at points y.

    Exact for band-limited data; 1D only (higher dimensions fall back to
    periodic cubic splines).
    """
    samples = np.asarray(samples)
    if grid.dim != 1:
        return _cubic_interpolate(grid, samples, y)
    n = grid.n
    ch = np.fft.fft(samples) / n
    k = grid.k1.copy()
    # split the Nyquist mode symmetrically so real data interpolate to real values
    nyq = n // 2
    pts = np.asarray(y[0]).ravel() - grid.x1[0]
    out = np.empty(pts.size, dtype=complex)
    for s in range(0, pts.size, chunk):
        p = pts[s:s + chunk]
        E = np.exp(1j * np.outer(p, k))
        E[:, nyq] = np.cos(k[nyq] * p)
        out[s:s + chunk] = E @ ch
    out = out.reshape(np.asarray(y[0]).shape)
    return out.real if np.isrealobj(samples) else out


def _cubic_interpolate(grid, samples, y):
    idx = [(np.asarray(yy) - grid.x1[0]) / grid.dx for yy in y]
    if np.iscomplexobj(samples):
        re = map_coordinates(samples.real, idx, order=3, mode="grid-wrap")
        im = map_coordinates(samples.imag, idx, order=3, mode="grid-wrap")
        return re + 1j * im
    return map_coordinates(samples, idx, order=3, mode="grid-wrap")


def _eval_amplitude(a_in: AmplitudeLike, grid: PeriodicGrid, y):
    if callable(a_in):
        return np.asarray(a_in(y))
    return spectral_interpolate(grid, a_in, y)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _inverse_jacobian_integral(H, t):
    """int_0^t ds / det(I + s H) for stacked symmetric H of shape (d, d, ...)."""
    d = H.shape[0]
    if d == 1:
        lam = H[0, 0]
        out = np.empty_like(lam)
        small = np.abs(lam * t) < 1e-8
        out[small] = t * (1 - 0.5 * lam[small] * t + (lam[small] * t) ** 2 / 3)
        ls = lam[~small]
        out[~small] = np.log1p(t * ls) / ls
        return out
    s = 0.5 * t * (_GL_X + 1)
    acc = 0.0
    for si, wi in zip(s, _GL_W):
        acc = acc + wi / _det(si, H)
    return 0.5 * t * acc


@dataclass
class EikonalState:
    grid: PeriodicGrid
    a: np.ndarray
    phi_eik: np.ndarray
    grad_phi: np.ndarray
    time: float
    c0: float
    caustic_time: float

    def mass(self) -> float:
        return self.grid.integrate(np.abs(self.a) ** 2)


def solve_amplitude(a_in: AmplitudeLike, phi_in: Phase, grid: PeriodicGrid, c0: float, t: float):
    """Amplitude a(t) on the grid, with cubic phase rotation of strength c0."""
    tc = _check_time(phi_in, grid, t)
    x = _points(grid)
    y = invert_flow(phi_in, x, t)
    H = phi_in.hess(y)
    J = _det(t, H)
    ay = _eval_amplitude(a_in, grid, y)
    a = ay / np.sqrt(J)
    if c0 != 0.0:
        theta = -c0 * np.abs(ay) ** 2 * _inverse_jacobian_integral(H, t)
        a = a * np.exp(1j * theta)
    return a.astype(complex)


def solve_eikonal(a_in: AmplitudeLike, phi_in: Phase, grid: PeriodicGrid, c0: float,
                  t: float) -> EikonalState:
    tc = _check_time(phi_in, grid, t)
    phi, gphi = solve_phase(phi_in, grid, t)
    a = solve_amplitude(a_in, phi_in, grid, c0, t)
    return EikonalState(grid, a, phi, gphi, t, c0, tc)


def hj_residual(phi_in: Phase, grid: PeriodicGrid, t: float, dt: float) -> float:
    """Max interior residual of d_t phi + |grad phi|^2/2 by centred differences."""
    pm, _ = solve_phase(phi_in, grid, t - dt)
    pp, _ = solve_phase(phi_in, grid, t + dt)
    p0, _ = solve_phase(phi_in, grid, t)
    dphi_t = (pp - pm) / (2 * dt)
    sl = tuple(slice(1, -1) for _ in range(grid.dim))
    grad2 = 0.0
    for j in range(grid.dim):
        g = (np.roll(p0, -1, axis=j) - np.roll(p0, 1, axis=j)) / (2 * grid.dx)
        grad2 = grad2 + g * g
    r = dphi_t + 0.5 * grad2
    return float(np.max(np.abs(r[sl])))


def upwind_amplitude(a_in: AmplitudeLike, phi_in: Phase, grid: PeriodicGrid, c0: float, t: float,
                     cfl: float = 0.5) -> np.ndarray:
    """First-order upwind cross-check for the amplitude transport equation.

    The transport velocity grad phi and the divergence Lap phi are taken from
    the characteristic phase solution; a is advanced with forward Euler and
    one-sided differences in the upwind direction.  Periodic phases only.
    """
    _check_time(phi_in, grid, t)
    x = _points(grid)
    a = np.asarray(_eval_amplitude(a_in, grid, x), dtype=complex)
    vmax = float(np.max(np.abs(phi_in.grad(x)))) + 1e-300
    n_steps = max(1, int(math.ceil(t * vmax / (cfl * grid.dx))))
    h = t / n_steps
    for i in range(n_steps):
        s = i * h
        if s == 0:
            vel = phi_in.grad(x)
            lap = np.trace(phi_in.hess(x))
        else:
            _, vel = solve_phase(phi_in, grid, s)
            lap = np.trace(phase_hessian(phi_in, grid, s))
        rhs = -0.5 * lap * a - 1j * c0 * np.abs(a) ** 2 * a
        for j in range(grid.dim):
            fwd = (np.roll(a, -1, axis=j) - a) / grid.dx
            bwd = (a - np.roll(a, 1, axis=j)) / grid.dx
            rhs -= vel[j] * np.where(vel[j] > 0, bwd, fwd)
        a = a + h * rhs
    return a
