"""Pair-excitation kernel k(x, y) = -N w(x - y) phi(x) phi(y), w = 1 - f(s |x|).

Everything is three-dimensional.  For radial condensates the Hilbert-Schmidt
norms reduce to one-dimensional radial integrals against correlation
functions of the density, so the kernel is never materialized on a grid.
Radial integrals run in the scattering variable r' = s |z| (s = N^beta
eps^(2 kappa)): Simpson on the solver grid inside the potential support,
composite Gauss-Legendre on geometric panels outside, where f is known in
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .errors import GridMismatch, QuadratureSingular, UnresolvedSupport
from .regime import RegimeParams
from .scattering import NeumannGroundState, RadialPotential, ScatteringSolution

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


# radial condensates ---------------------------------------------------------

class RadialDensity:
    """Radial condensate phi(|x|) >= 0 in three dimensions with unit mass."""

    r_max: float = math.inf
    volume: Optional[float] = None

    def phi(self, R):
        raise NotImplementedError

    def rho(self, R):
        return self.phi(R) ** 2

    def grad_phi_sq(self, R):
        raise NotImplementedError

    def sphere_mean(self, R, r):
        """Average of rho over the sphere of radius r centred at distance R."""
        raise NotImplementedError

    def autocorr(self, r):
        """A(r) = int rho(x) rho(x - z) dx, |z| = r."""
        raise NotImplementedError

    def autocorr_deriv(self, r):
        raise NotImplementedError

    def grad_corr(self, r):
        """B(r) = int |grad phi|^2(x) rho(x - z) dx."""
        raise NotImplementedError

    def outer_nodes(self):
        """Radial quadrature (R, weight incl. 4 pi R^2) over the support of rho."""
        raise NotImplementedError


@dataclass
class GaussianDensity(RadialDensity):
    """phi = (2 pi sigma^2)^(-3/4) exp(-|x|^2 / (4 sigma^2)); all correlations closed form."""

    sigma: float = 1.0

    @property
    def r_max(self):
        return 12.0 * self.sigma

    def phi(self, R):
        s2 = self.sigma ** 2
        return (2 * np.pi * s2) ** -0.75 * np.exp(-np.asarray(R) ** 2 / (4 * s2))

    def grad_phi_sq(self, R):
        R = np.asarray(R)
        return R * R / (4 * self.sigma ** 4) * self.rho(R)

    def sphere_mean(self, R, r):
        s2 = self.sigma ** 2
        R, r = np.broadcast_arrays(np.asarray(R, float), np.asarray(r, float))
        x = 2 * R * r / s2
        fac = np.where(x > 1e-12, -np.expm1(-x) / np.where(x > 1e-12, x, 1.0), 1.0 - 0.5 * x)
        return (2 * np.pi * s2) ** -1.5 * np.exp(-(R - r) ** 2 / (2 * s2)) * fac

    def autocorr(self, r):
        s2 = self.sigma ** 2
        return (4 * np.pi * s2) ** -1.5 * np.exp(-np.asarray(r) ** 2 / (4 * s2))

    def autocorr_deriv(self, r):
        return -np.asarray(r) / (2 * self.sigma ** 2) * self.autocorr(r)

    def grad_corr(self, r):
        r = np.asarray(r)
        s2 = self.sigma ** 2
        return self.autocorr(r) * (r * r / 4 + 1.5 * s2) / (4 * s2 * s2)

    def outer_nodes(self, panels: int = 24):
        edges = np.linspace(0.0, self.r_max, panels + 1)
        R, W = _gl_composite(edges)
        return R, W * 4 * np.pi * R ** 2


@dataclass
class ConstantDensity(RadialDensity):
    """phi constant on a periodic box of the given volume (minimum-image distances)."""

    volume: float = 1.0

    @property
    def r_max(self):
        return 0.5 * self.volume ** (1.0 / 3.0)

    def phi(self, R):
        return np.full(np.shape(R), self.volume ** -0.5)

    def grad_phi_sq(self, R):
        return np.zeros(np.shape(R))

    def sphere_mean(self, R, r):
        return np.full(np.broadcast(np.asarray(R), np.asarray(r)).shape, 1.0 / self.volume)

    def autocorr(self, r):
        return np.full(np.shape(r), 1.0 / self.volume)

    def autocorr_deriv(self, r):
        return np.zeros(np.shape(r))

    def grad_corr(self, r):
        return np.zeros(np.shape(r))

    def outer_nodes(self):
        # one representative point carrying the whole box volume
        return np.array([0.0]), np.array([self.volume])


def _gl_composite(edges):
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (b - a) * (_GL_X[None, :] + 1) + a
    w = 0.5 * (b - a) * _GL_W[None, :]
    return x.ravel(), w.ravel()


# radial profile of w ----------------------------------------------------------

@dataclass
class RadialProfile:
    """Quadrature nodes r' with weights, f(r') and f'(r') in scattering units."""

    r: np.ndarray
    weight: np.ndarray
    f: np.ndarray
    df: np.ndarray
    support: float  # L for Neumann, inf for Dirichlet

    @property
    def w(self):
        return 1.0 - self.f


def _simpson_weights(n, h):
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def radial_profile(sol, upper: float, panels_per_octave: int = 4) -> RadialProfile:
    """Quadrature representation of w = 1 - f on [0, min(upper, support)]."""
    n = sol.n_interior
    R0 = sol.R0
    r_in = sol.r_grid[: n + 1]
    if n % 2:
        raise QuadratureSingular("interior grid needs an even number of intervals")
    w_in = _simpson_weights(n, r_in[1] - r_in[0])
    f_in = sol.f[: n + 1]
    df_in = sol.df[: n + 1]
    if isinstance(sol, NeumannGroundState):
        support = sol.L
    else:
        support = math.inf
    top = min(upper, support)
    if not math.isfinite(top):
        raise QuadratureSingular("radial integral needs a finite cutoff for Dirichlet profiles")
    if top <= R0:
        raise UnresolvedSupport("cutoff inside the potential support")
    n_pan = max(4, int(math.ceil(panels_per_octave * math.log2(top / R0))))
    edges = np.geomspace(R0, top, n_pan + 1)
    r_out, w_out = _gl_composite(edges)
    if isinstance(sol, NeumannGroundState):
        f_out, df_out = sol.exterior(r_out)
    else:
        f_out = 1.0 - sol.a0 / r_out
        df_out = sol.a0 / r_out ** 2
    return RadialProfile(np.concatenate([r_in, r_out]), np.concatenate([w_in, w_out]),
                         np.concatenate([f_in, f_out]), np.concatenate([df_in, df_out]), support)


# kernel and diagnostics -----------------------------------------------------

@dataclass
class PairKernelDiagnostics:
    hs_norm: float
    grad_hs_norm: float
    sup_slice_norm: float
    hs_bound: float
    grad_bound: float
    sup_bound: float

    def constants(self) -> dict:
        """Ratios measured / regime bound, i.e. the fitted constants."""
        return {"hs": self.hs_norm / self.hs_bound if self.hs_bound else 0.0,
                "grad": self.grad_hs_norm / self.grad_bound if self.grad_bound else 0.0,
                "sup": self.sup_slice_norm / self.sup_bound if self.sup_bound else 0.0}

    def to_dict(self) -> dict:
        return {"hs_norm": self.hs_norm, "grad_hs_norm": self.grad_hs_norm,
                "sup_slice_norm": self.sup_slice_norm, "hs_bound": self.hs_bound,
                "grad_bound": self.grad_bound, "sup_bound": self.sup_bound,
                "constants": self.constants()}


class PairKernel:
    """Evaluator for k(x, y) = -N w(x - y) phi(x) phi(y) with radial phi.

    Parameters
    ----------
    sol : ScatteringSolution or NeumannGroundState
        Supplies f; w(z) = 1 - f(s |z|).
    density : RadialDensity
    params : RegimeParams
    """

    def __init__(self, sol, density: RadialDensity, params: RegimeParams):
        if not math.isclose(sol.mu, params.mu, rel_tol=1e-9):
            raise GridMismatch("scattering input solved at a different mu")
        if not math.isfinite(params.scale):
            raise UnresolvedSupport("interaction scale overflows; use the delta limit")
        self.sol = sol
        self.density = density
        self.params = params
        self.s = params.scale
        cut = self.s * 2.0 * density.r_max
        self.profile = radial_profile(sol, cut)
        self.zero = bool(np.all(self.profile.w == 0))

    # pointwise ---------------------------------------------------------------
    def w(self, z):
        """w at physical distance |z|."""
        rp = self.s * np.asarray(z, dtype=float)
        return 1.0 - self.sol.f_at(rp)

    def evaluate(self, X, Y):
        """k at point pairs; X, Y have shape (3, ...)."""
        d = np.sqrt(np.sum((np.asarray(X) - np.asarray(Y)) ** 2, axis=0))
        px = self.density.phi(np.sqrt(np.sum(np.asarray(X) ** 2, axis=0)))
        py = self.density.phi(np.sqrt(np.sum(np.asarray(Y) ** 2, axis=0)))
        return -self.params.N * self.w(d) * px * py

    def dense(self, points):
        """Dense matrix k(x_i, x_j) for a small set of points (shape (3, M))."""
        P = np.asarray(points)
        if P.shape[1] > 2000:
            raise MemoryError("dense kernels are limited to 2000 points")
        return self.evaluate(P[:, :, None], P[:, None, :])

    def pointwise_bound(self, X, Y, C: float = 1.0):
        """C min(N, mu~ a0 / (eps^2 |x - y|)) 1{|x - y| <= ell} |phi(x)| |phi(y)|."""
        p = self.params
        d = np.sqrt(np.sum((np.asarray(X) - np.asarray(Y)) ** 2, axis=0))
        px = self.density.phi(np.sqrt(np.sum(np.asarray(X) ** 2, axis=0)))
        py = self.density.phi(np.sqrt(np.sum(np.asarray(Y) ** 2, axis=0)))
        ell = self.profile.support / self.s
        with np.errstate(divide="ignore"):
            cap = np.minimum(p.N, p.mu_tilde * self.sol.a0 / (p.eps ** 2 * d))
        return C * cap * (d <= ell * (1 + 1e-12)) * np.abs(px * py)

    # norms -------------------------------------------------------------------
    def _radial(self, integrand):
        pr = self.profile
        return float(np.sum(pr.weight * integrand * 4 * np.pi * pr.r ** 2))

    def hs_norm(self) -> float:
        pr = self.profile
        z = pr.r / self.s
        val = self._radial(pr.w ** 2 * self.density.autocorr(z)) / self.s ** 3
        return self.params.N * math.sqrt(max(val, 0.0))

    def grad_hs_norm(self) -> float:
        """||eps grad_1 k||_HS = N eps (T1 + T2 + T3)^(1/2) with
        T1 = int |grad w|^2 A, T2 = int w^2 B, T3 = 1/2 int grad(w^2) . grad A."""
        pr = self.profile
        s = self.s
        z = pr.r / s
        dens = self.density
        wprime = -s * pr.df  # d w / d|z|
        t1 = self._radial(wprime ** 2 * dens.autocorr(z)) / s ** 3
        t2 = self._radial(pr.w ** 2 * dens.grad_corr(z)) / s ** 3
        t3 = self._radial(pr.w * wprime * dens.autocorr_deriv(z)) / s ** 3
        tot = t1 + t2 + t3
        return self.params.N * self.params.eps * math.sqrt(max(tot, 0.0))

    def slice_norms(self, R=None):
        """||k(x, .)||_2 for |x| = R."""
        if R is None:
            R = np.linspace(0.0, self.density.r_max, 241)
        pr = self.profile
        z = pr.r / self.s
        M = self.density.sphere_mean(np.asarray(R)[:, None], z[None, :])
        conv = (M * (pr.weight * pr.w ** 2 * 4 * np.pi * pr.r ** 2)[None, :]).sum(axis=1) / self.s ** 3
        return R, self.params.N * self.density.phi(R) * np.sqrt(np.maximum(conv, 0.0))

    def diagnostics(self, v: Optional[RadialPotential] = None) -> PairKernelDiagnostics:
        p = self.params
        hs = self.hs_norm()
        gr = self.grad_hs_norm()
        _, sl = self.slice_norms()
        ell = p.ell
        hs_bound = p.mu_tilde * min(math.sqrt(ell), 1.0) / p.eps ** 2
        c0 = self.sol.R0
        grad_bound = math.sqrt(p.N) * math.sqrt(p.mu_tilde + p.lam * max(c0 - self.sol.a0, 0.0))
        return PairKernelDiagnostics(hs, gr, float(np.max(sl)),
                                     hs_bound, grad_bound, hs_bound)


def hs_constant_density_closed_form(sol, params: RegimeParams, volume: float) -> float:
    """||k||_HS for constant phi on a torus: N |phi|^2 (vol int w^2 dz)^(1/2).

    Independent evaluation: Simpson on a uniform fine grid of r' over the
    whole support, with f taken from the solver's own interpolant.
    """
    L = sol.L if isinstance(sol, NeumannGroundState) else min(params.scale * 0.5 * volume ** (1 / 3),
                                                               1e6)
    n_in = 20000
    r = np.linspace(0.0, sol.R0, n_in + 1)
    w_in = 1.0 - np.interp(r, sol.r_grid, sol.f)
    tot = simpson(w_in ** 2 * r ** 2, x=r)
    t = np.linspace(0.0, 1.0, 200001)
    r2 = sol.R0 * (L / sol.R0) ** t
    w_out = 1.0 - sol.f_at(r2)
    tot += simpson(w_out ** 2 * r2 ** 3 * math.log(L / sol.R0), x=t)
    int_w2 = 4 * np.pi * tot / params.scale ** 3
    return params.N / volume * math.sqrt(volume * int_w2)


# kinetic main term ------------------------------------------------------------

def kinetic_density(sol, density: RadialDensity, params: RegimeParams, R=None):
    """g_N(R) = N eps^2 int |grad w(z)|^2 rho(x - z) dz at |x| = R.

    In scattering units g_N = mu~ int f'(r')^2 <rho>(R, r'/s) 4 pi r'^2 dr'.
    """
    s = params.scale
    if not math.isfinite(s):
        raise UnresolvedSupport("interaction scale overflows")
    pr = radial_profile(sol, s * 2.0 * density.r_max)
    if R is None:
        R, W = density.outer_nodes()
    M = density.sphere_mean(np.asarray(R)[:, None], (pr.r / s)[None, :])
    g = (M * (pr.weight * pr.df ** 2 * 4 * np.pi * pr.r ** 2)[None, :]).sum(axis=1)
    return np.asarray(R), params.mu_tilde * g


def kinetic_correction_check(sol, density: RadialDensity, params: RegimeParams, b0: float) -> float:
    """|| g_N |phi|^2 - 4 pi mu~ b0 |phi|^4 ||_{L^1}."""
    R, W = density.outer_nodes()
    _, g = kinetic_density(sol, density, params, R)
    rho = density.rho(R)
    return float(np.sum(W * np.abs(g * rho - 4 * np.pi * params.mu_tilde * b0 * rho ** 2)))


def neumann_gradient_integral(ngs: NeumannGroundState) -> float:
    """int_{B_L} |grad f_L|^2 dx by radial quadrature."""
    pr = radial_profile(ngs, ngs.L)
    return float(np.sum(pr.weight * pr.df ** 2 * 4 * np.pi * pr.r ** 2))


def neumann_gradient_integral_dual(ngs: NeumannGroundState, v: RadialPotential) -> float:
    """Same integral from the equation: mu int |grad f|^2 = int (E - v) f^2 (Neumann boundary)."""
    n = ngs.n_interior
    r = ngs.r_grid[: n + 1]
    m = ngs.m_values[: n + 1]
    inner = simpson((ngs.E_gs - v.interior(r)) * m * m, x=r)
    # exterior: E int m^2 dr in closed form
    q = ngs.q
    A, B = ngs.ext_A, ngs.ext_B
    d = ngs.L - ngs.R0
    if q > 0:
        outer = (A * A * (d / 2 + math.sin(2 * q * d) / (4 * q))
                 + (B / q) ** 2 * (d / 2 - math.sin(2 * q * d) / (4 * q))
                 + A * B / q * math.sin(q * d) ** 2 / q)
    else:
        outer = 0.0
    return float(4 * np.pi * (inner + ngs.E_gs * outer) / ngs.mu)


def interaction_main_term(sol, v: RadialPotential, density: RadialDensity, params: RegimeParams,
                          a0: float, b0: float):
    """L^1 comparison of (K_f2 * rho) rho with 4 pi mu~ (a0 - b0) rho^2.

    K_f2(z) = lam s^3 (v f^2)(s z) is the interaction kernel built with the
    squared correlation function of ``sol``; a0, b0 are the Dirichlet values.
    Returns (direct L^1 mass, predicted L^1 mass, L^1 residual).  For an
    overflowing scale the kernel is replaced by its delta limit.
    """
    R, W = density.outer_nodes()
    rho = density.rho(R)
    n = sol.n_interior
    r = sol.r_grid[: n + 1]
    m = sol.m_values[: n + 1]
    wts = _simpson_weights(n, r[1] - r[0])
    prof = wts * v.interior(r) * m * m * 4 * np.pi
    s = params.scale
    if math.isfinite(s):
        M = density.sphere_mean(R[:, None], (r / s)[None, :])
        conv = params.lam * (M * prof[None, :]).sum(axis=1)
    else:
        conv = params.lam * float(np.sum(prof)) * rho
    direct = conv * rho
    pred = 4 * np.pi * params.mu_tilde * (a0 - b0) * rho ** 2
    return float(np.sum(W * direct)), float(np.sum(W * pred)), float(np.sum(W * np.abs(direct - pred)))
