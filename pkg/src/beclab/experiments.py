"""Shared initial data and picklable callables used by the CLI and the acceptance suite."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .euler import FluidState
from .gp import WaveField
from .grid import PeriodicGrid


@dataclass(frozen=True)
class CosineAmplitude:
    """a_in(x) = (1 + amp cos(k x_1)) / norm, unit L^2 mass on the torus [-pi, pi)^d."""

    amp: float = 0.5
    k: int = 1
    box: float = 2 * math.pi
    dim: int = 1

    @property
    def norm(self) -> float:
        return math.sqrt(self.box ** self.dim * (1 + 0.5 * self.amp ** 2))

    def __call__(self, y):
        y = np.asarray(y)
        return ((1 + self.amp * np.cos(self.k * y[0])) / self.norm).astype(complex)


@dataclass(frozen=True)
class FluidData:
    """rho_in = (1 + amp cos x) / vol, u_in = ug sin x (so S_in = -ug cos x)."""

    rho_amp: float = 0.3
    u_amp: float = 0.3

    def rho(self, grid: PeriodicGrid):
        x = grid.coords[0]
        return (1 + self.rho_amp * np.cos(2 * np.pi / grid.box * x)) / grid.volume

    def u(self, grid: PeriodicGrid):
        x = grid.coords[0]
        k = 2 * np.pi / grid.box
        u1 = self.u_amp * np.sin(k * x)
        return [u1] + [np.zeros_like(x) for _ in range(grid.dim - 1)]

    def S(self, grid: PeriodicGrid):
        x = grid.coords[0]
        k = 2 * np.pi / grid.box
        return -self.u_amp / k * np.cos(k * x)

    def fluid(self, grid: PeriodicGrid, c: float) -> FluidState:
        return FluidState(grid, self.rho(grid), self.u(grid), c)

    def wave(self, grid: PeriodicGrid, eps: float, noise: float = 0.0,
             seed: Optional[int] = None) -> WaveField:
        rho = self.rho(grid)
        S = self.S(grid)
        if noise:
            rng = counter_rng(seed)
            rho = rho * (1 + noise * rng.standard_normal(rho.shape))
            rho = np.maximum(rho, 0.0)
        return WaveField.wkb(grid, rho, S, eps)


def counter_rng(seed: Optional[int]) -> np.random.Generator:
    """Seeded counter-based generator (Philox)."""
    return np.random.Generator(np.random.Philox(0 if seed is None else int(seed)))


@contextmanager
def worker_pool(jobs: int):
    """Yield an order-preserving map over a bounded process pool (plain map for jobs <= 1)."""
    if jobs <= 1:
        yield map
        return
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        yield ex.map
