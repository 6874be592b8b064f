"""Periodic tensor grids and spectral derivative helpers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatch


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid on [-box/2, box/2)^dim with n points per axis."""

    dim: int
    n: int
    box: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if self.n < 4 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 4")

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def dx(self) -> float:
        return self.box / self.n

    @property
    def dV(self) -> float:
        return self.dx ** self.dim

    @property
    def volume(self) -> float:
        return self.box ** self.dim

    @cached_property
    def x1(self) -> np.ndarray:
        return -0.5 * self.box + self.dx * np.arange(self.n)

    @cached_property
    def k1(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def coords(self):
        return np.meshgrid(*([self.x1] * self.dim), indexing="ij")

    @cached_property
    def wavevectors(self):
        return np.meshgrid(*([self.k1] * self.dim), indexing="ij")

    @cached_property
    def k2(self) -> np.ndarray:
        return sum(k * k for k in self.wavevectors)

    @cached_property
    def kmax(self) -> float:
        return float(np.max(np.abs(self.k1)))

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(x * x for x in self.coords))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask on the full FFT grid."""
        cut = (2.0 / 3.0) * self.kmax
        m = np.ones(self.shape, dtype=bool)
        for k in self.wavevectors:
            m &= np.abs(k) < cut
        return m

    def integrate(self, f) -> float:
        return float(np.real(np.sum(f)) * self.dV)

    def fft(self, f):
        return np.fft.fftn(f)

    def ifft(self, fh):
        return np.fft.ifftn(fh)

    def grad(self, f, real: bool | None = None):
        """Spectral gradient; returns a list with one array per axis."""
        fh = np.fft.fftn(f)
        if real is None:
            real = np.isrealobj(f)
        out = []
        for k in self.wavevectors:
            g = np.fft.ifftn(1j * k * fh)
            out.append(g.real if real else g)
        return out

    def deriv(self, f, axis: int, real: bool | None = None):
        if real is None:
            real = np.isrealobj(f)
        g = np.fft.ifftn(1j * self.wavevectors[axis] * np.fft.fftn(f))
        return g.real if real else g

    def div(self, fields):
        return sum(self.deriv(f, j) for j, f in enumerate(fields))

    def laplacian(self, f, real: bool | None = None):
        if real is None:
            real = np.isrealobj(f)
        g = np.fft.ifftn(-self.k2 * np.fft.fftn(f))
        return g.real if real else g

    def sobolev_norm(self, f, s: float) -> float:
        """H^s norm with weight <xi>^s, via Parseval."""
        fh = np.fft.fftn(f) * self.dV
        w = (1.0 + self.k2) ** s
        return float(np.sqrt(np.sum(w * np.abs(fh) ** 2) / self.volume))

    def same_as(self, other: "PeriodicGrid"):
        if (self.dim, self.n, self.box) != (other.dim, other.n, other.box):
            raise GridMismatch("fields live on different grids")

    def to_dict(self) -> dict:
        return {"dim": self.dim, "n": self.n, "box": self.box}
