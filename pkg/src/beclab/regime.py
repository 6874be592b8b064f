"""Scaling parameters of the dilute Bose gas and the regime classifier."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import ConfigInvalid

REGIMES = ("GP", "HC", "BGP", "SGP", "HD")


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class RegimeParams:
    """Scaling tuple (N, eps, beta, kappa, alpha) with derived quantities.

    lam = (ln N)^alpha, mu = N^(1-beta) eps^(2(1-kappa)) / lam,
    mu_tilde = lam mu, ell = eps^4, L = N^beta eps^(2 kappa) ell.
    """

    N: float
    eps: float
    beta: float = 1.0
    kappa: float = 1.0
    alpha: float = 0.0
    ln_N: Optional[float] = None

    def __post_init__(self):
        if self.ln_N is not None:
            object.__setattr__(self, "N", _safe_exp(self.ln_N))
        if not (self.N >= math.e * (1 - 1e-12)):
            raise ConfigInvalid(f"N must be >= e, got {self.N}")
        if not (0 < self.eps <= 1):
            raise ConfigInvalid(f"eps must lie in (0, 1], got {self.eps}")
        if not (self.beta >= 1):
            raise ConfigInvalid(f"beta must be >= 1, got {self.beta}")
        if not (0 <= self.kappa <= 1):
            raise ConfigInvalid(f"kappa must lie in [0, 1], got {self.kappa}")
        if not (0 <= self.alpha < 1):
            raise ConfigInvalid(f"alpha must lie in [0, 1), got {self.alpha}")

    @classmethod
    def from_log(cls, ln_N: float, eps: float, beta: float = 1.0, kappa: float = 1.0,
                 alpha: float = 0.0) -> "RegimeParams":
        """Construct from ln N, for particle numbers beyond floating-point range."""
        return cls(N=_safe_exp(ln_N), eps=eps, beta=beta, kappa=kappa, alpha=alpha, ln_N=ln_N)

    @property
    def log_N(self) -> float:
        return self.ln_N if self.ln_N is not None else math.log(self.N)

    @property
    def lam(self) -> float:
        return self.log_N ** self.alpha

    @property
    def mu_tilde(self) -> float:
        return _safe_exp((1 - self.beta) * self.log_N) * self.eps ** (2 * (1 - self.kappa))

    @property
    def mu(self) -> float:
        return self.mu_tilde / self.lam

    @property
    def scale(self) -> float:
        """Inverse interaction range N^beta eps^(2 kappa)."""
        return _safe_exp(self.beta * self.log_N) * self.eps ** (2 * self.kappa)

    @property
    def ell(self) -> float:
        return self.eps ** 4

    @property
    def L(self) -> float:
        return self.scale * self.ell

    @property
    def regime(self) -> str:
        if self.beta > 1:
            return "HD"
        if self.kappa == 1:
            return "GP" if self.alpha == 0 else "HC"
        if self.kappa == 0:
            return "SGP"
        return "BGP"

    def derived(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu, "mu_tilde": self.mu_tilde,
                "scale": self.scale, "ell": self.ell, "L": self.L, "regime": self.regime}

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["ln_N"] is None:
            del d["ln_N"]
        return d

    @classmethod
    def from_config(cls, cfg: dict) -> "RegimeParams":
        if "ln_N" in cfg:
            return cls.from_log(float(cfg["ln_N"]), float(cfg["eps"]), float(cfg.get("beta", 1.0)),
                                float(cfg.get("kappa", 1.0)), float(cfg.get("alpha", 0.0)))
        try:
            return cls(N=float(cfg["N"]), eps=float(cfg["eps"]), beta=float(cfg.get("beta", 1.0)),
                       kappa=float(cfg.get("kappa", 1.0)), alpha=float(cfg.get("alpha", 0.0)))
        except KeyError as exc:
            raise ConfigInvalid(f"missing regime key {exc}") from None
