"""
Per-pixel linear observation system and its regularized solution.

These types are created once per pixel iteration, so they are plain frozen
dataclasses rather than validated pydantic models.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class NormalStats:
    """Sufficient statistics of a system: G^T G = [[a, b], [b, c]], G^T z = (h1, h2), z^T z."""

    n: int
    a: float
    b: float
    c: float
    h1: float
    h2: float
    zz: float


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Stacked observation model z = G u + n for one pixel, mask and iterate."""

    G: np.ndarray
    z: np.ndarray

    @property
    def n(self) -> int:
        return int(self.z.shape[0])

    @cached_property
    def stats(self) -> NormalStats:
        gx = self.G[:, 0]
        gy = self.G[:, 1]
        return NormalStats(
            n=self.n,
            a=float(gx @ gx),
            b=float(gx @ gy),
            c=float(gy @ gy),
            h1=float(gx @ self.z),
            h2=float(gy @ self.z),
            zz=float(self.z @ self.z),
        )


@dataclass(frozen=True)
class RegMatrix:
    """Diagonal regularization matrix diag(lam1, lam2)."""

    lam1: float
    lam2: float
    source: str = "fixed"

    @classmethod
    def scalar(cls, lam: float, source: str = "fixed") -> "RegMatrix":
        return cls(lam, lam, source)

    @property
    def is_scalar(self) -> bool:
        return self.lam1 == self.lam2


@dataclass(frozen=True)
class UpdateVector:
    """Displacement update u = d - d^i in pixels."""

    ux: float
    uy: float

    @property
    def norm(self) -> float:
        return float(np.hypot(self.ux, self.uy))
