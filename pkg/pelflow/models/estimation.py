"""
Estimator configuration and per-pixel / per-frame results.
"""
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from strenum import StrEnum

from ..core.config import settings
from .frame import FlowField


class Algorithm(StrEnum):
    """Estimator variants."""

    WIENER = "wiener"
    LSCRV = "lscrv"
    LSCRVB = "lscrvb"
    LSCRV1 = "lscrv1"
    LSCRV2 = "lscrv2"

    @property
    def label(self) -> str:
        return "Wiener" if self is Algorithm.WIENER else self.value.upper()

    @property
    def multi_mask(self) -> bool:
        return self in (Algorithm.LSCRVB, Algorithm.LSCRV2)

    @property
    def diagonal(self) -> bool:
        return self in (Algorithm.LSCRV1, Algorithm.LSCRV2)


ALGORITHM_ORDER = (
    Algorithm.WIENER,
    Algorithm.LSCRV,
    Algorithm.LSCRVB,
    Algorithm.LSCRV1,
    Algorithm.LSCRV2,
)


class InitMode(StrEnum):
    """Source of the initial displacement d0."""

    CAUSAL = "causal"
    ZERO = "zero"
    EXTERNAL = "external"


class PixelStatus(IntEnum):
    """Outcome of one pixel; values are the codes stored in status maps."""

    STATIC = 0
    FALLBACK_ZERO = 1
    CONVERGED = 2


class SearchConfig(BaseModel):
    """Search box and stopping rules of the GCV minimizers."""

    lambda_min: float = Field(default=1e-3, gt=0, description="Smallest admissible lambda")
    lambda_max: float = Field(default=1e6, gt=0, description="Largest admissible lambda")
    grid_points: int = Field(default=28, ge=3, description="Log-spaced coarse grid size")
    golden_tol: float = Field(default=1e-3, gt=0, description="Relative bracket width ending golden-section search")
    sweeps: int = Field(default=5, ge=1, description="Coordinate-descent sweeps for diagonal lambda")
    sweep_tol: float = Field(default=1e-6, ge=0, description="Relative GCV improvement ending the sweeps")
    tie_rtol: float = Field(default=1e-9, ge=0, description="Relative tolerance treating grid values as tied")
    fallback_mu: float = Field(default=50.0, gt=0, description="Wiener parameter at the bottom of the fallback ladder")

    @model_validator(mode="after")
    def _check_box(self):
        if self.lambda_max <= self.lambda_min:
            raise ValueError("lambda_max must exceed lambda_min")
        return self


class EstimatorConfig(BaseModel):
    """Pel-recursive estimator settings."""

    algorithm: Algorithm = Field(default=Algorithm.LSCRV2, description="Estimator variant")
    dfd_threshold: float = Field(default=settings.DFD_THRESHOLD, gt=0, description="T, |DFD| stop threshold in gray levels")
    move_threshold: float = Field(default=settings.MOVE_THRESHOLD, ge=0, description="T_move, moving-area gate in gray levels")
    epsilon: float = Field(default=settings.EPSILON, gt=0, description="Update-norm convergence threshold in pixels")
    max_iterations: int = Field(default=settings.MAX_ITERATIONS, ge=1, description="I, iterations allowed per mask")
    mu: float = Field(default=settings.WIENER_MU, ge=0, description="Wiener regularization parameter")
    init_mode: InitMode = Field(default=InitMode.CAUSAL, description="Initial displacement source")
    max_displacement: float = Field(default=settings.MAX_DISPLACEMENT, gt=0, description="Infinity-norm clamp aborting a mask trial")
    mask_ids: Optional[List[int]] = Field(default=None, description="Override of the variant's mask list")
    retain_best: bool = Field(default=True, description="Keep the best-|DFD| candidate when every mask fails")
    workers: int = Field(default=settings.WORKERS, ge=1, description="Worker processes for frame-pair estimation")
    search: SearchConfig = Field(default_factory=SearchConfig)

    @field_validator("mask_ids")
    @classmethod
    def _check_mask_ids(cls, value):
        if value is None:
            return value
        if not value:
            raise ValueError("mask list must not be empty")
        if any(m < 0 or m > 8 for m in value) or len(set(value)) != len(value):
            raise ValueError("mask ids must be unique values in 0..8")
        return value

    def resolved_mask_ids(self) -> List[int]:
        """Masks tried by this configuration, in trial order."""
        if self.mask_ids is not None:
            return list(self.mask_ids)
        return list(range(9)) if self.algorithm.multi_mask else [0]


@dataclass(frozen=True)
class PixelResult:
    """Outcome of estimating one pixel."""

    dx: float
    dy: float
    status: PixelStatus
    mask_id: int = -1
    iterations: int = 0
    abs_dfd: float = 0.0
    lambda_source: str = ""


@dataclass(eq=False)
class FrameEstimate:
    """Flow, status map and counters for one frame pair."""

    flow: FlowField
    status: np.ndarray
    lambda_sources: Dict[str, int] = field(default_factory=dict)
    iterations: int = 0
    seconds: float = 0.0

    def status_counts(self) -> Dict[str, int]:
        return {s.name.lower(): int(np.count_nonzero(self.status == s)) for s in PixelStatus}
