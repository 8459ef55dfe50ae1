"""
Evaluation report models.
"""
import math
from typing import List, Optional

from pydantic import BaseModel, Field


class PairMetrics(BaseModel):
    """Frame-difference energies of one consecutive frame pair."""

    pair: int = Field(..., ge=1, description="Index k of the later frame (1-based pair number)")
    fd_energy: float = Field(..., ge=0, description="Sum of squared frame differences")
    dfd_energy: float = Field(..., ge=0, description="Sum of squared displaced frame differences")
    imc_db: float = Field(..., description="Improvement in motion compensation for this pair, +inf allowed")


class MetricsReport(BaseModel):
    """Flow-quality metrics of one estimate over one sequence."""

    mse_x: Optional[float] = Field(default=None, ge=0, description="Horizontal MSE, px^2")
    mse_y: Optional[float] = Field(default=None, ge=0, description="Vertical MSE, px^2")
    bias_x: Optional[float] = Field(default=None, description="Horizontal bias (true minus estimate), px")
    bias_y: Optional[float] = Field(default=None, description="Vertical bias (true minus estimate), px")
    mean_sq_dfd: float = Field(..., ge=0, description="Mean squared displaced frame difference")
    mean_sq_fd: float = Field(..., ge=0, description="Mean squared frame difference")
    imc_db: float = Field(..., description="Sequence IMC in dB, +inf on perfect registration")
    per_frame: List[PairMetrics] = Field(default_factory=list, description="Per-pair breakdown")

    @property
    def has_truth(self) -> bool:
        return self.mse_x is not None

    @property
    def imc_is_infinite(self) -> bool:
        return math.isinf(self.imc_db)
