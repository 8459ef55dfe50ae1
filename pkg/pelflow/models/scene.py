"""
Synthetic moving-rectangle scene parameters.
"""
from typing import Tuple

from pydantic import BaseModel, Field, model_validator

from ..core.errors import SceneParameterError


class RectSceneParams(BaseModel):
    """Textured rectangle moving over a textured, moving background."""

    width: int = Field(default=176, ge=2, description="Frame width in pixels")
    height: int = Field(default=144, ge=2, description="Frame height in pixels")
    rect_x: int = Field(default=68, ge=0, description="Rectangle left column in the first frame")
    rect_y: int = Field(default=52, ge=0, description="Rectangle top row in the first frame")
    rect_width: int = Field(default=40, ge=1, description="Rectangle width in pixels")
    rect_height: int = Field(default=40, ge=1, description="Rectangle height in pixels")
    background_dx: int = Field(default=2, description="Background displacement per frame, x")
    background_dy: int = Field(default=0, description="Background displacement per frame, y")
    rect_dx: int = Field(default=1, description="Rectangle displacement per frame, x")
    rect_dy: int = Field(default=2, description="Rectangle displacement per frame, y")
    background_mean: float = Field(default=50.0, description="Background texture mean")
    background_variance: float = Field(default=49.0, ge=0, description="Background texture innovation variance")
    rect_mean: float = Field(default=100.0, description="Rectangle texture mean")
    rect_variance: float = Field(default=25.0, ge=0, description="Rectangle texture innovation variance")
    frames: int = Field(default=2, ge=2, description="Number of frames K")
    seed: int = Field(default=1234, ge=0, description="PRNG seed")

    @model_validator(mode="after")
    def _check_rectangle_inside(self):
        for k in range(self.frames):
            x0 = self.rect_x + k * self.rect_dx
            y0 = self.rect_y + k * self.rect_dy
            if x0 < 0 or y0 < 0 or x0 + self.rect_width > self.width or y0 + self.rect_height > self.height:
                raise SceneParameterError(
                    f"rectangle leaves the {self.width}x{self.height} frame at frame {k + 1} "
                    f"(origin {x0},{y0}, size {self.rect_width}x{self.rect_height})"
                )
        return self

    def rect_origin(self, k: int) -> Tuple[int, int]:
        """Rectangle (x, y) origin in frame k (0-based)."""
        return self.rect_x + k * self.rect_dx, self.rect_y + k * self.rect_dy
