"""
Frame, sequence and dense-field models.

Coordinates follow raster storage: x is the column index growing rightward,
y is the row index growing downward. Arrays are indexed ``[y, x]``.
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import DimensionMismatchError


def _frozen_copy(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class Frame(BaseModel):
    """Single 8-bit grayscale image."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray = Field(..., description="Row-major intensities, shape (height, width)")

    @field_validator("samples", mode="before")
    @classmethod
    def _check_samples(cls, value):
        array = np.asarray(value)
        if array.ndim != 2 or array.size == 0:
            raise ValueError(f"samples must be a non-empty 2-D array, got shape {array.shape}")
        if array.dtype != np.uint8:
            if not np.all(np.isfinite(array)) or np.any(array != np.round(array)):
                raise ValueError("samples must be integral")
            if array.min() < 0 or array.max() > 255:
                raise ValueError("samples must lie in [0, 255]")
        return _frozen_copy(array, np.uint8)

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def as_float(self) -> np.ndarray:
        """Samples as a float64 array."""
        return self.samples.astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


class Sequence(BaseModel):
    """Ordered frames sharing one size."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: List[Frame] = Field(..., min_length=2, description="Frames in temporal order")

    @model_validator(mode="after")
    def _check_homogeneous(self):
        shape = self.frames[0].shape
        for index, frame in enumerate(self.frames):
            if frame.shape != shape:
                raise DimensionMismatchError(
                    f"frame {index} is {frame.width}x{frame.height}, expected {shape[1]}x{shape[0]}"
                )
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return self.frames[0].shape

    def pairs(self):
        """Yield consecutive (prev, cur) frame pairs."""
        for k in range(1, len(self.frames)):
            yield self.frames[k - 1], self.frames[k]

    def __len__(self) -> int:
        return len(self.frames)


class FlowField(BaseModel):
    """Dense per-pixel displacement field in pixels."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dx: np.ndarray = Field(..., description="Horizontal displacement, shape (height, width)")
    dy: np.ndarray = Field(..., description="Vertical displacement, shape (height, width)")

    @field_validator("dx", "dy", mode="before")
    @classmethod
    def _check_component(cls, value):
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 2 or array.size == 0:
            raise ValueError(f"flow components must be non-empty 2-D arrays, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("flow values must be finite")
        return _frozen_copy(array, np.float64)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.dx.shape != self.dy.shape:
            raise DimensionMismatchError(f"dx shape {self.dx.shape} != dy shape {self.dy.shape}")
        return self

    @classmethod
    def zeros(cls, height: int, width: int) -> "FlowField":
        return cls(dx=np.zeros((height, width)), dy=np.zeros((height, width)))

    @classmethod
    def constant(cls, height: int, width: int, dx: float, dy: float) -> "FlowField":
        return cls(dx=np.full((height, width), float(dx)), dy=np.full((height, width), float(dy)))

    @property
    def width(self) -> int:
        return int(self.dx.shape[1])

    @property
    def height(self) -> int:
        return int(self.dx.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def vector_at(self, x: int, y: int) -> Tuple[float, float]:
        return float(self.dx[y, x]), float(self.dy[y, x])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowField):
            return NotImplemented
        return np.array_equal(self.dx, other.dx) and np.array_equal(self.dy, other.dy)

    __hash__ = None


class GradientField(BaseModel):
    """Spatial partial derivatives of one frame."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gx: np.ndarray = Field(..., description="dI/dx, shape (height, width)")
    gy: np.ndarray = Field(..., description="dI/dy, shape (height, width)")

    @field_validator("gx", "gy", mode="before")
    @classmethod
    def _check_channel(cls, value):
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 2:
            raise ValueError("gradient channels must be 2-D")
        if not np.all(np.isfinite(array)):
            raise ValueError("gradients must be finite")
        return _frozen_copy(array, np.float64)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.gx.shape != self.gy.shape:
            raise DimensionMismatchError(f"gx shape {self.gx.shape} != gy shape {self.gy.shape}")
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return int(self.gx.shape[0]), int(self.gx.shape[1])


def require_same_shape(*items, what: str = "inputs") -> Tuple[int, int]:
    """Return the common (height, width) or raise DimensionMismatchError."""
    shapes = {item.shape for item in items}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"{what} differ in size: {sorted(shapes)}")
    return shapes.pop()
