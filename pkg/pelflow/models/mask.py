"""
Neighborhood template model.
"""
from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class MaskTemplate:
    """Ordered pixel offsets (dx, dy) around the working pixel, each in {-1, 0, 1}."""

    id: int
    name: str
    offsets: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError(f"mask {self.id}: duplicate offsets")
        if (0, 0) not in self.offsets:
            raise ValueError(f"mask {self.id}: working pixel missing")
        if not 4 <= len(self.offsets) <= 9:
            raise ValueError(f"mask {self.id}: {len(self.offsets)} offsets, expected 4..9")
        if any(abs(dx) > 1 or abs(dy) > 1 for dx, dy in self.offsets):
            raise ValueError(f"mask {self.id}: offsets must lie in the 3x3 window")

    @property
    def size(self) -> int:
        return len(self.offsets)
