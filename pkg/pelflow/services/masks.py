"""
The nine neighborhood geometries and in-bounds neighborhood gathering.

Trial order is fixed: the full 3x3 window first, then the four half-planes,
then the four 2x2 quadrants. Single-mask variants use only the first entry.
"""
import logging
from typing import List, Tuple

from ..core.errors import DegenerateNeighborhoodError
from ..models.mask import MaskTemplate

logger = logging.getLogger(__name__)

MIN_NEIGHBORHOOD = 3


def _block(name: str, mask_id: int, cols: Tuple[int, ...], rows: Tuple[int, ...]) -> MaskTemplate:
    offsets = tuple((dx, dy) for dy in rows for dx in cols)
    return MaskTemplate(id=mask_id, name=name, offsets=offsets)


_ALL = (-1, 0, 1)
_MASKS = (
    _block("full", 0, _ALL, _ALL),
    _block("top", 1, _ALL, (-1, 0)),
    _block("bottom", 2, _ALL, (0, 1)),
    _block("left", 3, (-1, 0), _ALL),
    _block("right", 4, (0, 1), _ALL),
    _block("top-left", 5, (-1, 0), (-1, 0)),
    _block("bottom-left", 6, (-1, 0), (0, 1)),
    _block("top-right", 7, (0, 1), (-1, 0)),
    _block("bottom-right", 8, (0, 1), (0, 1)),
)


def mask_set() -> List[MaskTemplate]:
    """The nine templates in trial order."""
    return list(_MASKS)


def get_mask(mask_id: int) -> MaskTemplate:
    """
    Template ``mask_id`` (0 full, 1-4 halves, 5-8 quadrants).

    Raises:
        ValueError: id outside 0..8
    """
    if not 0 <= mask_id < len(_MASKS):
        raise ValueError(f"mask id must be in 0..{len(_MASKS) - 1}, got {mask_id}")
    return _MASKS[mask_id]


def gather(mask: MaskTemplate, r: Tuple[int, int], width: int, height: int) -> List[Tuple[int, int]]:
    """
    Absolute in-bounds positions of ``mask`` centered at ``r``, in template order.

    Raises:
        DegenerateNeighborhoodError: fewer than three positions survive clipping
    """
    x, y = r
    positions = [
        (x + dx, y + dy)
        for dx, dy in mask.offsets
        if 0 <= x + dx < width and 0 <= y + dy < height
    ]
    if len(positions) < MIN_NEIGHBORHOOD:
        raise DegenerateNeighborhoodError(
            f"mask {mask.id} at ({x},{y}) keeps {len(positions)} pixels in a {width}x{height} frame"
        )
    return positions


def render_mask(mask: MaskTemplate) -> str:
    """3x3 ASCII picture: X working pixel, O neighbor, . unused."""
    members = set(mask.offsets)
    lines = [f"m{mask.id} {mask.name} ({mask.size} px)"]
    for dy in (-1, 0, 1):
        row = []
        for dx in (-1, 0, 1):
            if (dx, dy) == (0, 0):
                row.append("X")
            elif (dx, dy) in members:
                row.append("O")
            else:
                row.append(".")
        lines.append(" ".join(row))
    return "\n".join(lines)
