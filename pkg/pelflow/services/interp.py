"""
Sub-pixel sampling, spatial gradients and displaced frame differences.

Sampling outside the frame clamps the coordinates to the valid rectangle, so
every function here is total.
"""
from typing import Tuple

import numpy as np

from ..core.errors import DimensionMismatchError
from ..models.frame import FlowField, Frame, GradientField, require_same_shape


def sample_array(values: np.ndarray, xs, ys) -> np.ndarray:
    """Clamped bilinear interpolation of a 2-D array at real (x, y) positions."""
    height, width = values.shape
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, width - 1)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, height - 1)
    x0 = np.minimum(np.floor(xs).astype(np.intp), max(width - 2, 0))
    y0 = np.minimum(np.floor(ys).astype(np.intp), max(height - 2, 0))
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = xs - x0
    fy = ys - y0
    top = values[y0, x0] * (1.0 - fx) + values[y0, x1] * fx
    bottom = values[y1, x0] * (1.0 - fx) + values[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def bilinear_sample(frame: Frame, x: float, y: float) -> float:
    """Intensity of ``frame`` at real coordinates (x, y)."""
    return float(sample_array(frame.samples.astype(np.float64), x, y))


def gradient_field(frame: Frame) -> GradientField:
    """
    Central-difference gradients of a frame.

    Borders use the same half-difference over an edge-replicated frame, which
    reduces to half the one-sided difference there.
    """
    if frame.width < 2 or frame.height < 2:
        raise DimensionMismatchError(
            f"gradients need at least 2x2 pixels, frame is {frame.width}x{frame.height}"
        )
    padded = np.pad(frame.as_float(), 1, mode="edge")
    gx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    gy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    return GradientField(gx=gx, gy=gy)


def sample_gradient(g: GradientField, x: float, y: float) -> Tuple[float, float]:
    """Bilinearly interpolated (gx, gy) at real coordinates."""
    return float(sample_array(g.gx, x, y)), float(sample_array(g.gy, x, y))


def dfd(cur: Frame, prev: Frame, r: Tuple[int, int], d: Tuple[float, float]) -> float:
    """Displaced frame difference I_k(r) - I_{k-1}(r - d)."""
    x, y = r
    predicted = sample_array(prev.samples.astype(np.float64), x - d[0], y - d[1])
    return float(cur.samples[y, x]) - float(predicted)


def warp_frame(prev: Frame, flow: FlowField) -> np.ndarray:
    """Motion-compensated prediction I_{k-1}(r - d(r)) for every pixel r."""
    require_same_shape(prev, flow, what="frame and flow")
    ys, xs = np.mgrid[0:prev.height, 0:prev.width].astype(np.float64)
    return sample_array(prev.as_float(), xs - flow.dx, ys - flow.dy)


def dfd_map(cur: Frame, prev: Frame, flow: FlowField) -> np.ndarray:
    """Per-pixel displaced frame difference of a whole frame."""
    require_same_shape(cur, prev, flow, what="frames and flow")
    return cur.as_float() - warp_frame(prev, flow)


def stack_channels(*channels: np.ndarray) -> np.ndarray:
    """Stack same-shape 2-D arrays into (height, width, channels) for joint sampling."""
    return np.ascontiguousarray(np.stack(channels, axis=-1), dtype=np.float64)


def sample_channels(stacked: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Clamped bilinear sampling of every channel of a stacked array; returns (N, channels)."""
    height, width = stacked.shape[:2]
    xs = np.clip(xs, 0.0, width - 1)
    ys = np.clip(ys, 0.0, height - 1)
    x0 = np.minimum(np.floor(xs).astype(np.intp), max(width - 2, 0))
    y0 = np.minimum(np.floor(ys).astype(np.intp), max(height - 2, 0))
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = (xs - x0)[:, None]
    fy = (ys - y0)[:, None]
    top = stacked[y0, x0] * (1.0 - fx) + stacked[y0, x1] * fx
    bottom = stacked[y1, x0] * (1.0 - fx) + stacked[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy
