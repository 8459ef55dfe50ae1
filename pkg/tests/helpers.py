"""
Test image builders.
"""
import numpy as np


def smooth_pattern(width: int, height: int, shift_x: float = 0.0, shift_y: float = 0.0) -> np.ndarray:
    """Band-limited test image; ``shift`` moves the content right/down by that many pixels."""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs = xs - shift_x
    ys = ys - shift_y
    values = 128.0 + 50.0 * np.sin(xs / 3.0) * np.cos(ys / 4.0) + 30.0 * np.sin((xs + ys) / 5.0)
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def background_accuracy(flow, params, k: int, tol: float = 0.5) -> float:
    """
    Share of interior background pixels of pair (k-1, k) whose vector is within
    ``tol`` px of the background motion.

    Pixels within 3 px of the frame border or of the rectangle in frame k are
    left out.
    """
    height, width = params.height, params.width
    keep = np.zeros((height, width), dtype=bool)
    keep[3:height - 3, 4:width - 3] = True
    rx, ry = params.rect_origin(k)
    keep[max(ry - 3, 0):ry + params.rect_height + 3, max(rx - 3, 0):rx + params.rect_width + 3] = False
    error = np.hypot(flow.dx - params.background_dx, flow.dy - params.background_dy)
    return float(np.mean(error[keep] <= tol))
