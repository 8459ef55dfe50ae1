"""
Synthetic moving-rectangle sequences with known motion.

Textures come from the causal recursion
    I(m, n) = (I(m, n-1) + I(m-1, n) + I(m-1, n-1)) / 3 + e(m, n)
driven by zero-mean Gaussian innovations e of the requested variance, with
the first row and column set to the innovations themselves. The field is
shifted to the requested mean, then rounded and clamped to [0, 255]. The
recursion has unit gain, so the pixel variance is far above the innovation
variance and grows with the image size; the innovation variance is the
parameter that stays comparable across sizes.

Randomness is numpy's PCG64 bit generator seeded explicitly, so every output
is a pure function of (parameters, seed).
"""
import logging
import math
from typing import List, Tuple

import numpy as np

from ..core.errors import UndefinedSnrError
from ..models.frame import FlowField, Frame, Sequence
from ..models.scene import RectSceneParams

logger = logging.getLogger(__name__)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _child_seeds(seed: int, count: int) -> List[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def _ar_field(rows: int, cols: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean texture from the causal recursion with innovation std ``sigma``."""
    innovations = rng.normal(0.0, sigma, (rows, cols))
    field = np.empty((rows, cols))
    field[0, :] = innovations[0, :]
    field[:, 0] = innovations[:, 0]
    for m in range(1, rows):
        above = field[m - 1]
        current = field[m]
        noise = innovations[m]
        for n in range(1, cols):
            current[n] = (current[n - 1] + above[n] + above[n - 1]) / 3.0 + noise[n]
    return field - field.mean()


def _quantize(values: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def _texture(rows: int, cols: int, mean: float, variance: float, seed: int) -> np.ndarray:
    if variance == 0:
        return np.full((rows, cols), float(mean))
    return _ar_field(rows, cols, math.sqrt(variance), _rng(seed)) + mean


def gen_ar_texture(rows: int, cols: int, mean: float, variance: float, seed: int) -> Frame:
    """Autoregressive texture with the given sample mean and innovation variance."""
    if rows < 1 or cols < 1:
        raise ValueError(f"texture size must be positive, got {rows}x{cols}")
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    return Frame(samples=_quantize(_texture(rows, cols, mean, variance, seed)))


def gen_rect_sequence(params: RectSceneParams) -> Tuple[Sequence, List[FlowField]]:
    """
    Render the moving-rectangle scene.

    The background is cut from one larger texture canvas so that pixels
    entering the frame are fresh draws of the same texture model. Ground
    truth for pair (k-1, k) is indexed on frame k: d_r where frame k shows the
    rectangle, d_b elsewhere.
    """
    k_last = params.frames - 1
    bdx, bdy = params.background_dx, params.background_dy
    canvas_h = params.height + k_last * abs(bdy)
    canvas_w = params.width + k_last * abs(bdx)
    seed_bg, seed_rect = _child_seeds(params.seed, 2)
    canvas = _quantize(_texture(canvas_h, canvas_w, params.background_mean, params.background_variance, seed_bg))
    rect = _quantize(_texture(params.rect_height, params.rect_width, params.rect_mean, params.rect_variance, seed_rect))

    off_x = k_last * bdx if bdx > 0 else 0
    off_y = k_last * bdy if bdy > 0 else 0
    frames = []
    truths = []
    for k in range(params.frames):
        top = off_y - k * bdy
        left = off_x - k * bdx
        image = canvas[top:top + params.height, left:left + params.width].copy()
        rx, ry = params.rect_origin(k)
        image[ry:ry + params.rect_height, rx:rx + params.rect_width] = rect
        frames.append(Frame(samples=image))
        if k > 0:
            dx = np.full((params.height, params.width), float(bdx))
            dy = np.full((params.height, params.width), float(bdy))
            dx[ry:ry + params.rect_height, rx:rx + params.rect_width] = params.rect_dx
            dy[ry:ry + params.rect_height, rx:rx + params.rect_width] = params.rect_dy
            truths.append(FlowField(dx=dx, dy=dy))

    logger.info(
        f"Synthesized {params.frames} frames {params.width}x{params.height}, "
        f"background d=({bdx},{bdy}), rectangle d=({params.rect_dx},{params.rect_dy})"
    )
    return Sequence(frames=frames), truths


def noise_variance(signal_variance: float, snr_db: float) -> float:
    """Noise variance giving ``snr_db`` for a signal of the given variance."""
    return signal_variance / 10.0 ** (snr_db / 10.0)


def add_noise(frame: Frame, snr_db: float, seed: int) -> Frame:
    """
    Add white Gaussian noise at the requested SNR; ``math.inf`` returns the frame unchanged.

    Raises:
        UndefinedSnrError: the frame is constant
    """
    if math.isinf(snr_db) and snr_db > 0:
        return frame
    signal = frame.as_float()
    variance = float(signal.var())
    if variance == 0:
        raise UndefinedSnrError("SNR is undefined for a constant frame")
    sigma = math.sqrt(noise_variance(variance, snr_db))
    noisy = signal + _rng(seed).normal(0.0, sigma, signal.shape)
    return Frame(samples=_quantize(noisy))


def add_noise_sequence(seq: Sequence, snr_db: float, seed: int) -> Sequence:
    """Noise every frame with an independent stream derived from ``seed``."""
    seeds = _child_seeds(seed, len(seq))
    return Sequence(frames=[add_noise(f, snr_db, s) for f, s in zip(seq.frames, seeds)])


def measured_snr_db(clean: Frame, noisy: Frame) -> float:
    """SNR of ``noisy`` against ``clean`` in dB."""
    signal = clean.as_float()
    error = noisy.as_float() - signal
    error_variance = float(error.var())
    if error_variance == 0:
        return math.inf
    return 10.0 * math.log10(float(signal.var()) / error_variance)
