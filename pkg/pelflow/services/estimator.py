"""
Pel-recursive displacement estimation driver.

Per pixel: start from d0, linearize the DFD over a neighborhood mask, choose
Lambda per variant, apply the regularized update and repeat until the update
is small and both the DFD at the working pixel and the neighborhood's residual
DFD level are below threshold. Multi-mask variants move to the next mask when
a mask runs out of iterations or stalls. Causal initialization only inherits
vectors from neighbors that converged.
"""
import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from ..core.errors import ConfigError, DegenerateNeighborhoodError
from ..models.estimation import Algorithm, EstimatorConfig, FrameEstimate, InitMode, PixelResult, PixelStatus
from ..models.frame import FlowField, Frame, GradientField, Sequence, require_same_shape
from .interp import gradient_field, sample_array, stack_channels
from .masks import gather, get_mask
from .solver import assemble, solve_update

logger = logging.getLogger(__name__)


class PairContext:
    """Float views of one frame pair shared by every pixel of that pair."""

    def __init__(self, cur: Frame, prev: Frame, prev_grad: Optional[GradientField] = None):
        require_same_shape(cur, prev, what="frames")
        if prev_grad is None:
            prev_grad = gradient_field(prev)
        self.width = cur.width
        self.height = cur.height
        self.cur_f = cur.as_float()
        self.prev_f = prev.as_float()
        self.stacked = stack_channels(self.prev_f, prev_grad.gx, prev_grad.gy)

    def dfd(self, x: int, y: int, dx: float, dy: float) -> float:
        """I_k(x, y) - I_{k-1}(x - dx, y - dy) with clamped bilinear sampling."""
        w, h = self.width, self.height
        sx = min(max(x - dx, 0.0), w - 1.0)
        sy = min(max(y - dy, 0.0), h - 1.0)
        x0 = min(int(math.floor(sx)), max(w - 2, 0))
        y0 = min(int(math.floor(sy)), max(h - 2, 0))
        x1 = min(x0 + 1, w - 1)
        y1 = min(y0 + 1, h - 1)
        fx = sx - x0
        fy = sy - y0
        p = self.prev_f
        top = p[y0, x0] * (1.0 - fx) + p[y0, x1] * fx
        bottom = p[y1, x0] * (1.0 - fx) + p[y1, x1] * fx
        return float(self.cur_f[y, x] - (top * (1.0 - fy) + bottom * fy))

    def dfd_rms(self, xs: np.ndarray, ys: np.ndarray, dx: float, dy: float) -> float:
        """
        Residual DFD level of a neighborhood, sqrt(sum e^2 / (N - 2)).

        Two degrees of freedom are spent on the displacement itself.
        """
        errors = self.cur_f[ys, xs] - sample_array(self.prev_f, xs - dx, ys - dy)
        return math.sqrt(float(errors @ errors) / max(xs.shape[0] - 2, 1))


class PelRecursiveEstimator:
    """Estimator for one configuration."""

    def __init__(self, config: Optional[EstimatorConfig] = None):
        self.config = config or EstimatorConfig()
        self.masks = [get_mask(m) for m in self.config.resolved_mask_ids()]

    def _neighborhoods(self, ctx: PairContext, x: int, y: int) -> List[Tuple[int, np.ndarray, np.ndarray]]:
        found = []
        for mask in self.masks:
            try:
                positions = gather(mask, (x, y), ctx.width, ctx.height)
            except DegenerateNeighborhoodError:
                logger.debug(f"mask {mask.id} degenerate at ({x},{y})")
                continue
            xs = np.fromiter((p[0] for p in positions), dtype=np.intp, count=len(positions))
            ys = np.fromiter((p[1] for p in positions), dtype=np.intp, count=len(positions))
            found.append((mask.id, xs, ys))
        return found

    def estimate_pixel_in(self, ctx: PairContext, x: int, y: int, d0: Tuple[float, float]) -> PixelResult:
        """
        Run the per-pixel recursion inside a prepared pair context.

        A displacement is accepted when the update is at most ``epsilon``, the
        pixel's |DFD| is below ``dfd_threshold`` and so is the neighborhood
        level from ``dfd_rms``. The initial estimate is checked the same way
        against the first usable mask before any iteration runs.
        """
        cfg = self.config
        threshold = cfg.dfd_threshold
        dx0, dy0 = float(d0[0]), float(d0[1])
        neighborhoods = self._neighborhoods(ctx, x, y)

        abs_start = abs(ctx.dfd(x, y, dx0, dy0))
        if abs_start < threshold:
            if not neighborhoods or ctx.dfd_rms(neighborhoods[0][1], neighborhoods[0][2], dx0, dy0) < threshold:
                return PixelResult(dx0, dy0, PixelStatus.CONVERGED, -1, 0, abs_start)

        abs_zero = abs_start if (dx0, dy0) == (0.0, 0.0) else abs(ctx.dfd(x, y, 0.0, 0.0))
        best: Optional[Tuple[float, float, float, int]] = None
        iterations = 0
        source = ""

        for mask_id, xs, ys in neighborhoods:
            dx, dy = dx0, dy0
            for _ in range(cfg.max_iterations):
                system = assemble(ctx.stacked, ctx.cur_f, xs, ys, dx, dy)
                update, reg = solve_update(system, cfg.algorithm, cfg.mu, cfg.search)
                iterations += 1
                source = reg.source
                nx, ny = dx + update.ux, dy + update.uy
                if max(abs(nx), abs(ny)) > cfg.max_displacement:
                    break
                abs_new = abs(ctx.dfd(x, y, nx, ny))
                if best is None or abs_new < best[2]:
                    best = (nx, ny, abs_new, mask_id)
                small = update.norm <= cfg.epsilon
                if small and abs_new < threshold and ctx.dfd_rms(xs, ys, nx, ny) < threshold:
                    return PixelResult(nx, ny, PixelStatus.CONVERGED, mask_id, iterations, abs_new, source)
                # a small but rejected update ends this mask
                if small or (nx == dx and ny == dy):
                    break
                dx, dy = nx, ny

        if cfg.retain_best and best is not None and best[2] < abs_zero:
            return PixelResult(best[0], best[1], PixelStatus.FALLBACK_ZERO, best[3], iterations, best[2], source)
        return PixelResult(0.0, 0.0, PixelStatus.FALLBACK_ZERO, -1, iterations, abs_zero, source)

    def estimate_pixel(self, cur: Frame, prev: Frame, prev_grad: Optional[GradientField],
                       r: Tuple[int, int], d0: Tuple[float, float] = (0.0, 0.0)) -> PixelResult:
        """Estimate the displacement of a single pixel ``r``."""
        x, y = r
        if not (0 <= x < cur.width and 0 <= y < cur.height):
            raise ConfigError(f"pixel ({x},{y}) outside {cur.width}x{cur.height} frame")
        return self.estimate_pixel_in(PairContext(cur, prev, prev_grad), x, y, d0)

    def _effective_init(self, prior: Optional[FlowField]) -> InitMode:
        mode = self.config.init_mode
        if mode is InitMode.EXTERNAL and prior is None:
            raise ConfigError("init_mode 'external' needs a prior flow field")
        if mode is InitMode.CAUSAL and self.config.workers > 1:
            logger.warning("parallel estimation reads no neighbor results; causal init replaced by zero init")
            return InitMode.ZERO
        return mode

    def _estimate_rows(self, ctx: PairContext, moving: np.ndarray, y_start: int, y_stop: int,
                       mode: InitMode, prior: Optional[FlowField]):
        rows = y_stop - y_start
        dx = np.zeros((rows, ctx.width))
        dy = np.zeros((rows, ctx.width))
        status = np.full((rows, ctx.width), PixelStatus.STATIC, dtype=np.uint8)
        sources: Counter = Counter()
        iterations = 0
        for y in range(y_start, y_stop):
            row = y - y_start
            for x in range(ctx.width):
                if not moving[y, x]:
                    continue
                if mode is InitMode.EXTERNAL:
                    d0 = prior.vector_at(x, y)
                elif mode is InitMode.CAUSAL:
                    if x > 0 and status[row, x - 1] == PixelStatus.CONVERGED:
                        d0 = (dx[row, x - 1], dy[row, x - 1])
                    elif row > 0 and status[row - 1, x] == PixelStatus.CONVERGED:
                        d0 = (dx[row - 1, x], dy[row - 1, x])
                    else:
                        d0 = (0.0, 0.0)
                else:
                    d0 = (0.0, 0.0)
                result = self.estimate_pixel_in(ctx, x, y, d0)
                dx[row, x] = result.dx
                dy[row, x] = result.dy
                status[row, x] = result.status
                iterations += result.iterations
                if result.lambda_source:
                    sources[result.lambda_source] += 1
        return dx, dy, status, sources, iterations

    def estimate_frame_pair(self, cur: Frame, prev: Frame, prior: Optional[FlowField] = None) -> FrameEstimate:
        """
        Estimate the flow from ``prev`` to ``cur`` in raster order.

        Pixels whose frame difference is at most the moving-area threshold
        are static and keep d = (0, 0).
        """
        started = time.perf_counter()
        require_same_shape(cur, prev, what="frames")
        if prior is not None:
            require_same_shape(cur, prior, what="frames and prior flow")
        mode = self._effective_init(prior)
        ctx = PairContext(cur, prev)
        moving = np.abs(ctx.cur_f - ctx.prev_f) > self.config.move_threshold

        if self.config.workers > 1 and ctx.height > 1:
            bands = np.array_split(np.arange(ctx.height), min(self.config.workers, ctx.height))
            jobs = [(self.config, cur, prev, int(b[0]), int(b[-1]) + 1, mode, prior) for b in bands if b.size]
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                parts = list(pool.map(_estimate_band, jobs))
        else:
            parts = [self._estimate_rows(ctx, moving, 0, ctx.height, mode, prior)]

        dx = np.vstack([p[0] for p in parts])
        dy = np.vstack([p[1] for p in parts])
        status = np.vstack([p[2] for p in parts])
        sources: Counter = Counter()
        for p in parts:
            sources.update(p[3])
        estimate = FrameEstimate(
            flow=FlowField(dx=dx, dy=dy),
            status=status,
            lambda_sources=dict(sorted(sources.items())),
            iterations=sum(p[4] for p in parts),
            seconds=time.perf_counter() - started,
        )
        self._log_summary(estimate)
        return estimate

    def estimate_sequence(self, seq: Sequence, priors: Optional[List[FlowField]] = None) -> List[FrameEstimate]:
        """Estimate every consecutive pair independently; returns K - 1 estimates."""
        if priors is not None and len(priors) != len(seq) - 1:
            raise ConfigError(f"{len(priors)} prior fields for {len(seq) - 1} frame pairs")
        estimates = []
        for k, (prev, cur) in enumerate(seq.pairs()):
            prior = priors[k] if priors is not None else None
            estimates.append(self.estimate_frame_pair(cur, prev, prior))
        return estimates

    def _log_summary(self, estimate: FrameEstimate) -> None:
        counts = estimate.status_counts()
        logger.info(
            f"{self.config.algorithm.value}: {counts} iterations={estimate.iterations} "
            f"lambda={estimate.lambda_sources} {estimate.seconds:.2f}s"
        )
        algorithm = self.config.algorithm
        if algorithm is not Algorithm.WIENER:
            fallback_sources = ("gcv_scalar", "wiener") if algorithm.diagonal else ("wiener",)
            fallbacks = sum(estimate.lambda_sources.get(s, 0) for s in fallback_sources)
            if fallbacks:
                logger.warning(f"{algorithm.value}: GCV fell back at {fallbacks} pixels")


def _estimate_band(job: Tuple) -> Tuple:
    """Worker entry point: estimate rows [y_start, y_stop) of one pair in a child process."""
    config, cur, prev, y_start, y_stop, mode, prior = job
    estimator = PelRecursiveEstimator(config)
    ctx = PairContext(cur, prev)
    moving = np.abs(ctx.cur_f - ctx.prev_f) > config.move_threshold
    return estimator._estimate_rows(ctx, moving, y_start, y_stop, mode, prior)


def estimate_pixel(cur: Frame, prev: Frame, prev_grad: Optional[GradientField], r: Tuple[int, int],
                   d0: Tuple[float, float], cfg: EstimatorConfig) -> PixelResult:
    """Displacement, status and bookkeeping for the single pixel ``r`` started at ``d0``."""
    return PelRecursiveEstimator(cfg).estimate_pixel(cur, prev, prev_grad, r, d0)


def estimate_frame_pair(cur: Frame, prev: Frame, cfg: EstimatorConfig,
                        prior: Optional[FlowField] = None) -> Tuple[FlowField, np.ndarray]:
    """
    Dense flow from ``prev`` to ``cur`` and the per-pixel status map.

    Use ``PelRecursiveEstimator.estimate_frame_pair`` to also get the lambda
    sources, iteration count and timing.
    """
    estimate = PelRecursiveEstimator(cfg).estimate_frame_pair(cur, prev, prior)
    return estimate.flow, estimate.status


def estimate_sequence(seq: Sequence, cfg: EstimatorConfig) -> List[FlowField]:
    """One flow field per consecutive pair of ``seq``."""
    return [e.flow for e in PelRecursiveEstimator(cfg).estimate_sequence(seq)]
