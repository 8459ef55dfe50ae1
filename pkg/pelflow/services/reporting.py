"""
Report writers: comparison tables, per-pair IMC CSV, error and status maps.
"""
import csv
import logging
import math
import os
from typing import Dict, List, Union

import numpy as np

from ..core.config import settings
from ..models.estimation import PixelStatus
from ..models.frame import FlowField, Frame
from ..models.report import MetricsReport
from .interp import dfd_map, warp_frame

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

INF_CSV_SENTINEL = 999.0

TABLE_ROWS = (
    ("MSE_x", "mse_x", "{:.4f}"),
    ("MSE_y", "mse_y", "{:.4f}"),
    ("bias_x", "bias_x", "{:.4f}"),
    ("bias_y", "bias_y", "{:.4f}"),
    ("IMC(dB)", "imc_db", "{:.2f}"),
    ("DFD^2", "mean_sq_dfd", "{:.3f}"),
)

_STATUS_LEVELS = {
    PixelStatus.STATIC: 0,
    PixelStatus.FALLBACK_ZERO: 128,
    PixelStatus.CONVERGED: 255,
}


def _rows_for(reports: Dict[str, MetricsReport]):
    with_truth = all(r.has_truth for r in reports.values())
    for title, attr, fmt in TABLE_ROWS:
        if attr in ("mse_x", "mse_y", "bias_x", "bias_y") and not with_truth:
            continue
        yield title, attr, fmt


def _text_cell(value: float, fmt: str) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return fmt.format(value)


def format_table(reports: Dict[str, MetricsReport]) -> str:
    """Fixed-width table, one column per label; MSE and bias rows need truth in every report."""
    labels = list(reports)
    width = max([10] + [len(label) + 2 for label in labels])
    lines = [f"{'':<10}" + "".join(f"{label:>{width}}" for label in labels)]
    for title, attr, fmt in _rows_for(reports):
        cells = "".join(f"{_text_cell(getattr(reports[label], attr), fmt):>{width}}" for label in labels)
        lines.append(f"{title:<10}{cells}")
    return "\n".join(lines) + "\n"


def _csv_value(value: float) -> str:
    if math.isinf(value):
        return repr(INF_CSV_SENTINEL if value > 0 else -INF_CSV_SENTINEL)
    return repr(float(value))


def write_table_csv(reports: Dict[str, MetricsReport], path: PathLike) -> None:
    """The comparison table as CSV, ``metric,<labels>``."""
    labels = list(reports)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", *labels])
        for title, attr, _ in _rows_for(reports):
            writer.writerow([title, *(_csv_value(getattr(reports[label], attr)) for label in labels)])


def write_per_frame_imc_csv(per_variant: Dict[str, List[float]], path: PathLike) -> None:
    """Per-pair IMC values, ``pair,<labels>``."""
    labels = list(per_variant)
    pairs = len(next(iter(per_variant.values()), []))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair", *labels])
        for k in range(pairs):
            writer.writerow([k + 1, *(_csv_value(per_variant[label][k]) for label in labels)])


def error_map(cur: Frame, prev: Frame, flow: FlowField, gain: float = settings.ERROR_MAP_GAIN) -> Frame:
    """Motion-compensation error image: |DFD| times ``gain``, clamped to [0, 255]."""
    magnitude = np.abs(dfd_map(cur, prev, flow)) * gain
    return Frame(samples=np.clip(np.rint(magnitude), 0, 255).astype(np.uint8))


def compensated_frame(prev: Frame, flow: FlowField) -> Frame:
    """Motion-compensated prediction of the current frame, quantized to 8 bits."""
    return Frame(samples=np.clip(np.rint(warp_frame(prev, flow)), 0, 255).astype(np.uint8))


def status_map_frame(status: np.ndarray) -> Frame:
    """Status codes as gray levels: static 0, fallback 128, converged 255."""
    lut = np.zeros(256, dtype=np.uint8)
    for code, level in _STATUS_LEVELS.items():
        lut[int(code)] = level
    return Frame(samples=lut[status.astype(np.uint8)])
