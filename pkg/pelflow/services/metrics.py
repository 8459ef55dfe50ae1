"""
Flow-quality metrics: MSE, bias, mean squared (displaced) frame difference
and the improvement in motion compensation.

All sums run over the whole frame, borders and static pixels included.
Warping uses the same clamped bilinear sampler as the estimator.
"""
import math
from typing import List, Optional, Tuple

import numpy as np

from ..core.errors import DimensionMismatchError, UndefinedImcError
from ..models.frame import FlowField, Frame, Sequence, require_same_shape
from ..models.report import MetricsReport, PairMetrics
from .interp import dfd_map


def _check_flows(seq: Sequence, flows: List[FlowField]) -> None:
    if len(flows) != len(seq) - 1:
        raise DimensionMismatchError(f"{len(flows)} flow fields for {len(seq)} frames, expected {len(seq) - 1}")
    for flow in flows:
        require_same_shape(seq.frames[0], flow, what="frames and flow")


def mse(est: FlowField, truth: FlowField) -> Tuple[float, float]:
    """Mean squared component error over all pixels."""
    require_same_shape(est, truth, what="flow fields")
    return float(np.mean((truth.dx - est.dx) ** 2)), float(np.mean((truth.dy - est.dy) ** 2))


def bias(est: FlowField, truth: FlowField) -> Tuple[float, float]:
    """Mean signed error, true minus estimate."""
    require_same_shape(est, truth, what="flow fields")
    return float(np.mean(truth.dx - est.dx)), float(np.mean(truth.dy - est.dy))


def fd_energy(cur: Frame, prev: Frame) -> float:
    """Sum of squared plain frame differences over the frame."""
    require_same_shape(cur, prev, what="frames")
    diff = cur.as_float() - prev.as_float()
    return float(np.sum(diff * diff))


def dfd_energy(cur: Frame, prev: Frame, flow: FlowField) -> float:
    """Sum of squared displaced frame differences when ``prev`` is warped by ``flow``."""
    residual = dfd_map(cur, prev, flow)
    return float(np.sum(residual * residual))


def mean_sq_fd(cur: Frame, prev: Frame) -> float:
    """Mean squared frame difference of one pair."""
    return fd_energy(cur, prev) / (cur.width * cur.height)


def mean_sq_dfd(seq: Sequence, flows: List[FlowField]) -> float:
    """Mean squared displaced frame difference over the sequence."""
    _check_flows(seq, flows)
    height, width = seq.shape
    total = sum(dfd_energy(cur, prev, flow) for (prev, cur), flow in zip(seq.pairs(), flows))
    return total / (height * width * (len(seq) - 1))


def _imc(fd_total: float, dfd_total: float) -> float:
    if dfd_total == 0:
        if fd_total == 0:
            raise UndefinedImcError("frame and displaced frame differences are both zero")
        return math.inf
    if fd_total == 0:
        return -math.inf
    return 10.0 * math.log10(fd_total / dfd_total)


def pair_metrics(seq: Sequence, flows: List[FlowField]) -> List[PairMetrics]:
    """Frame and displaced frame energies of every pair."""
    _check_flows(seq, flows)
    rows = []
    for k, ((prev, cur), flow) in enumerate(zip(seq.pairs(), flows), start=1):
        fd = fd_energy(cur, prev)
        dfd_e = dfd_energy(cur, prev, flow)
        try:
            imc = _imc(fd, dfd_e)
        except UndefinedImcError:
            imc = math.nan
        rows.append(PairMetrics(pair=k, fd_energy=fd, dfd_energy=dfd_e, imc_db=imc))
    return rows


def per_frame_imc(seq: Sequence, flows: List[FlowField]) -> List[float]:
    """IMC of each consecutive pair in dB; NaN where undefined."""
    return [p.imc_db for p in pair_metrics(seq, flows)]


def imc_db(seq: Sequence, flows: List[FlowField]) -> float:
    """
    Sequence-level improvement in motion compensation in dB.

    Returns +inf on perfect registration.

    Raises:
        UndefinedImcError: both energies are zero
    """
    pairs = pair_metrics(seq, flows)
    return _imc(sum(p.fd_energy for p in pairs), sum(p.dfd_energy for p in pairs))


def evaluate(seq: Sequence, flows: List[FlowField], truth: Optional[List[FlowField]] = None) -> MetricsReport:
    """Assemble a MetricsReport; MSE and bias need ground truth."""
    pairs = pair_metrics(seq, flows)
    height, width = seq.shape
    pixels = height * width * (len(seq) - 1)
    fd_total = sum(p.fd_energy for p in pairs)
    dfd_total = sum(p.dfd_energy for p in pairs)
    report = dict(
        mean_sq_dfd=dfd_total / pixels,
        mean_sq_fd=fd_total / pixels,
        imc_db=_imc(fd_total, dfd_total),
        per_frame=pairs,
    )
    if truth is not None:
        if len(truth) != len(flows):
            raise DimensionMismatchError(f"{len(truth)} truth fields for {len(flows)} estimates")
        errors = [mse(e, t) for e, t in zip(flows, truth)]
        biases = [bias(e, t) for e, t in zip(flows, truth)]
        report.update(
            mse_x=float(np.mean([e[0] for e in errors])),
            mse_y=float(np.mean([e[1] for e in errors])),
            bias_x=float(np.mean([b[0] for b in biases])),
            bias_y=float(np.mean([b[1] for b in biases])),
        )
    return MetricsReport(**report)
