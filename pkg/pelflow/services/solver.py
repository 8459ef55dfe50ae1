"""
Per-pixel linear systems and their regularized solutions.

The observation model is z = G u + n with z_i = I_{k-1}(p_i - d) - I_k(p_i),
the negated displaced frame difference, and G's rows the gradients of
I_{k-1} at p_i - d. With that pairing a positive update moves d towards the
true displacement.

Every GCV evaluation goes through the 2x2 normal matrix; the N x N influence
matrix A = G (G^T G + Lambda)^-1 G^T is never formed.
"""
import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from ..core.errors import DegenerateSystemError, MinimizerFailureError, SingularSystemError
from ..models.estimation import Algorithm, SearchConfig
from ..models.frame import Frame, GradientField
from ..models.system import LinearSystem, NormalStats, RegMatrix, UpdateVector
from .interp import sample_channels, stack_channels

logger = logging.getLogger(__name__)

DEFAULT_SEARCH = SearchConfig()
DET_GUARD = 1e-12
MIN_OBSERVATIONS = 3

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def assemble(stacked_prev: np.ndarray, cur_f: np.ndarray, xs: np.ndarray, ys: np.ndarray,
             dx: float, dy: float) -> LinearSystem:
    """
    Build (G, z) from a stacked [I_{k-1}, gx, gy] array.

    Args:
        stacked_prev: (height, width, 3) array from ``stack_channels``
        cur_f: current frame as float64
        xs, ys: integer neighborhood positions
        dx, dy: current displacement estimate d^i
    """
    if xs.shape[0] < MIN_OBSERVATIONS:
        raise DegenerateSystemError(f"{xs.shape[0]} observations, need at least {MIN_OBSERVATIONS}")
    sampled = sample_channels(stacked_prev, xs - dx, ys - dy)
    z = sampled[:, 0] - cur_f[ys, xs]
    return LinearSystem(G=np.ascontiguousarray(sampled[:, 1:]), z=z)


def build_system(cur: Frame, prev_grad: GradientField, prev: Frame, r: Tuple[int, int],
                 d_i: Tuple[float, float], positions: List[Tuple[int, int]]) -> LinearSystem:
    """Stack the linearized observation equations of every neighborhood position around ``r``."""
    if len(positions) < MIN_OBSERVATIONS:
        raise DegenerateSystemError(
            f"neighborhood of ({r[0]},{r[1]}) has {len(positions)} positions, need at least {MIN_OBSERVATIONS}"
        )
    stacked = stack_channels(prev.as_float(), prev_grad.gx, prev_grad.gy)
    xs = np.array([p[0] for p in positions], dtype=np.intp)
    ys = np.array([p[1] for p in positions], dtype=np.intp)
    return assemble(stacked, cur.as_float(), xs, ys, float(d_i[0]), float(d_i[1]))


def _closed_form(st: NormalStats, lam1, lam2):
    """
    Update, residual energy and Tr{I - A} for Lambda = diag(lam1, lam2).

    Works elementwise on floats or numpy arrays. The expressions are written
    so that swapping the two unknowns swaps the results bit-exactly.
    """
    p = st.a + lam1
    q = st.c + lam2
    det = p * q - st.b * st.b
    u1 = (q * st.h1 - st.b * st.h2) / det
    u2 = (p * st.h2 - st.b * st.h1) / det
    # (G^T G + Lambda) u = G^T z  gives  u^T G^T G u = u^T G^T z - u^T Lambda u
    residual = st.zz - (st.h1 * u1 + st.h2 * u2) - (lam1 * u1 * u1 + lam2 * u2 * u2)
    residual = np.maximum(residual, 0.0)
    trace_a = ((q * st.a + p * st.c) - 2.0 * st.b * st.b) / det
    return u1, u2, residual, st.n - trace_a


def _gcv(st: NormalStats, lam1, lam2):
    _, _, residual, trace = _closed_form(st, lam1, lam2)
    return (residual / st.n) / ((trace / st.n) ** 2)


def rls_solve(sys: LinearSystem, reg: RegMatrix) -> UpdateVector:
    """
    Regularized least squares u = (G^T G + Lambda)^-1 G^T z.

    Raises:
        SingularSystemError: the 2x2 normal matrix is numerically singular
    """
    st = sys.stats
    p = st.a + reg.lam1
    q = st.c + reg.lam2
    det = p * q - st.b * st.b
    norm = math.sqrt(p * p + 2.0 * st.b * st.b + q * q)
    if not det > DET_GUARD * norm:
        raise SingularSystemError(f"singular normal matrix (det={det:.3e}, lambda=({reg.lam1}, {reg.lam2}))")
    return UpdateVector((q * st.h1 - st.b * st.h2) / det, (p * st.h2 - st.b * st.h1) / det)


def wiener_solve(sys: LinearSystem, mu: float = 50.0) -> UpdateVector:
    """Fixed-parameter solution with Lambda = mu I."""
    return rls_solve(sys, RegMatrix.scalar(mu, "wiener"))


def influence_stats(sys: LinearSystem, reg: RegMatrix) -> Tuple[float, float]:
    """Return ||(I - A) z||^2 and Tr{I - A} for the given Lambda."""
    _, _, residual, trace = _closed_form(sys.stats, reg.lam1, reg.lam2)
    return float(residual), float(trace)


def leverages(sys: LinearSystem, reg: RegMatrix) -> np.ndarray:
    """Diagonal a_ii of the influence matrix."""
    st = sys.stats
    p = st.a + reg.lam1
    q = st.c + reg.lam2
    det = p * q - st.b * st.b
    gx = sys.G[:, 0]
    gy = sys.G[:, 1]
    return (q * gx * gx - 2.0 * st.b * gx * gy + p * gy * gy) / det


def gcv_value(sys: LinearSystem, reg: RegMatrix) -> float:
    """
    Generalized cross-validation score of Lambda.

    Raises:
        MinimizerFailureError: the score is not finite
    """
    with np.errstate(all="ignore"):
        value = float(_gcv(sys.stats, reg.lam1, reg.lam2))
    if not math.isfinite(value):
        raise MinimizerFailureError(f"non-finite GCV at lambda=({reg.lam1}, {reg.lam2})")
    return value


def _gcv_at(st: NormalStats, lam1: float, lam2: float) -> float:
    """Scalar GCV on plain floats; non-finite scores map to +inf."""
    p = st.a + lam1
    q = st.c + lam2
    det = p * q - st.b * st.b
    try:
        u1 = (q * st.h1 - st.b * st.h2) / det
        u2 = (p * st.h2 - st.b * st.h1) / det
        residual = max(st.zz - (st.h1 * u1 + st.h2 * u2) - (lam1 * u1 * u1 + lam2 * u2 * u2), 0.0)
        trace = st.n - ((q * st.a + p * st.c) - 2.0 * st.b * st.b) / det
        value = (residual / st.n) / ((trace / st.n) ** 2)
    except (ZeroDivisionError, OverflowError):
        return math.inf
    return value if math.isfinite(value) else math.inf


def _clamp_lambda(lam: float, search: SearchConfig) -> float:
    return min(max(lam, search.lambda_min), search.lambda_max)


def _golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> Tuple[float, float]:
    """Golden-section search on [a, b]; returns the best evaluated (x, f(x))."""
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    steps = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI_SQ * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    best = (c, yc) if yc <= yd else (d, yd)
    for _ in range(steps - 1):
        if yc < yd:
            b = d
            d, yd = c, yc
            h *= _INV_PHI
            c = a + _INV_PHI_SQ * h
            yc = f(c)
            if yc < best[1]:
                best = (c, yc)
        else:
            a = c
            c, yc = d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
            if yd < best[1]:
                best = (d, yd)
    return best


def minimize_gcv_scalar(sys: LinearSystem, search: SearchConfig = DEFAULT_SEARCH) -> RegMatrix:
    """
    GCV-optimal Lambda = lambda I.

    A coarse log-spaced grid is scanned first. When several grid points tie
    within ``tie_rtol`` the largest lambda wins and no refinement is done.
    A unique minimum on the upper edge of the box leaves no bracket to refine
    and is reported as a failure; otherwise golden-section search refines
    between the grid neighbours of the best point.

    Raises:
        MinimizerFailureError: no finite GCV value, or an empty bracket
    """
    st = sys.stats
    grid = np.linspace(math.log(search.lambda_min), math.log(search.lambda_max), search.grid_points)
    lambdas = np.clip(np.exp(grid), search.lambda_min, search.lambda_max)
    with np.errstate(all="ignore"):
        values = np.asarray(_gcv(st, lambdas, lambdas), dtype=np.float64)
    values = np.where(np.isfinite(values), values, np.inf)
    best_value = float(values.min())
    if not math.isfinite(best_value):
        raise MinimizerFailureError("GCV is not finite anywhere in the search box")

    ties = np.flatnonzero(values <= best_value + search.tie_rtol * abs(best_value))
    index = int(ties[-1])
    if ties.shape[0] > 1:
        return RegMatrix.scalar(float(lambdas[index]), "gcv_scalar")
    last = grid.shape[0] - 1
    if index == last:
        raise MinimizerFailureError(f"GCV still decreasing at lambda_max={search.lambda_max:g}, empty bracket")

    def along(t: float) -> float:
        lam = _clamp_lambda(math.exp(t), search)
        return _gcv_at(st, lam, lam)

    t, value = _golden_section(along, float(grid[max(index - 1, 0)]), float(grid[index + 1]), search.golden_tol)
    if value < best_value:
        return RegMatrix.scalar(_clamp_lambda(math.exp(t), search), "gcv_scalar")
    return RegMatrix.scalar(float(lambdas[index]), "gcv_scalar")


def _descend_diagonal(sys: LinearSystem, start: RegMatrix, search: SearchConfig) -> RegMatrix:
    """
    Alternating golden-section search over (lam1, lam2) from a scalar start.

    Each sweep minimizes over the whole log box along one coordinate with the
    other held fixed, then along the other. A move is kept only when it lowers
    GCV. The coordinate with the larger column energy goes first, so swapping
    the two unknowns swaps the result.
    """
    st = sys.stats
    lo, hi = math.log(search.lambda_min), math.log(search.lambda_max)
    lams = [start.lam1, start.lam2]
    current = _gcv_at(st, lams[0], lams[1])
    if not math.isfinite(current):
        raise MinimizerFailureError(f"non-finite GCV at the scalar start {start.lam1}")
    order = (0, 1) if st.a >= st.c else (1, 0)

    for _ in range(search.sweeps):
        sweep_start = current
        for axis in order:
            def along(t: float, axis: int = axis) -> float:
                trial = list(lams)
                trial[axis] = _clamp_lambda(math.exp(t), search)
                return _gcv_at(st, trial[0], trial[1])

            t, value = _golden_section(along, lo, hi, search.golden_tol)
            if value < current:
                current = value
                lams[axis] = _clamp_lambda(math.exp(t), search)
        if not current < sweep_start:
            break
        if (sweep_start - current) / max(abs(sweep_start), 1e-300) < search.sweep_tol:
            break
    return RegMatrix(lams[0], lams[1], "gcv_diag")


def minimize_gcv_diag(sys: LinearSystem, search: SearchConfig = DEFAULT_SEARCH) -> RegMatrix:
    """
    GCV-optimal Lambda = diag(lam1, lam2).

    Falls back to the scalar optimum when the diagonal search fails, and to
    the Wiener matrix ``fallback_mu * I`` when the scalar search fails too.
    """
    try:
        start = minimize_gcv_scalar(sys, search)
    except MinimizerFailureError as e:
        logger.debug(f"scalar GCV failed, using Wiener fallback: {e}")
        return RegMatrix.scalar(search.fallback_mu, "wiener")
    try:
        return _descend_diagonal(sys, start, search)
    except MinimizerFailureError as e:
        logger.debug(f"diagonal GCV failed, using scalar optimum: {e}")
        return start


def select_regularization(sys: LinearSystem, algorithm: Algorithm, mu: float,
                          search: SearchConfig = DEFAULT_SEARCH) -> RegMatrix:
    """Lambda for one system according to the estimator variant."""
    if algorithm is Algorithm.WIENER:
        return RegMatrix.scalar(mu, "wiener")
    if algorithm.diagonal:
        return minimize_gcv_diag(sys, search)
    try:
        return minimize_gcv_scalar(sys, search)
    except MinimizerFailureError as e:
        logger.debug(f"scalar GCV failed, using Wiener fallback: {e}")
        return RegMatrix.scalar(search.fallback_mu, "wiener")


def solve_update(sys: LinearSystem, algorithm: Algorithm, mu: float,
                 search: SearchConfig = DEFAULT_SEARCH) -> Tuple[UpdateVector, RegMatrix]:
    """Choose Lambda and solve; a singular GCV matrix drops to the Wiener rung."""
    reg = select_regularization(sys, algorithm, mu, search)
    try:
        return rls_solve(sys, reg), reg
    except SingularSystemError:
        if reg.source == "wiener" and reg.lam1 == search.fallback_mu:
            raise
        fallback = RegMatrix.scalar(search.fallback_mu, "wiener")
        return rls_solve(sys, fallback), fallback
