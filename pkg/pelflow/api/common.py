"""
Options and helpers shared by the subcommands.
"""
import functools
import logging
import math
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import click

from ..core.config import settings
from ..models.estimation import ALGORITHM_ORDER, EstimatorConfig, InitMode
from ..models.scene import RectSceneParams
from ..schemas.run import RunConfig

logger = logging.getLogger(__name__)

_SCENE_DEFAULTS = RectSceneParams.model_fields


def estimator_options(with_algorithm: bool = True):
    """Estimator flags; names mirror the symbols of the method."""

    def decorate(func):
        options = [
            click.option("--T", "dfd_threshold", type=float, default=settings.DFD_THRESHOLD, show_default=True,
                         help="|DFD| stop threshold T (gray levels)"),
            click.option("--T-move", "move_threshold", type=float, default=settings.MOVE_THRESHOLD, show_default=True,
                         help="Moving-area gate on |frame difference|"),
            click.option("--eps", "epsilon", type=float, default=settings.EPSILON, show_default=True,
                         help="Update-norm convergence threshold (pixels)"),
            click.option("--imax", "max_iterations", type=int, default=settings.MAX_ITERATIONS, show_default=True,
                         help="Iterations allowed per mask"),
            click.option("--mu", type=float, default=settings.WIENER_MU, show_default=True,
                         help="Wiener regularization parameter"),
            click.option("--init", "init_mode", type=click.Choice([m.value for m in InitMode]),
                         default=InitMode.CAUSAL.value, show_default=True, help="Initial displacement source"),
            click.option("--mask", "mask_ids", type=click.IntRange(0, 8), multiple=True,
                         help="Mask id to try, repeatable; overrides the variant's mask list"),
            click.option("--max-displacement", type=float, default=settings.MAX_DISPLACEMENT, show_default=True,
                         help="Infinity-norm bound aborting a mask trial (pixels)"),
            click.option("--workers", type=int, default=settings.WORKERS, show_default=True,
                         help="Worker processes; >1 forces zero initialization"),
        ]
        if with_algorithm:
            options.insert(0, click.option("--algo", "algorithm", type=click.Choice([a.value for a in ALGORITHM_ORDER]),
                                           default="lscrv2", show_default=True, help="Estimator variant"))
        for option in reversed(options):
            func = option(func)
        return func

    return decorate


def estimator_config(params: dict, algorithm: Optional[str] = None) -> EstimatorConfig:
    """EstimatorConfig from parsed CLI parameters."""
    return EstimatorConfig(
        algorithm=algorithm or params["algorithm"],
        dfd_threshold=params["dfd_threshold"],
        move_threshold=params["move_threshold"],
        epsilon=params["epsilon"],
        max_iterations=params["max_iterations"],
        mu=params["mu"],
        init_mode=params["init_mode"],
        mask_ids=list(params["mask_ids"]) or None,
        max_displacement=params["max_displacement"],
        workers=params["workers"],
    )


def scene_options(func):
    """Synthetic-scene flags, defaulting to the moving-rectangle experiment."""
    spec = [
        ("--width", "width", int), ("--height", "height", int),
        ("--rect-x", "rect_x", int), ("--rect-y", "rect_y", int),
        ("--rect-width", "rect_width", int), ("--rect-height", "rect_height", int),
        ("--bdx", "background_dx", int), ("--bdy", "background_dy", int),
        ("--rdx", "rect_dx", int), ("--rdy", "rect_dy", int),
        ("--mu1", "background_mean", float), ("--var1", "background_variance", float),
        ("--mu2", "rect_mean", float), ("--var2", "rect_variance", float),
        ("--frames", "frames", int),
    ]
    options = [
        click.option(flag, name, type=kind, default=_SCENE_DEFAULTS[name].default, show_default=True,
                     help=_SCENE_DEFAULTS[name].description)
        for flag, name, kind in spec
    ]
    options.append(click.option("--seed", type=int, default=settings.SEED, show_default=True, help="Scene PRNG seed"))
    options.append(click.option("--snr", "snr_db", type=float, default=math.inf, show_default=True,
                                help="Noise level in dB; inf leaves frames clean"))
    options.append(click.option("--noise-seed", type=int, default=None, help="Noise PRNG seed (default: seed + 1)"))
    for option in reversed(options):
        func = option(func)
    return func


def scene_params(params: dict) -> RectSceneParams:
    fields = {name: params[name] for name in RectSceneParams.model_fields if name in params}
    return RectSceneParams(**fields)


def noise_seed(params: dict) -> int:
    return params["noise_seed"] if params.get("noise_seed") is not None else params["seed"] + 1


def write_sidecar(command: str, params: dict, directory: Path) -> Path:
    """Record the effective parameters next to the outputs."""
    path = RunConfig.from_params(command, params).write(directory / settings.SIDECAR_NAME)
    logger.info(f"Wrote run configuration {path}")
    return path


@contextmanager
def run_log(directory: Path):
    """Mirror log records into ``<directory>/run.log`` while the block runs."""
    handler = logging.FileHandler(directory / settings.RUN_LOG_NAME, mode="w")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    handler.setLevel(logging.INFO)
    root = logging.getLogger()
    previous_level = root.level
    root.addHandler(handler)
    if root.level > logging.INFO or root.level == logging.NOTSET:
        root.setLevel(logging.INFO)
    try:
        yield handler
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)
        handler.close()


def output_dir(path: str) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def pass_params(func):
    """Hand the command its resolved parameters as one dict."""

    @functools.wraps(func)
    def wrapper(**params):
        return func(params)

    return wrapper
