"""
``pelflow estimate``: flow fields for a user-supplied sequence.
"""
import logging
import time

import click

from ..services.estimator import PelRecursiveEstimator
from ..services.imgseq import load_flo, load_sequence, save_flo, save_flow_csv, save_pgm
from ..services.metrics import evaluate
from ..services.reporting import format_table, status_map_frame
from .common import estimator_config, estimator_options, output_dir, pass_params, run_log, write_sidecar

logger = logging.getLogger(__name__)


@click.command("estimate")
@click.option("-f", "--frame", "frames", type=click.Path(exists=True, dir_okay=False), multiple=True, required=True,
              help="PGM frame, repeat in temporal order (at least two)")
@click.option("--truth", "truths", type=click.Path(exists=True, dir_okay=False), multiple=True,
              help="Ground-truth .flo per frame pair, for MSE/bias in the log")
@estimator_options(with_algorithm=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="estimate", show_default=True,
              help="Output directory")
@pass_params
def estimate_command(params: dict):
    """
    Estimate one flow field per consecutive frame pair.

    Writes flow_NNNN.flo and .csv, status_NNNN.pgm (static black, fallback
    gray, converged white), run.log and run.cfg.
    """
    if len(params["frames"]) < 2:
        raise click.UsageError("estimate needs at least two --frame inputs")
    directory = output_dir(params["out_dir"])
    config = estimator_config(params)
    with run_log(directory):
        seq = load_sequence(params["frames"])
        truths = [load_flo(p) for p in params["truths"]] or None
        started = time.perf_counter()
        estimates = PelRecursiveEstimator(config).estimate_sequence(seq)
        logger.info(f"{config.algorithm.label} finished {len(estimates)} pairs in {time.perf_counter() - started:.2f}s")
        for k, estimate in enumerate(estimates, start=1):
            save_flo(estimate.flow, directory / f"flow_{k:04d}.flo")
            save_flow_csv(estimate.flow, directory / f"flow_{k:04d}.csv")
            save_pgm(status_map_frame(estimate.status), directory / f"status_{k:04d}.pgm")
        report = evaluate(seq, [e.flow for e in estimates], truths)
        table = format_table({config.algorithm.label: report})
        logger.info(f"Metrics:\n{table}")
    write_sidecar("estimate", params, directory)
    click.echo(table, nl=False)
