"""
``pelflow compare``: run every variant on the same inputs and tabulate.
"""
import logging
import math
import time

import click

from ..models.estimation import ALGORITHM_ORDER
from ..services.estimator import PelRecursiveEstimator
from ..services.imgseq import load_flo, load_sequence, save_flo, save_flow_csv, save_pgm, save_sequence
from ..services.metrics import evaluate
from ..services.reporting import (
    compensated_frame,
    error_map,
    format_table,
    status_map_frame,
    write_per_frame_imc_csv,
    write_table_csv,
)
from ..services.synth import add_noise_sequence, gen_rect_sequence
from .common import (
    estimator_config,
    estimator_options,
    noise_seed,
    output_dir,
    pass_params,
    run_log,
    scene_options,
    scene_params,
    write_sidecar,
)

logger = logging.getLogger(__name__)


def _inputs(params: dict, directory):
    """Frames and optional truth: user files when given, the synthetic scene otherwise."""
    if params["frame_paths"]:
        if len(params["frame_paths"]) < 2:
            raise click.UsageError("compare needs at least two --frame inputs")
        seq = load_sequence(params["frame_paths"])
        truths = [load_flo(p) for p in params["truths"]] or None
    else:
        seq, truths = gen_rect_sequence(scene_params(params))
    if math.isfinite(params["snr_db"]):
        seq = add_noise_sequence(seq, params["snr_db"], noise_seed(params))
    save_sequence(seq, directory / "frames", "frame")
    if truths:
        for k, truth in enumerate(truths, start=1):
            save_flo(truth, directory / "frames" / f"truth_{k:04d}.flo")
    return seq, truths


@click.command("compare")
@click.option("-f", "--frame", "frame_paths", type=click.Path(exists=True, dir_okay=False), multiple=True,
              help="PGM frame, repeat in temporal order; omit to use the synthetic scene")
@click.option("--truth", "truths", type=click.Path(exists=True, dir_okay=False), multiple=True,
              help="Ground-truth .flo per pair for user frames")
@scene_options
@estimator_options(with_algorithm=False)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="compare", show_default=True,
              help="Output directory")
@pass_params
def compare_command(params: dict):
    """
    Compare the Wiener baseline with the four GCV variants.

    Writes table.txt, table.csv, imc_per_frame.csv, and per variant its flow
    fields, status maps, motion-compensated frames and error maps.
    """
    directory = output_dir(params["out_dir"])
    with run_log(directory):
        seq, truths = _inputs(params, directory)
        reports = {}
        per_frame = {}
        for algorithm in ALGORITHM_ORDER:
            config = estimator_config(params, algorithm=algorithm.value)
            started = time.perf_counter()
            estimates = PelRecursiveEstimator(config).estimate_sequence(seq)
            logger.info(f"{algorithm.label} finished in {time.perf_counter() - started:.2f}s")

            variant_dir = output_dir(str(directory / algorithm.value))
            flows = [e.flow for e in estimates]
            for k, (estimate, (prev, cur)) in enumerate(zip(estimates, seq.pairs()), start=1):
                save_flo(estimate.flow, variant_dir / f"flow_{k:04d}.flo")
                save_flow_csv(estimate.flow, variant_dir / f"flow_{k:04d}.csv")
                save_pgm(status_map_frame(estimate.status), variant_dir / f"status_{k:04d}.pgm")
                save_pgm(error_map(cur, prev, estimate.flow), variant_dir / f"error_{k:04d}.pgm")
                save_pgm(compensated_frame(prev, estimate.flow), variant_dir / f"compensated_{k:04d}.pgm")
            report = evaluate(seq, flows, truths)
            reports[algorithm.label] = report
            per_frame[algorithm.label] = [p.imc_db for p in report.per_frame]

        table = format_table(reports)
        (directory / "table.txt").write_text(table)
        write_table_csv(reports, directory / "table.csv")
        write_per_frame_imc_csv(per_frame, directory / "imc_per_frame.csv")
        logger.info(f"Comparison:\n{table}")
    write_sidecar("compare", params, directory)
    click.echo(table, nl=False)
