"""
``pelflow synth``: render the moving-rectangle scene with ground truth.
"""
import logging
import math

import click

from ..services.imgseq import save_flo, save_flow_csv, save_sequence
from ..services.synth import add_noise_sequence, gen_rect_sequence
from .common import noise_seed, output_dir, pass_params, scene_options, scene_params, write_sidecar

logger = logging.getLogger(__name__)


@click.command("synth")
@scene_options
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="synth", show_default=True,
              help="Output directory")
@pass_params
def synth_command(params: dict):
    """
    Write a synthetic sequence, its ground-truth flow and a run sidecar.

    Frames go to frame_NNNN.pgm, noisy copies (with --snr) to noisy_NNNN.pgm,
    and the truth of pair k to truth_NNNN.flo / truth_NNNN.csv.
    """
    directory = output_dir(params["out_dir"])
    seq, truths = gen_rect_sequence(scene_params(params))
    save_sequence(seq, directory, "frame")
    for k, truth in enumerate(truths, start=1):
        save_flo(truth, directory / f"truth_{k:04d}.flo")
        save_flow_csv(truth, directory / f"truth_{k:04d}.csv")
    if math.isfinite(params["snr_db"]):
        noisy = add_noise_sequence(seq, params["snr_db"], noise_seed(params))
        save_sequence(noisy, directory, "noisy")
    write_sidecar("synth", params, directory)
    logger.info(f"Synthetic scene written to {directory}")
    click.echo(str(directory))
