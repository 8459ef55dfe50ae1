"""
``pelflow metrics``: evaluate stored flow fields.
"""
import logging

import click

from ..services.imgseq import load_flo, load_sequence
from ..services.metrics import evaluate
from ..services.reporting import format_table, write_table_csv
from .common import output_dir, pass_params, write_sidecar

logger = logging.getLogger(__name__)


@click.command("metrics")
@click.option("-f", "--frame", "frames", type=click.Path(exists=True, dir_okay=False), multiple=True, required=True,
              help="PGM frame, repeat in temporal order")
@click.option("--flow", "flows", type=click.Path(exists=True, dir_okay=False), multiple=True, required=True,
              help="Estimated .flo per frame pair, in order")
@click.option("--truth", "truths", type=click.Path(exists=True, dir_okay=False), multiple=True,
              help="Ground-truth .flo per frame pair; MSE and bias rows need it")
@click.option("--label", default="estimate", show_default=True, help="Column title in the table")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="metrics", show_default=True,
              help="Output directory")
@pass_params
def metrics_command(params: dict):
    """Write metrics.txt and metrics.csv for one set of flow fields."""
    seq = load_sequence(params["frames"])
    flows = [load_flo(p) for p in params["flows"]]
    truths = [load_flo(p) for p in params["truths"]] or None
    report = evaluate(seq, flows, truths)
    reports = {params["label"]: report}
    directory = output_dir(params["out_dir"])
    table = format_table(reports)
    (directory / "metrics.txt").write_text(table)
    write_table_csv(reports, directory / "metrics.csv")
    write_sidecar("metrics", params, directory)
    logger.info(f"Metrics written to {directory}")
    click.echo(table, nl=False)
