"""
``pelflow masks show``: print the neighborhood templates.
"""
import click

from ..services.masks import mask_set, render_mask


@click.group("masks")
def masks_group():
    """Neighborhood templates."""


@masks_group.command("show")
def show_command():
    """Print the nine masks in trial order as 3x3 grids (X working pixel, O neighbor)."""
    click.echo("\n\n".join(render_mask(m) for m in mask_set()))
