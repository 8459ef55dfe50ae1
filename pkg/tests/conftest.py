"""
Shared fixtures: small frames with known motion and a tiny synthetic scene.
"""
import numpy as np
import pytest

from pelflow.models.frame import Frame
from pelflow.models.scene import RectSceneParams
from tests.helpers import smooth_pattern


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def shifted_pair():
    """(prev, cur) where cur shows prev's content moved by (1, 0)."""
    prev = Frame(samples=smooth_pattern(24, 20))
    cur = Frame(samples=smooth_pattern(24, 20, shift_x=1.0))
    return prev, cur


@pytest.fixture
def tiny_scene():
    return RectSceneParams(
        width=24, height=20,
        rect_x=9, rect_y=7, rect_width=6, rect_height=6,
        background_dx=2, background_dy=0, rect_dx=1, rect_dy=1,
        frames=2, seed=11,
    )
