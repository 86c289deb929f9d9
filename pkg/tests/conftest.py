import math

import numpy as np
import pytest

from app.config import PROJECT_ROOT, config
from app.geometry.curves import Disk, SuperEllipse
from app.geometry.field import DampingField
from app.geometry.polygon import Polygon
from app.geometry.shapes import Strip


SCENES = PROJECT_ROOT / "config" / "scenes"
DISK_RADIUS = 1.0 / (2.0 * math.sqrt(2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scenes_dir():
    return SCENES


@pytest.fixture
def disk():
    """Disk of diameter 1/sqrt(2) centred in the unit square."""
    return Disk(center=(0.5, 0.5), radius=DISK_RADIUS)


@pytest.fixture
def disk_field(disk):
    return DampingField(shape=disk, beta=9.0, name="disk")


@pytest.fixture
def strip():
    return Strip(normal=(1, 0), lo=0.25, hi=0.75)


@pytest.fixture
def square():
    return Polygon.square((0.5, 0.5), 0.5)


@pytest.fixture
def rotated_square():
    return Polygon.square((0.5, 0.5), 0.5, math.radians(30.0))


@pytest.fixture
def superellipse():
    return SuperEllipse(center=(0.5, 0.5), a=0.3, b=0.3, m=4, n=4)


@pytest.fixture
def fast_settings():
    """Coarser grids for the numerical modules."""
    return config.override(
        {
            "resolvent.grid_size": 256,
            "resolvent.coarse_points": 40,
            "simulation.grid_size": 32,
            "simulation.final_time": 1.0,
            "genericity.curve_samples": 512,
            "genericity.max_refinements": 3,
        }
    )
