import numpy as np
import pytest

from coverplan import (
    MissionSpace,
    Polygon,
    QuadratureGrid,
    SensorModel,
    UniformDensity,
    candidate_lattice,
)


@pytest.fixture(scope="session")
def empty_rect():
    """20 x 10 rectangle, no obstacles."""
    return MissionSpace(Polygon([(0, 0), (20, 0), (20, 10), (0, 10)]))


@pytest.fixture(scope="session")
def one_block():
    """20 x 10 rectangle with a centered square obstacle."""
    return MissionSpace(
        Polygon([(0, 0), (20, 0), (20, 10), (0, 10)]),
        [Polygon([(8, 3), (12, 3), (12, 7), (8, 7)])],
    )


@pytest.fixture(scope="session")
def lshape():
    """Non-convex boundary: a 20 x 10 rectangle with the top-right quarter missing."""
    return MissionSpace(Polygon([(0, 0), (20, 0), (20, 5), (10, 5), (10, 10), (0, 10)]))


def make_problem(space, cell_size=1.0, decay=0.1, radius=30.0, spacing=4.0):
    grid = QuadratureGrid(space, cell_size, UniformDensity())
    sensor = SensorModel(decay=decay, radius=radius)
    cand = candidate_lattice(space, spacing)
    return grid, sensor, cand


@pytest.fixture(scope="session")
def block_problem(one_block):
    grid, sensor, cand = make_problem(one_block)
    return one_block, grid, sensor, cand


def random_space(rng, with_obstacle=True):
    """A small random rectangle, optionally holding one random convex obstacle."""
    w = float(rng.uniform(10, 24))
    h = float(rng.uniform(8, 16))
    boundary = Polygon([(0, 0), (w, 0), (w, h), (0, h)])
    obstacles = []
    if with_obstacle:
        cx = float(rng.uniform(0.3 * w, 0.7 * w))
        cy = float(rng.uniform(0.3 * h, 0.7 * h))
        rx = float(rng.uniform(0.08, 0.18) * w)
        ry = float(rng.uniform(0.08, 0.18) * h)
        obstacles.append(
            Polygon([(cx - rx, cy - ry), (cx + rx, cy - ry), (cx + rx, cy + ry), (cx - rx, cy + ry)])
        )
    return MissionSpace(boundary, obstacles)
