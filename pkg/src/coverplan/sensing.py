"""Sensor model, per-agent detection fields, and the joint coverage objective.

An agent at s detects an event at x with probability exp(-decay * |x - s|)
when x is visible from s (segment inside the feasible region, range at most
``radius``), and probability zero otherwise.  Agents detect independently, so
a team misses an event only when every member misses it, and the objective is
the density-weighted integral of the joint detection probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .field import QuadratureGrid
from .geometry import EPS, MissionSpace, as_points_array, as_xy, line_of_sight_many


@dataclass(frozen=True)
class SensorModel:
    """Exponential range decay with a hard visibility cutoff."""

    decay: float
    radius: float

    def __post_init__(self):
        if not np.isfinite(self.decay) or self.decay < 0:
            raise InvalidParameterError(f"decay must be finite and >= 0, got {self.decay}")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise InvalidParameterError(f"radius must be finite and > 0, got {self.radius}")


def detection_row(position, space: MissionSpace, targets, sensor: SensorModel) -> np.ndarray:
    """Detection probability of one agent against each target point."""
    pos = as_xy(position)
    pts = as_points_array(targets)
    d = np.linalg.norm(pts - pos[None, :], axis=1)
    vis = line_of_sight_many(pos, pts, space) & (d <= sensor.radius + EPS)
    row = np.zeros(len(pts))
    row[vis] = np.exp(-sensor.decay * d[vis])
    return row


def _per_agent_models(sensor, count: int) -> list[SensorModel]:
    if isinstance(sensor, SensorModel):
        return [sensor] * count
    models = list(sensor)
    if len(models) != count:
        raise InvalidParameterError(
            f"got {len(models)} sensor models for {count} positions"
        )
    return models


def detection_matrix(positions, space: MissionSpace, targets, sensor) -> np.ndarray:
    """Stack of detection rows, one per position: shape (n, T).

    ``sensor`` is a single model shared by every agent, or one model per
    agent for a mixed team.
    """
    pos = as_points_array(positions)
    pts = as_points_array(targets)
    models = _per_agent_models(sensor, len(pos))
    rows = np.empty((len(pos), len(pts)))
    for i in range(len(pos)):
        rows[i] = detection_row(pos[i], space, pts, models[i])
    return rows


class DetectionCache:
    """Distances and sight lines for fixed positions, reusable across sensor models.

    Line of sight does not depend on the sensor, so parameter sweeps over decay
    or radius only pay for the exponential, not for the geometry.
    """

    def __init__(self, positions, space: MissionSpace, targets):
        self.positions = as_points_array(positions)
        self.targets = as_points_array(targets)
        diff = self.targets[None, :, :] - self.positions[:, None, :]
        self.dist = np.linalg.norm(diff, axis=-1)  # (n, T)
        self.los = np.empty(self.dist.shape, dtype=bool)
        for i in range(len(self.positions)):
            self.los[i] = line_of_sight_many(self.positions[i], self.targets, space)

    def probs(self, sensor: SensorModel) -> np.ndarray:
        mask = self.los & (self.dist <= sensor.radius + EPS)
        return np.where(mask, np.exp(-sensor.decay * self.dist), 0.0)


def miss_product(rows: np.ndarray) -> np.ndarray:
    """Probability that every agent misses each target: prod_i (1 - p_i)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    return np.prod(1.0 - rows, axis=0)


def joint_detection(rows: np.ndarray) -> np.ndarray:
    """Probability that at least one agent detects each target."""
    return 1.0 - miss_product(rows)


def coverage_from_rows(grid: QuadratureGrid, rows: np.ndarray) -> float:
    """Objective value from precomputed detection rows."""
    if rows.size == 0:
        return 0.0
    return grid.integrate(joint_detection(rows))


def coverage(positions, space: MissionSpace, grid: QuadratureGrid, sensor) -> float:
    """Density-weighted integral of the joint detection probability.

    ``positions`` may be empty, in which case the value is 0; ``sensor`` may
    be shared or per-agent as in :func:`detection_matrix`.
    """
    pos = as_points_array(positions) if len(positions) else np.empty((0, 2))
    if len(pos) == 0:
        return 0.0
    rows = detection_matrix(pos, space, grid.centers, sensor)
    return coverage_from_rows(grid, rows)


def marginal_gain(grid: QuadratureGrid, miss: np.ndarray, row: np.ndarray) -> float:
    """Increase of the objective from adding one agent with detection ``row``.

    ``miss`` is the current per-target miss probability; the gain integrates
    miss * row against the weighted density.  Both the eager and the lazy
    greedy drivers call this exact function so their arithmetic is identical.
    """
    return float(np.dot(grid.weights * miss, row))
