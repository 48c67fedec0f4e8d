"""Greedy placement over a finite candidate set, eager and lazy variants.

Both variants pick one candidate per round, the one with the largest marginal
coverage gain, breaking exact ties toward the lowest candidate index.  The
lazy variant keeps stale gains in a max-heap and recomputes only entries that
reach the top; because gains never grow as the team fills in, a recomputed
entry that stays on top is the true maximizer.  Both variants route every gain
through the same dot product, so they select identical sequences.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import EmptyCandidateSetError, InvalidParameterError
from .field import QuadratureGrid
from .geometry import MissionSpace, as_points_array
from .sensing import SensorModel, detection_matrix, marginal_gain

# A gain at or below this is treated as zero and stops the placement loop.
GAIN_TOLERANCE = 1e-12


@dataclass
class GreedyResult:
    """Placement produced by one greedy run."""

    indices: list[int]
    positions: np.ndarray
    gains: list[float]
    values: list[float]
    evaluations: int
    stopped_early: bool = False
    method: str = "eager"
    # True when more agents were requested than candidates exist; every
    # candidate is then placed and the cardinality constraint is slack.
    constraint_slack: bool = False

    @property
    def value(self) -> float:
        """Objective after the final pick (0 for an empty placement)."""
        return self.values[-1] if self.values else 0.0


def greedy_place(
    space: MissionSpace,
    grid: QuadratureGrid,
    sensor: SensorModel,
    candidates,
    team_size: int,
    method: str = "lazy",
    gain_tolerance: float = GAIN_TOLERANCE,
) -> GreedyResult:
    """Place ``team_size`` agents on candidate points by greedy selection.

    Stops early when the best remaining gain is at most ``gain_tolerance``;
    the result then holds fewer positions than requested.  A team larger
    than the candidate set takes every candidate and is flagged as slack.
    """
    cand = as_points_array(candidates)
    if len(cand) == 0:
        raise EmptyCandidateSetError("candidate set is empty")
    if not isinstance(team_size, (int, np.integer)) or team_size < 1:
        raise InvalidParameterError(f"team size must be a positive integer, got {team_size}")
    if method not in ("eager", "lazy"):
        raise InvalidParameterError(f"method must be 'eager' or 'lazy', got {method!r}")
    # more agents than candidates: place everyone, the constraint is slack
    rounds = min(int(team_size), len(cand))

    rows = detection_matrix(cand, space, grid.centers, sensor)
    if method == "eager":
        picker = _run_eager
    else:
        picker = _run_lazy
    result = picker(grid, rows, rounds, gain_tolerance)
    result.positions = cand[result.indices].copy()
    result.method = method
    result.constraint_slack = team_size > len(cand)
    return result


def _run_eager(grid, rows, team_size, tol) -> GreedyResult:
    n_cand = len(rows)
    miss = np.ones(grid.cell_count)
    chosen: list[int] = []
    gains: list[float] = []
    values: list[float] = []
    taken = np.zeros(n_cand, dtype=bool)
    evals = 0
    total = 0.0
    stopped = False
    for _ in range(team_size):
        best_j = -1
        best_gain = -np.inf
        for j in range(n_cand):
            if taken[j]:
                continue
            g = marginal_gain(grid, miss, rows[j])
            evals += 1
            if g > best_gain:
                best_gain = g
                best_j = j
        if best_gain <= tol:
            stopped = True
            break
        taken[best_j] = True
        chosen.append(best_j)
        total += best_gain
        gains.append(best_gain)
        values.append(total)
        miss *= 1.0 - rows[best_j]
    return GreedyResult(chosen, np.empty((0, 2)), gains, values, evals, stopped)


def _run_lazy(grid, rows, team_size, tol) -> GreedyResult:
    n_cand = len(rows)
    miss = np.ones(grid.cell_count)
    chosen: list[int] = []
    gains: list[float] = []
    values: list[float] = []
    evals = 0
    total = 0.0
    stopped = False

    # round 0 gains are exact, so every heap entry starts fresh
    heap = []
    fresh_round = np.zeros(n_cand, dtype=int)
    for j in range(n_cand):
        g = marginal_gain(grid, miss, rows[j])
        evals += 1
        heap.append((-g, j))
    heapq.heapify(heap)

    for step in range(team_size):
        best_j = -1
        best_gain = 0.0
        while heap:
            neg_g, j = heapq.heappop(heap)
            if fresh_round[j] == step:
                best_j = j
                best_gain = -neg_g
                break
            g = marginal_gain(grid, miss, rows[j])
            evals += 1
            fresh_round[j] = step
            heapq.heappush(heap, (-g, j))
        if best_j < 0 or best_gain <= tol:
            stopped = True
            break
        chosen.append(best_j)
        total += best_gain
        gains.append(best_gain)
        values.append(total)
        miss *= 1.0 - rows[best_j]
    return GreedyResult(chosen, np.empty((0, 2)), gains, values, evals, stopped)
