import numpy as np
import pytest

from coverplan import (
    EmptyCandidateSetError,
    InvalidParameterError,
    MissionSpace,
    Polygon,
    QuadratureGrid,
    SensorModel,
    UniformDensity,
    candidate_lattice,
    coverage,
    greedy_place,
)

from conftest import make_problem, random_space


def test_greedy_matches_exhaustive_small(block_problem):
    space, grid, sensor, cand = block_problem
    result = greedy_place(space, grid, sensor, cand, 3, method="eager")
    assert len(result.indices) == 3
    assert len(set(result.indices)) == 3
    # positions are the selected candidates, in selection order
    assert np.array_equal(result.positions, cand[list(result.indices)])
    # reported value equals a from-scratch evaluation
    assert result.value == pytest.approx(
        coverage(result.positions, space, grid, sensor), abs=1e-9
    )


def test_gains_are_nonincreasing(block_problem):
    space, grid, sensor, cand = block_problem
    result = greedy_place(space, grid, sensor, cand, 6)
    gains = np.asarray(result.gains)
    assert np.all(np.diff(gains) <= 1e-9)
    assert np.allclose(np.cumsum(gains), result.values)


def test_lazy_and_eager_agree(block_problem):
    space, grid, sensor, cand = block_problem
    lazy = greedy_place(space, grid, sensor, cand, 5, method="lazy")
    eager = greedy_place(space, grid, sensor, cand, 5, method="eager")
    assert lazy.indices == eager.indices
    assert np.allclose(lazy.gains, eager.gains)
    assert lazy.value == eager.value


def test_lazy_and_eager_agree_random_instances():
    rng = np.random.default_rng(123)
    for _ in range(10):
        space = random_space(rng)
        grid = QuadratureGrid(space, 1.0, UniformDensity())
        cand = candidate_lattice(space, 3.0)
        if len(cand) < 4:
            continue
        sensor = SensorModel(decay=float(rng.uniform(0.05, 0.5)), radius=30.0)
        lazy = greedy_place(space, grid, sensor, cand, 4, method="lazy")
        eager = greedy_place(space, grid, sensor, cand, 4, method="eager")
        assert lazy.indices == eager.indices
        assert lazy.value == eager.value


def test_lazy_skips_evaluations(empty_rect):
    # with fast-decaying sensors most gains are local, so the heap pays off
    grid, _, cand = make_problem(empty_rect, spacing=2.0)
    sensor = SensorModel(decay=0.8, radius=30.0)
    lazy = greedy_place(empty_rect, grid, sensor, cand, 5, method="lazy")
    eager = greedy_place(empty_rect, grid, sensor, cand, 5, method="eager")
    assert lazy.evaluations < eager.evaluations
    # eager scans every untaken candidate each round
    assert eager.evaluations == 5 * len(cand) - (0 + 1 + 2 + 3 + 4)


def test_tie_break_picks_lowest_index():
    # coincident candidates have bit-identical gains; the lowest index must win
    boundary = Polygon([(0.0, 0.0), (10.0, 0.0), (10.0, 4.0), (0.0, 4.0)])
    space = MissionSpace(boundary)
    grid = QuadratureGrid(space, 1.0, UniformDensity())
    sensor = SensorModel(decay=0.2, radius=50.0)
    cand = np.array([[3.0, 2.0], [3.0, 2.0], [3.0, 2.0]])
    for method in ("eager", "lazy"):
        result = greedy_place(space, grid, sensor, cand, 2, method=method)
        assert list(result.indices) == [0, 1]


def test_early_stop_when_nothing_left(empty_rect):
    # radius so large and decay zero that one agent saturates every cell
    grid, _, cand = make_problem(empty_rect)
    sensor = SensorModel(decay=0.0, radius=100.0)
    result = greedy_place(empty_rect, grid, sensor, cand, 4)
    assert result.stopped_early
    assert len(result.indices) == 1
    assert result.value == pytest.approx(grid.total_mass())


def test_team_size_validation(block_problem):
    space, grid, sensor, cand = block_problem
    with pytest.raises(InvalidParameterError):
        greedy_place(space, grid, sensor, cand, 0)
    with pytest.raises(InvalidParameterError):
        greedy_place(space, grid, sensor, cand, 2, method="clever")
    with pytest.raises(EmptyCandidateSetError):
        greedy_place(space, grid, sensor, np.empty((0, 2)), 1)


def test_oversized_team_takes_every_candidate(empty_rect):
    grid, _, _ = make_problem(empty_rect)
    sensor = SensorModel(decay=0.6, radius=5.0)
    cand = np.array([[2.0, 5.0], [10.0, 5.0], [18.0, 5.0]])
    result = greedy_place(empty_rect, grid, sensor, cand, 7)
    assert result.constraint_slack
    assert sorted(result.indices) == [0, 1, 2]
    normal = greedy_place(empty_rect, grid, sensor, cand, 3)
    assert not normal.constraint_slack
    assert normal.value == result.value


def test_value_monotone_in_team_size(block_problem):
    space, grid, sensor, cand = block_problem
    prev = 0.0
    for n in range(1, 6):
        value = greedy_place(space, grid, sensor, cand, n).value
        assert value >= prev - 1e-12
        prev = value
