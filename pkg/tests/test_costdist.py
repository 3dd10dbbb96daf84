"""Cost surfaces and matrices against the exhaustive path oracle."""

import math

import numpy as np
import pytest

from oracles import brute_force_costs
from scenes import header, two_subnet_scene, wall_scene
from sitenet.costdist import (
    cost_distance_from,
    cost_matrix,
    read_cost_matrix,
    trace_path,
    write_cost_matrix,
)
from sitenet.errors import InputDataError
from sitenet.grids import CategoricalGrid, NumericGrid
from sitenet.subnets import labeling_from_labels

SQRT2 = math.sqrt(2.0)


def _labeling(cells):
    cells = np.asarray(cells, dtype=np.int64)
    return labeling_from_labels(
        CategoricalGrid(header(cells.shape[1], cells.shape[0]), cells))


def _friction(values):
    values = np.asarray(values, dtype=float)
    return NumericGrid(header(values.shape[1], values.shape[0]), values)


def test_single_cardinal_step():
    labeling = _labeling([[1, 0]])
    surface = cost_distance_from(labeling, _friction([[1, 1]]), 1)
    assert surface.values.tolist() == [[0.0, 100.0]]


def test_single_diagonal_step():
    labeling = _labeling([[1, 0], [0, 0]])
    surface = cost_distance_from(labeling, _friction([[1, 1], [1, 1]]), 1)
    assert surface.values[1, 1] == pytest.approx(100 * SQRT2)


def test_detour_around_expensive_column():
    fric = [[1, 10, 1], [1, 10, 1], [1, 1, 1]]
    labels = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
    surface = cost_distance_from(_labeling(labels), _friction(fric), 1)
    oracle = brute_force_costs(fric, 100.0, [(0, 0)])
    assert np.allclose(surface.values, oracle, rtol=1e-9)
    # The cheap route to the far corner goes through the bottom row.
    assert surface.values[0, 2] == oracle[0, 2] < (1 + 10) / 2 * 100 * 2


def test_matches_oracle_on_random_grids():
    rng = np.random.default_rng(17)
    for _ in range(200):
        nrows, ncols = rng.integers(1, 5, size=2)
        fric = rng.choice([1.0, 2.0, 10.0], size=(nrows, ncols))
        n_src = int(rng.integers(1, min(3, nrows * ncols) + 1))
        flat = rng.choice(nrows * ncols, size=n_src, replace=False)
        sources = [(int(f) // ncols, int(f) % ncols) for f in flat]
        labels = np.zeros((nrows, ncols), dtype=np.int64)
        for r, c in sources:
            labels[r, c] = 1
        surface = cost_distance_from(_labeling(labels), _friction(fric), 1)
        oracle = brute_force_costs(fric, 100.0, sources)
        assert np.allclose(surface.values, oracle, rtol=1e-9, atol=0)


def test_pruned_oracle_agrees_with_full_enumeration():
    rng = np.random.default_rng(29)
    for _ in range(40):
        nrows, ncols = rng.integers(1, 4, size=2)
        fric = rng.choice([1.0, 2.0, 10.0], size=(nrows, ncols))
        src = [(int(rng.integers(nrows)), int(rng.integers(ncols)))]
        pruned = brute_force_costs(fric, 100.0, src, prune=True)
        full = brute_force_costs(fric, 100.0, src, prune=False)
        assert np.array_equal(pruned, full)


def test_relaxation_fixpoint_on_full_surface():
    rng = np.random.default_rng(31)
    fric = rng.choice([1.0, 2.0, 5.0, 10.0], size=(12, 12))
    labels = np.zeros((12, 12), dtype=np.int64)
    labels[0, 0] = labels[11, 4] = 1
    surface = cost_distance_from(_labeling(labels), _friction(fric), 1).values
    for r in range(12):
        for c in range(12):
            for dr, dc in ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)):
                nr, nc = r + dr, c + dc
                if 0 <= nr < 12 and 0 <= nc < 12:
                    step = (fric[r, c] + fric[nr, nc]) / 2 * (100 * SQRT2 if dr and dc else 100)
                    assert surface[nr, nc] <= surface[r, c] + step + 1e-9


def test_friction_scaling_scales_costs():
    rng = np.random.default_rng(37)
    fric = rng.choice([1.0, 2.0, 10.0], size=(6, 6))
    labels = np.zeros((6, 6), dtype=np.int64)
    labels[0, 0] = 1
    base = cost_distance_from(_labeling(labels), _friction(fric), 1).values
    for s in (0.25, 3.0, 17.5):
        scaled = cost_distance_from(_labeling(labels), _friction(fric * s), 1).values
        assert np.allclose(scaled, base * s, rtol=1e-9)


def test_raising_friction_never_lowers_costs():
    rng = np.random.default_rng(41)
    for _ in range(60):
        fric = rng.choice([1.0, 2.0, 10.0], size=(5, 5))
        labels = np.zeros((5, 5), dtype=np.int64)
        labels[0, 0] = 1
        before = cost_distance_from(_labeling(labels), _friction(fric), 1).values
        bumped = fric.copy()
        bumped[rng.integers(5), rng.integers(5)] += rng.uniform(0.5, 10)
        after = cost_distance_from(_labeling(labels), _friction(bumped), 1).values
        assert (after >= before - 1e-9).all()


def test_gap_scene_cost_is_500m():
    labeling, friction, _ = two_subnet_scene()
    matrix = cost_matrix(labeling, friction)
    assert matrix.costs[0, 1] == 500.0
    assert matrix.costs[1, 0] == 500.0
    assert matrix.costs[0, 0] == matrix.costs[1, 1] == 0.0


def test_single_subnet_matrix():
    matrix = cost_matrix(_labeling([[1, 1]]), _friction([[1, 1]]))
    assert matrix.costs.tolist() == [[0.0]]


def test_nodata_moat_gives_infinity():
    fric = _friction([[1, -9999, 1]])
    labels = _labeling([[1, 0, 2]])
    matrix = cost_matrix(labels, fric)
    assert math.isinf(matrix.costs[0, 1])


def test_matrix_exactly_symmetric():
    rng = np.random.default_rng(43)
    fric = rng.choice([1.0, 2.0, 5.0], size=(7, 7))
    labels = np.zeros((7, 7), dtype=np.int64)
    labels[0, 0:2] = 1
    labels[6, 5:7] = 2
    labels[3, 3] = 0
    matrix = cost_matrix(_labeling(labels), _friction(fric))
    assert np.array_equal(matrix.costs, matrix.costs.T)


def test_empty_source_rejected():
    with pytest.raises(InputDataError):
        cost_distance_from(_labeling([[1, 0]]), _friction([[1, 1]]), 2)


def test_opaque_subnets_block_through_travel():
    # Subnet 2 sits between 1 and 3 on a single row.
    labels = _labeling([[1, 0, 2, 0, 3]])
    fric = _friction([[1, 1, 1, 1, 1]])
    permissive = cost_matrix(labels, fric)
    opaque = cost_matrix(labels, fric, opaque_subnets=True)
    assert permissive.costs[0, 2] == 400.0
    assert math.isinf(opaque.costs[0, 2])


def test_trace_straight_corridor():
    labeling, friction, _ = two_subnet_scene()
    surface = cost_distance_from(labeling, friction, 1)
    path = trace_path(surface, friction, (1, 6))
    assert path.cells == tuple((1, c) for c in range(1, 7))
    assert path.total == 500.0
    assert list(path.accumulated) == sorted(path.accumulated)


def test_trace_passes_through_crossing():
    labeling, friction = wall_scene(with_crossing=True)
    surface = cost_distance_from(labeling, friction, 1)
    target = (2, 7)
    path = trace_path(surface, friction, target)
    assert (2, 4) in path.cells
    assert path.total == surface.values[target]
    assert path.accumulated[0] == 0.0


def test_trace_target_on_source():
    labeling, friction, _ = two_subnet_scene()
    surface = cost_distance_from(labeling, friction, 1)
    path = trace_path(surface, friction, (0, 0))
    assert path.cells == ((0, 0),)
    assert path.total == 0.0


def test_trace_unreachable_target():
    fric = _friction([[1, -9999, 1]])
    labeling = _labeling([[1, 0, 0]])
    surface = cost_distance_from(labeling, fric, 1)
    with pytest.raises(InputDataError):
        trace_path(surface, fric, (0, 2))


def test_cost_matrix_csv_roundtrip(tmp_path):
    labeling, friction, _ = two_subnet_scene()
    matrix = cost_matrix(labeling, friction)
    path = tmp_path / "costs.csv"
    write_cost_matrix(matrix, path)
    back = read_cost_matrix(path)
    assert back.subnet_ids == matrix.subnet_ids
    assert np.array_equal(back.costs, matrix.costs)


def test_cost_matrix_csv_roundtrip_with_inf(tmp_path):
    matrix = cost_matrix(_labeling([[1, 0, 2]]), _friction([[1, -9999, 1]]))
    path = tmp_path / "costs.csv"
    write_cost_matrix(matrix, path)
    assert "inf" in path.read_text()
    back = read_cost_matrix(path)
    assert math.isinf(back.costs[0, 1])
