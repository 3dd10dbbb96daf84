"""Friction table and surface construction."""

import numpy as np
import pytest

from scenes import header, uniform
from sitenet.errors import FrictionTableError, InputDataError
from sitenet.friction import (
    FrictionTable,
    build_friction,
    read_friction_table,
    validate_table,
    write_friction_table,
)
from sitenet.grids import CategoricalGrid, GridHeader
from sitenet.subnets import label_subnets, labeling_from_labels


def _categorical(cells):
    cells = np.asarray(cells, dtype=np.int64)
    return CategoricalGrid(header(cells.shape[1], cells.shape[0]), cells)


def test_lookup_and_overrides():
    hdr = header(3, 1)
    landcover = _categorical([[1, 1, 1]])
    roads = _categorical([[0, 1, 1]])
    crossings = _categorical([[0, 0, 1]])
    out = build_friction(landcover, roads, crossings, table=FrictionTable())
    assert out.values.tolist() == [[1.0, 10.0, 2.0]]


def test_site_override_beats_everything():
    landcover = _categorical([[4, 4]])
    roads = _categorical([[0, 1]])
    labeling = label_subnets(_categorical([[1, 2]]))
    out = build_friction(landcover, roads, sites=labeling, table=FrictionTable())
    assert out.values.tolist() == [[1.0, 1.0]]


def test_precedence_on_random_layers():
    rng = np.random.default_rng(71)
    table = FrictionTable()
    for _ in range(60):
        nrows, ncols = rng.integers(1, 7, size=2)
        lc = rng.integers(1, 6, size=(nrows, ncols))
        road = rng.random(size=(nrows, ncols)) < 0.3
        cross = rng.random(size=(nrows, ncols)) < 0.2
        site = rng.random(size=(nrows, ncols)) < 0.2
        labels = np.zeros((nrows, ncols), dtype=np.int64)
        if site.any():
            for k, (r, c) in enumerate(np.argwhere(site)):
                labels[r, c] = k + 1
        hdr = GridHeader(int(ncols), int(nrows), 0, 0, 100)
        out = build_friction(
            CategoricalGrid(hdr, lc),
            CategoricalGrid(hdr, road.astype(np.int64)),
            CategoricalGrid(hdr, cross.astype(np.int64)),
            labeling_from_labels(CategoricalGrid(hdr, labels)),
            table,
        )
        for r in range(nrows):
            for c in range(ncols):
                if site[r, c]:
                    expected = table.site_friction
                elif cross[r, c]:
                    expected = table.crossing_friction
                elif road[r, c]:
                    expected = table.road_friction
                else:
                    expected = table.entries[int(lc[r, c])]
                assert out.values[r, c] == expected
        assert (out.values >= 0).all()


def test_missing_codes_error_lists_them():
    landcover = _categorical([[1, 999], [777, 2]])
    with pytest.raises(FrictionTableError, match=r"\[777, 999\]"):
        build_friction(landcover, table=FrictionTable())


def test_validate_table():
    table = FrictionTable()
    assert validate_table(table, _categorical([[1, 2, 5]])) == []
    assert validate_table(table, _categorical([[1, 999]])) == [999]
    all_nodata = CategoricalGrid(header(2, 1), [[-9999, -9999]])
    assert validate_table(table, all_nodata) == []


def test_nodata_propagates_from_landcover_only():
    hdr = header(2, 1)
    landcover = CategoricalGrid(hdr, [[1, -9999]])
    roads = CategoricalGrid(hdr, [[-9999, 0]])  # nodata road cell = no road
    out = build_friction(landcover, roads, table=FrictionTable())
    assert out.values[0, 0] == 1.0
    assert out.nodata_mask.tolist() == [[False, True]]


def test_raising_entries_never_lowers_output():
    rng = np.random.default_rng(73)
    landcover = _categorical(rng.integers(1, 6, size=(5, 5)))
    base_table = FrictionTable()
    base = build_friction(landcover, table=base_table).values
    entries = dict(base_table.entries)
    entries[int(rng.integers(2, 6))] += 5.0
    raised = build_friction(landcover, table=FrictionTable(entries=entries)).values
    assert (raised >= base).all()


def test_table_invariants():
    with pytest.raises(FrictionTableError):
        FrictionTable(entries={1: -0.5})
    with pytest.raises(FrictionTableError):
        FrictionTable(entries={1: 2.0})  # no calibration class at exactly 1
    with pytest.raises(FrictionTableError):
        FrictionTable(road_friction=5.0, crossing_friction=6.0)
    with pytest.raises(FrictionTableError):
        FrictionTable(site_friction=-1.0)


def test_table_csv_roundtrip(tmp_path):
    table = FrictionTable(entries={1: 1.0, 2: 3.5, 7: 40.0},
                          road_friction=12.0, crossing_friction=1.5, site_friction=1.0)
    path = tmp_path / "table.csv"
    write_friction_table(table, path)
    assert read_friction_table(path) == table


def test_table_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("code,friction\n1,1\nROAD,10\nCROSSING,2\n")
    with pytest.raises(FrictionTableError, match="SITE"):
        read_friction_table(path)
    path.write_text("wrong,header\n")
    with pytest.raises(FrictionTableError):
        read_friction_table(path)
    path.write_text("code,friction\nxyz,1\nROAD,10\nCROSSING,2\nSITE,1\n")
    with pytest.raises(FrictionTableError, match="xyz"):
        read_friction_table(path)


def test_misaligned_layers_rejected():
    landcover = uniform(header(3, 3), 1)
    roads = uniform(header(4, 3), 0)
    with pytest.raises(InputDataError):
        build_friction(landcover, roads, table=FrictionTable())
