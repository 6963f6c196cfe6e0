"""Map sweep, classification, CSV/PGM export and summaries."""
import json
import math

import pytest

from risplan import mapper
from risplan.errors import GridMismatchError, RisAbsentError
from risplan.link import CoverageStatus
from risplan.mapper import (Category, CellRecord, ClassificationMap,
                            CoverageMap, classify, compute_map,
                            export_classification_csv, export_map_csv,
                            export_map_pgm, improvement_map, load_map_csv,
                            map_summary)
from risplan.scene import GridSpec, parse_scene

from conftest import make_scene, mini_scene_document


def _mini_scene():
    return parse_scene(json.dumps(mini_scene_document()))


def _cell(x, y, status=CoverageStatus.COVERED, p_tx=10.0, gain_db=-140.0,
          ue_ris=None):
    if status == CoverageStatus.OUT_OF_COVERAGE:
        p_target, p_tx = math.inf, None
    elif status == CoverageStatus.COVERED_MIN_POWER:
        p_target = p_tx - 5.0
    else:
        p_target = p_tx
    return CellRecord(x_m=x, y_m=y, z_m=1.0, gain_db=gain_db,
                      ue_ris_power_db=ue_ris, p_target_dbm=p_target,
                      p_tx_dbm=p_tx, status=status)


def _grid(nx, ny):
    return GridSpec(x_min=0.0, x_max=float(nx - 1), y_min=0.0,
                    y_max=float(ny - 1), step_m=1.0)


def _map(cells, variant="baseline", nx=3, ny=1):
    return CoverageMap(grid=_grid(nx, ny), variant=variant, cells=tuple(cells))


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def test_compute_map_cell_order_and_coordinates():
    cmap = compute_map(_mini_scene(), "baseline", threads=1)
    assert cmap.variant == "baseline"
    assert len(cmap.cells) == 20
    # row-major over (y, x) on the exact grid nodes
    expected = [(-2.0 + ix, 3.0 + iy) for iy in range(4) for ix in range(5)]
    assert [(c.x_m, c.y_m) for c in cmap.cells] == expected
    assert all(c.z_m == 1.0 for c in cmap.cells)
    assert all(c.ue_ris_power_db is None for c in cmap.cells)


def test_compute_map_with_ris_populates_incident_power():
    cmap = compute_map(_mini_scene(), "with_ris", threads=1)
    assert cmap.variant == "with_ris"
    assert all(c.ue_ris_power_db is not None for c in cmap.cells)


def test_compute_map_thread_count_does_not_change_results():
    scene = _mini_scene()
    a = compute_map(scene, "with_ris", threads=1)
    b = compute_map(scene, "with_ris", threads=4)
    assert a == b
    assert export_map_csv(a) == export_map_csv(b)


def test_compute_map_progress_callback():
    seen = []
    compute_map(_mini_scene(), "baseline", threads=1,
                progress=lambda done, total: seen.append((done, total)))
    assert seen[0] == (1, 20) and seen[-1] == (20, 20)
    assert len(seen) == 20


def test_compute_map_rejects_bad_variant_and_missing_ris():
    with pytest.raises(ValueError):
        compute_map(_mini_scene(), "both")
    with pytest.raises(RisAbsentError):
        compute_map(make_scene(), "with_ris")


def test_weight_mode_override_changes_map():
    scene = _mini_scene()
    cascade = compute_map(scene, "with_ris", threads=1)
    literal = compute_map(scene, "with_ris", weight_mode="literal", threads=1)
    assert cascade != literal


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def test_classify_three_way_partition():
    base = _map([
        _cell(0, 0, CoverageStatus.OUT_OF_COVERAGE),
        _cell(1, 0, p_tx=20.0),
        _cell(2, 0, p_tx=20.0),
    ])
    var = _map([
        _cell(0, 0, p_tx=15.0),
        _cell(1, 0, p_tx=5.0),
        _cell(2, 0, p_tx=20.0),
    ], variant="with_ris")
    cmap = classify(base, var)
    cats = [c.category for c in cmap.cells]
    assert cats == [Category.EXTENDED_COVERAGE, Category.REDUCED_EXPOSURE,
                    Category.NO_CHANGE]
    assert cmap.cells[1].reduction_db == pytest.approx(15.0)
    assert cmap.cells[0].reduction_db is None


def test_classify_epsilon_boundary():
    base = _map([_cell(0, 0, p_tx=10.01), _cell(1, 0, p_tx=10.02)], nx=2)
    var = _map([_cell(0, 0, p_tx=10.0), _cell(1, 0, p_tx=10.0)],
               variant="with_ris", nx=2)
    cmap = classify(base, var, epsilon_db=0.01)
    # a reduction of exactly epsilon is NO_CHANGE; strictly more is reported
    assert cmap.cells[0].category == Category.NO_CHANGE
    assert cmap.cells[1].category == Category.REDUCED_EXPOSURE


def test_classify_degradation_and_lost_coverage_are_no_change():
    base = _map([_cell(0, 0, p_tx=10.0), _cell(1, 0, p_tx=10.0)], nx=2)
    var = _map([_cell(0, 0, p_tx=18.0),
                _cell(1, 0, CoverageStatus.OUT_OF_COVERAGE)],
               variant="with_ris", nx=2)
    cmap = classify(base, var)
    assert [c.category for c in cmap.cells] == [Category.NO_CHANGE] * 2


def test_classify_rejects_mismatched_grids():
    base = _map([_cell(0, 0), _cell(1, 0)], nx=2)
    shifted = _map([_cell(0.5, 0), _cell(1.5, 0)], nx=2)
    with pytest.raises(GridMismatchError):
        classify(base, shifted)
    with pytest.raises(GridMismatchError):
        classify(base, _map([_cell(0, 0)], nx=1))


def test_improvement_map():
    base = _map([_cell(0, 0, gain_db=-150.0), _cell(1, 0, gain_db=-140.0)], nx=2)
    var = _map([_cell(0, 0, gain_db=-145.0), _cell(1, 0, gain_db=-141.0)],
               variant="with_ris", nx=2)
    assert improvement_map(base, var) == pytest.approx([5.0, -1.0])


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------

def test_coverage_csv_shape_and_formatting():
    cmap = _map([
        _cell(0, 0, p_tx=12.3456789, ue_ris=-33.0),
        _cell(1, 0, CoverageStatus.OUT_OF_COVERAGE),
        _cell(2, 0, CoverageStatus.COVERED_MIN_POWER, p_tx=0.0),
    ], variant="with_ris")
    data = export_map_csv(cmap)
    lines = data.decode("utf-8").split("\n")
    assert lines[0] == mapper.COVERAGE_HEADER
    assert lines[1] == ("0.000000,0.000000,1.000000,-140.000000,-33.000000,"
                        "12.345679,12.345679,COVERED")
    # infinite target power serializes as an empty field, as does p_tx
    assert lines[2].endswith(",,,OUT_OF_COVERAGE")
    assert lines[3] == ("2.000000,0.000000,1.000000,-140.000000,,-5.000000,"
                        "0.000000,COVERED_MIN_POWER")
    assert lines[-1] == ""
    assert b"\r" not in data


def test_classification_csv_format():
    cmap = ClassificationMap(grid=_grid(2, 1), cells=(
        mapper.ClassifiedCell(0.0, 0.0, 1.0, Category.REDUCED_EXPOSURE, 11.5),
        mapper.ClassifiedCell(1.0, 0.0, 1.0, Category.NO_CHANGE, None),
    ))
    data = export_classification_csv(cmap)
    lines = data.decode("utf-8").split("\n")
    assert lines[0] == mapper.CLASSIFICATION_HEADER
    assert lines[1] == "0.000000,0.000000,1.000000,REDUCED_EXPOSURE,11.500000"
    assert lines[2] == "1.000000,0.000000,1.000000,NO_CHANGE,"


def test_csv_round_trip_preserves_values():
    cmap = compute_map(_mini_scene(), "with_ris", threads=1)
    data = export_map_csv(cmap)
    loaded = load_map_csv(data)
    assert loaded.variant == "with_ris"
    assert len(loaded.cells) == len(cmap.cells)
    # re-export of the loaded map is byte-identical
    assert export_map_csv(loaded) == data
    for orig, back in zip(cmap.cells, loaded.cells):
        assert back.status == orig.status
        assert back.gain_db == pytest.approx(orig.gain_db, abs=5e-7)


def test_load_map_csv_rejects_foreign_data():
    with pytest.raises(GridMismatchError):
        load_map_csv(b"a,b,c\n1,2,3\n")
    with pytest.raises(GridMismatchError):
        load_map_csv((mapper.COVERAGE_HEADER + "\n").encode())


def test_pgm_export():
    cmap = _map([
        _cell(0, 0, gain_db=-150.0),
        _cell(1, 0, gain_db=-140.0),
        _cell(2, 0, gain_db=-130.0),
    ])
    data = export_map_pgm(cmap, "gain_db").decode("ascii")
    header, dims, maxval, body = data.split("\n", 3)
    assert header == "P2" and dims == "3 1" and maxval == "255"
    assert body.split() == ["0", "128", "255"]
    with pytest.raises(ValueError):
        export_map_pgm(cmap, "status")


def test_pgm_missing_values_render_black():
    cmap = _map([
        _cell(0, 0, p_tx=10.0),
        _cell(1, 0, CoverageStatus.OUT_OF_COVERAGE),
        _cell(2, 0, p_tx=20.0),
    ])
    body = export_map_pgm(cmap, "p_tx_dbm").decode("ascii").split("\n")[3]
    assert body.split() == ["0", "0", "255"]


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

def test_coverage_summary():
    cmap = _map([
        _cell(0, 0, p_tx=10.0, gain_db=-140.0),
        _cell(1, 0, p_tx=20.0, gain_db=-150.0),
        _cell(2, 0, CoverageStatus.OUT_OF_COVERAGE),
    ])
    s = map_summary(cmap)
    assert s["kind"] == "coverage"
    assert s["cell_count"] == 3
    assert s["status_counts"]["COVERED"] == 2
    assert s["status_counts"]["OUT_OF_COVERAGE"] == 1
    assert s["gain_db"] == {"min": -150.0, "max": -140.0, "mean": -145.0}
    assert s["p_tx_dbm"]["mean"] == 15.0


def test_classification_summary():
    cmap = ClassificationMap(grid=_grid(3, 1), cells=(
        mapper.ClassifiedCell(0.0, 0.0, 1.0, Category.REDUCED_EXPOSURE, 4.0),
        mapper.ClassifiedCell(1.0, 0.0, 1.0, Category.REDUCED_EXPOSURE, 9.0),
        mapper.ClassifiedCell(2.0, 0.0, 1.0, Category.EXTENDED_COVERAGE, None),
    ))
    s = map_summary(cmap)
    assert s["kind"] == "classification"
    assert s["category_counts"][Category.REDUCED_EXPOSURE] == 2
    assert s["max_reduction_db"] == 9.0
