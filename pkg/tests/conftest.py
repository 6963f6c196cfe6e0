import json
import os
import pathlib

import pytest

from risplan import mapper
from risplan.scene import (AntennaPattern, BsArraySpec, GridSpec, LinkBudget,
                           Material, Scene, TracerSettings, Wall, parse_scene)

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
SCENES_DIR = REPO_ROOT / "scenes"


def make_wall(vertices, reflection_db=6.0, transmission_db=6.0) -> Wall:
    return Wall(vertices=tuple(tuple(float(c) for c in v) for v in vertices),
                material=Material(reflection_loss_db=reflection_db,
                                  transmission_loss_db=transmission_db))


def make_scene(walls=(), bs_position=(0.0, 0.0, 1.0), bs_rows=1, bs_cols=1,
               bs_pattern=None, ris=None, grid=None, budget=None,
               max_reflections=3, ris_mode="plane_wave",
               frequency_hz=3.7e9) -> Scene:
    return Scene(
        frequency_hz=frequency_hz,
        walls=tuple(walls),
        bs=BsArraySpec(reference_position=tuple(float(c) for c in bs_position),
                       rows=bs_rows, cols=bs_cols,
                       element_pattern=bs_pattern or AntennaPattern()),
        ris=ris,
        grid=grid or GridSpec(x_min=0.0, x_max=0.5, y_min=0.0, y_max=0.5,
                              step_m=1.0),
        budget=budget or LinkBudget(),
        tracer=TracerSettings(max_reflections=max_reflections,
                              ris_mode=ris_mode),
    )


@pytest.fixture(scope="session")
def demo_scene_loc2() -> Scene:
    return parse_scene((SCENES_DIR / "demo.json").read_text())


@pytest.fixture(scope="session")
def demo_scene_loc1() -> Scene:
    return parse_scene((SCENES_DIR / "demo_ris_location1.json").read_text())


@pytest.fixture(scope="session")
def demo_maps(demo_scene_loc2, demo_scene_loc1):
    """Baseline plus both RIS placements, computed once per session."""
    threads = os.cpu_count() or 1
    return {
        "baseline": mapper.compute_map(demo_scene_loc2, "baseline", threads=threads),
        "loc2": mapper.compute_map(demo_scene_loc2, "with_ris", threads=threads),
        "loc1": mapper.compute_map(demo_scene_loc1, "with_ris", threads=threads),
    }


def mini_scene_document() -> dict:
    """Small scene (one wall, tiny grid, small arrays) for fast CLI and
    service round-trips."""
    return {
        "frequency_hz": 3.7e9,
        "walls": [
            {"vertices": [[-5, 2, 0], [5, 2, 0], [5, 2, 3], [-5, 2, 3]],
             "material": {"reflection_loss_db": 6.0, "transmission_loss_db": 4.0}},
        ],
        "bs": {
            "reference_position": [0, -10, 5],
            "boresight": {"azimuth_deg": 90.0, "downtilt_deg": 10.0},
            "rows": 2, "cols": 2,
            "element_pattern": {"kind": "cos_pow", "exponent": 2.0,
                                "peak_gain_dbi": 6.0, "backlobe_floor_db": -25.0},
        },
        "ris": {
            "center_position": [-3.0, 4.0, 1.0],
            "normal": [0, -1, 0],
            "up": [0, 0, 1],
            "rows": 4, "cols": 4,
            "element_spacing_m": 0.02,
            "element_pattern": {"kind": "cos_pow", "exponent": 1.0,
                                "peak_gain_dbi": 5.0, "backlobe_floor_db": -30.0},
            "weight_mode": "cascade_conjugate",
        },
        "grid": {"x_min": -2.0, "x_max": 2.0, "y_min": 3.0, "y_max": 6.0,
                 "step_m": 1.0, "height_m": 1.0},
        "raytracer": {"max_reflections": 2, "ris_mode": "plane_wave"},
    }


@pytest.fixture()
def mini_scene_path(tmp_path) -> pathlib.Path:
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(mini_scene_document(), indent=2))
    return path
