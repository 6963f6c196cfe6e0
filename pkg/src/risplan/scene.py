"""World model: geometry, materials, antenna arrays, grid and link budget.

Scenes are immutable once constructed and safe to share across workers.
``parse_scene`` reads the JSON scene file format (fail-closed: unknown keys
are schema errors); ``serialize_scene`` is its exact inverse.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import SceneInvariantError, SceneSchemaError, SceneSyntaxError
from .geometry import PolygonGeom, unit

SPEED_OF_LIGHT_M_S = 3.0e8

WALL_PLANARITY_TOL_M = 1e-6
FRAME_ORTHOGONALITY_TOL = 1e-9

Point = tuple[float, float, float]


@dataclass(frozen=True)
class Material:
    reflection_loss_db: float
    transmission_loss_db: float


@dataclass(frozen=True)
class Wall:
    vertices: tuple[Point, ...]
    material: Material


@dataclass(frozen=True)
class AntennaPattern:
    kind: str = "isotropic"          # isotropic | cos_pow
    exponent: float = 0.0            # cos_pow only
    peak_gain_dbi: float = 0.0
    backlobe_floor_db: float = -30.0  # relative to peak, behind the element


@dataclass(frozen=True)
class Boresight:
    azimuth_deg: float = 0.0
    downtilt_deg: float = 0.0


@dataclass(frozen=True)
class BsArraySpec:
    reference_position: Point
    boresight: Boresight = field(default_factory=Boresight)
    rows: int = 8
    cols: int = 4
    row_spacing_wavelengths: float = 0.5
    col_spacing_wavelengths: float = 0.8
    element_pattern: AntennaPattern = field(default_factory=AntennaPattern)


@dataclass(frozen=True)
class RisSpec:
    center_position: Point
    normal: Point
    up: Point
    rows: int
    cols: int
    element_spacing_m: float = 0.20
    element_pattern: AntennaPattern = field(default_factory=AntennaPattern)
    weight_mode: str = "literal"     # literal | cascade_conjugate


@dataclass(frozen=True)
class LinkBudget:
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 5.0
    bandwidth_hz: float = 30_000.0
    rate_bps: float = 30_000.0
    p_min_dbm: float = 0.0
    p_max_dbm: float = 23.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    step_m: float
    height_m: float = 1.0

    def axis_points(self) -> tuple[np.ndarray, np.ndarray]:
        nx = int(math.floor((self.x_max - self.x_min) / self.step_m + 1e-9)) + 1
        ny = int(math.floor((self.y_max - self.y_min) / self.step_m + 1e-9)) + 1
        xs = self.x_min + self.step_m * np.arange(nx)
        ys = self.y_min + self.step_m * np.arange(ny)
        return xs, ys

    @property
    def shape(self) -> tuple[int, int]:
        xs, ys = self.axis_points()
        return len(ys), len(xs)   # (rows over y, cols over x)


@dataclass(frozen=True)
class TracerSettings:
    max_reflections: int = 3
    ris_mode: str = "plane_wave"     # plane_wave | per_element


@dataclass(frozen=True)
class Scene:
    walls: tuple[Wall, ...]
    bs: BsArraySpec
    grid: GridSpec
    frequency_hz: float = 3.7e9
    ris: Optional[RisSpec] = None
    budget: LinkBudget = field(default_factory=LinkBudget)
    tracer: TracerSettings = field(default_factory=TracerSettings)

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.frequency_hz


@dataclass(frozen=True)
class Issue:
    severity: str   # error | warning
    code: str
    message: str


# ---------------------------------------------------------------------------
# Array geometry
# ---------------------------------------------------------------------------

def boresight_vector(b: Boresight) -> np.ndarray:
    az = math.radians(b.azimuth_deg)
    tilt = math.radians(b.downtilt_deg)
    return np.array([
        math.cos(tilt) * math.cos(az),
        math.cos(tilt) * math.sin(az),
        -math.sin(tilt),
    ])


def bs_element_positions(spec: BsArraySpec, wavelength_m: float):
    """Element lattice of the BS panel.

    Column-major ordering, bottom-to-top then left-to-right, so channel
    vectors are reproducible byte-for-byte.  Returns (positions Nx3,
    boresight unit vector shared by all elements).
    """
    az = math.radians(spec.boresight.azimuth_deg)
    tilt = math.radians(spec.boresight.downtilt_deg)
    bore = boresight_vector(spec.boresight)
    # panel-horizontal axis; panel-vertical completes the right-handed frame
    h_axis = np.array([-math.sin(az), math.cos(az), 0.0])
    v_axis = np.cross(bore, h_axis)
    ref = np.asarray(spec.reference_position, dtype=float)
    row_pitch = spec.row_spacing_wavelengths * wavelength_m
    col_pitch = spec.col_spacing_wavelengths * wavelength_m
    pos = np.empty((spec.rows * spec.cols, 3))
    n = 0
    for c in range(spec.cols):
        dx = (c - (spec.cols - 1) / 2.0) * col_pitch
        for r in range(spec.rows):
            dz = (r - (spec.rows - 1) / 2.0) * row_pitch
            pos[n] = ref + dx * h_axis + dz * v_axis
            n += 1
    return pos, bore


def ris_element_positions(spec: RisSpec) -> np.ndarray:
    """Unit-cell lattice centered on the panel center, row-major in the
    (up, normal x up) frame."""
    n = unit(spec.normal)
    up = unit(spec.up)
    right = np.cross(n, up)
    center = np.asarray(spec.center_position, dtype=float)
    s = spec.element_spacing_m
    pos = np.empty((spec.rows * spec.cols, 3))
    k = 0
    for r in range(spec.rows):
        du = (r - (spec.rows - 1) / 2.0) * s
        for c in range(spec.cols):
            dr = (c - (spec.cols - 1) / 2.0) * s
            pos[k] = center + du * up + dr * right
            k += 1
    return pos


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_pattern(p: AntennaPattern, where: str, issues: list[Issue]) -> None:
    if p.kind not in ("isotropic", "cos_pow"):
        issues.append(Issue("error", "PATTERN_KIND",
                            f"{where}: unknown pattern kind {p.kind!r}"))
    if not (math.isfinite(p.exponent) and p.exponent >= 0):
        issues.append(Issue("error", "PATTERN_EXPONENT",
                            f"{where}: exponent must be finite and >= 0"))
    if not math.isfinite(p.peak_gain_dbi):
        issues.append(Issue("error", "PATTERN_PEAK",
                            f"{where}: peak gain must be finite"))
    if not (math.isfinite(p.backlobe_floor_db) and p.backlobe_floor_db <= 0):
        issues.append(Issue("error", "PATTERN_BACKLOBE",
                            f"{where}: backlobe floor must be <= 0 dB"))


def validate_scene(scene: Scene) -> list[Issue]:
    """Diagnostics for every type invariant.  Returns an empty list iff the
    scene is fully valid; never raises."""
    issues: list[Issue] = []

    if not (scene.frequency_hz > 0 and math.isfinite(scene.frequency_hz)):
        issues.append(Issue("error", "FREQUENCY",
                            "frequency_hz must be positive and finite"))

    wall_geoms: list[PolygonGeom] = []
    for i, w in enumerate(scene.walls):
        where = f"walls[{i}]"
        if len(w.vertices) < 3:
            issues.append(Issue("error", "WALL_VERTEX_COUNT",
                                f"{where}: polygon needs at least 3 vertices"))
            continue
        for loss, name in ((w.material.reflection_loss_db, "reflection"),
                           (w.material.transmission_loss_db, "transmission")):
            if not (math.isfinite(loss) and loss >= 0):
                issues.append(Issue("error", "MATERIAL_LOSS",
                                    f"{where}: {name} loss must be finite and >= 0 dB"))
        try:
            g = PolygonGeom(w.vertices, index=i)
        except ValueError:
            issues.append(Issue("error", "WALL_DEGENERATE",
                                f"{where}: degenerate polygon"))
            continue
        if g.planarity_deviation() > WALL_PLANARITY_TOL_M:
            issues.append(Issue("error", "WALL_NOT_PLANAR",
                                f"{where}: vertices deviate "
                                f"{g.planarity_deviation():.2e} m from a plane"))
        elif not g.is_simple():
            issues.append(Issue("error", "WALL_NOT_SIMPLE",
                                f"{where}: polygon is self-intersecting"))
        else:
            wall_geoms.append(g)

    bs = scene.bs
    if bs.rows < 1 or bs.cols < 1:
        issues.append(Issue("error", "BS_ARRAY", "bs: rows*cols must be > 0"))
    if bs.row_spacing_wavelengths <= 0 or bs.col_spacing_wavelengths <= 0:
        issues.append(Issue("error", "BS_SPACING", "bs: spacings must be > 0"))
    _check_pattern(bs.element_pattern, "bs.element_pattern", issues)

    ris = scene.ris
    if ris is not None:
        if ris.rows < 1 or ris.cols < 1:
            issues.append(Issue("error", "RIS_ARRAY", "ris: rows*cols must be > 0"))
        if ris.element_spacing_m <= 0:
            issues.append(Issue("error", "RIS_SPACING",
                                "ris: element_spacing_m must be > 0"))
        if ris.weight_mode not in ("literal", "cascade_conjugate"):
            issues.append(Issue("error", "RIS_WEIGHT_MODE",
                                f"ris: unknown weight_mode {ris.weight_mode!r}"))
        _check_pattern(ris.element_pattern, "ris.element_pattern", issues)
        try:
            n, up = unit(ris.normal), unit(ris.up)
        except ValueError:
            issues.append(Issue("error", "RIS_FRAME",
                                "ris: normal and up must be non-zero"))
        else:
            if (abs(np.linalg.norm(ris.normal) - 1.0) > FRAME_ORTHOGONALITY_TOL
                    or abs(np.linalg.norm(ris.up) - 1.0) > FRAME_ORTHOGONALITY_TOL
                    or abs(float(n @ up)) > FRAME_ORTHOGONALITY_TOL):
                issues.append(Issue("error", "RIS_FRAME",
                                    "ris: normal and up must be orthonormal"))

    b = scene.budget
    if b.p_min_dbm > b.p_max_dbm:
        issues.append(Issue("error", "BUDGET_RANGE",
                            f"p_min_dbm={b.p_min_dbm} exceeds p_max_dbm={b.p_max_dbm}"))
    if not (b.bandwidth_hz > 0):
        issues.append(Issue("error", "BUDGET_BANDWIDTH", "bandwidth_hz must be > 0"))
    if b.rate_bps < 0:
        issues.append(Issue("error", "BUDGET_RATE", "rate_bps must be >= 0"))

    g = scene.grid
    if not (g.x_min < g.x_max and g.y_min < g.y_max):
        issues.append(Issue("error", "GRID_RANGE", "grid bounds must be increasing"))
    if not (g.step_m > 0):
        issues.append(Issue("error", "GRID_STEP", "grid step_m must be > 0"))

    t = scene.tracer
    if t.max_reflections < 0:
        issues.append(Issue("error", "TRACER_ORDER", "max_reflections must be >= 0"))
    elif t.max_reflections > 4:
        issues.append(Issue("warning", "TRACER_ORDER_SLOW",
                            "max_reflections > 4 makes sweeps very slow"))
    if t.ris_mode not in ("plane_wave", "per_element"):
        issues.append(Issue("error", "TRACER_RIS_MODE",
                            f"unknown ris_mode {t.ris_mode!r}"))

    # antennas may not sit inside a wall surface
    probes = [("bs", np.asarray(bs.reference_position, dtype=float))]
    if ris is not None:
        probes.append(("ris", np.asarray(ris.center_position, dtype=float)))
    for name, p in probes:
        for wg in wall_geoms:
            if abs(float(wg.plane_distance(p))) < WALL_PLANARITY_TOL_M \
                    and bool(wg.contains_strict(p[None, :])[0]):
                issues.append(Issue("error", "POSITION_IN_WALL",
                                    f"{name} position lies inside walls[{wg.index}]"))
    return issues


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

_REQUIRED = object()


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(v, path: str) -> float:
    if not _is_number(v):
        raise SceneSchemaError(f"expected a number at {path}", path)
    return float(v)


def _integer(v, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise SceneSchemaError(f"expected an integer at {path}", path)
    return v


def _string(v, path: str, allowed=None) -> str:
    if not isinstance(v, str):
        raise SceneSchemaError(f"expected a string at {path}", path)
    if allowed is not None and v not in allowed:
        raise SceneSchemaError(
            f"expected one of {sorted(allowed)} at {path}, got {v!r}", path)
    return v


def _point(v, path: str) -> Point:
    if not isinstance(v, list) or len(v) != 3:
        raise SceneSchemaError(f"expected an [x,y,z] point at {path}", path)
    return tuple(_number(c, f"{path}[{i}]") for i, c in enumerate(v))  # type: ignore


def _object(v, path: str, known: set[str]) -> dict:
    if not isinstance(v, dict):
        raise SceneSchemaError(f"expected an object at {path}", path)
    for key in v:
        if key not in known:
            raise SceneSchemaError(f"unknown key at {path}.{key}", f"{path}.{key}")
    return v


def _parse_pattern(v, path: str) -> AntennaPattern:
    d = _object(v, path, {"kind", "exponent", "peak_gain_dbi", "backlobe_floor_db"})
    dflt = AntennaPattern()
    return AntennaPattern(
        kind=_string(d.get("kind", dflt.kind), f"{path}.kind",
                     {"isotropic", "cos_pow"}),
        exponent=_number(d.get("exponent", dflt.exponent), f"{path}.exponent"),
        peak_gain_dbi=_number(d.get("peak_gain_dbi", dflt.peak_gain_dbi),
                              f"{path}.peak_gain_dbi"),
        backlobe_floor_db=_number(d.get("backlobe_floor_db", dflt.backlobe_floor_db),
                                  f"{path}.backlobe_floor_db"),
    )


def _parse_material(v, path: str) -> Material:
    d = _object(v, path, {"reflection_loss_db", "transmission_loss_db"})
    for key in ("reflection_loss_db", "transmission_loss_db"):
        if key not in d:
            raise SceneSchemaError(f"missing key at {path}.{key}", f"{path}.{key}")
    return Material(
        reflection_loss_db=_number(d["reflection_loss_db"], f"{path}.reflection_loss_db"),
        transmission_loss_db=_number(d["transmission_loss_db"], f"{path}.transmission_loss_db"),
    )


def _parse_wall(v, path: str) -> Wall:
    d = _object(v, path, {"vertices", "material"})
    verts = d.get("vertices")
    if not isinstance(verts, list) or len(verts) < 3:
        raise SceneSchemaError(f"wall needs >= 3 vertices at {path}.vertices",
                               f"{path}.vertices")
    if "material" not in d:
        raise SceneSchemaError(f"missing key at {path}.material", f"{path}.material")
    return Wall(
        vertices=tuple(_point(p, f"{path}.vertices[{i}]") for i, p in enumerate(verts)),
        material=_parse_material(d["material"], f"{path}.material"),
    )


def _parse_bs(v, path: str) -> BsArraySpec:
    d = _object(v, path, {"reference_position", "boresight", "rows", "cols",
                          "row_spacing_wavelengths", "col_spacing_wavelengths",
                          "element_pattern"})
    if "reference_position" not in d:
        raise SceneSchemaError(f"missing key at {path}.reference_position",
                               f"{path}.reference_position")
    dflt = BsArraySpec(reference_position=(0.0, 0.0, 0.0))
    bore = Boresight()
    if "boresight" in d:
        bd = _object(d["boresight"], f"{path}.boresight", {"azimuth_deg", "downtilt_deg"})
        bore = Boresight(
            azimuth_deg=_number(bd.get("azimuth_deg", 0.0), f"{path}.boresight.azimuth_deg"),
            downtilt_deg=_number(bd.get("downtilt_deg", 0.0), f"{path}.boresight.downtilt_deg"),
        )
    pattern = (_parse_pattern(d["element_pattern"], f"{path}.element_pattern")
               if "element_pattern" in d else AntennaPattern())
    return BsArraySpec(
        reference_position=_point(d["reference_position"], f"{path}.reference_position"),
        boresight=bore,
        rows=_integer(d.get("rows", dflt.rows), f"{path}.rows"),
        cols=_integer(d.get("cols", dflt.cols), f"{path}.cols"),
        row_spacing_wavelengths=_number(
            d.get("row_spacing_wavelengths", dflt.row_spacing_wavelengths),
            f"{path}.row_spacing_wavelengths"),
        col_spacing_wavelengths=_number(
            d.get("col_spacing_wavelengths", dflt.col_spacing_wavelengths),
            f"{path}.col_spacing_wavelengths"),
        element_pattern=pattern,
    )


def _parse_ris(v, path: str) -> RisSpec:
    d = _object(v, path, {"center_position", "normal", "up", "rows", "cols",
                          "element_spacing_m", "element_pattern", "weight_mode"})
    for key in ("center_position", "normal", "up", "rows", "cols"):
        if key not in d:
            raise SceneSchemaError(f"missing key at {path}.{key}", f"{path}.{key}")
    pattern = (_parse_pattern(d["element_pattern"], f"{path}.element_pattern")
               if "element_pattern" in d else AntennaPattern())
    return RisSpec(
        center_position=_point(d["center_position"], f"{path}.center_position"),
        normal=_point(d["normal"], f"{path}.normal"),
        up=_point(d["up"], f"{path}.up"),
        rows=_integer(d["rows"], f"{path}.rows"),
        cols=_integer(d["cols"], f"{path}.cols"),
        element_spacing_m=_number(d.get("element_spacing_m", 0.20),
                                  f"{path}.element_spacing_m"),
        element_pattern=pattern,
        weight_mode=_string(d.get("weight_mode", "literal"), f"{path}.weight_mode",
                            {"literal", "cascade_conjugate"}),
    )


def _parse_budget(v, path: str) -> LinkBudget:
    d = _object(v, path, {"noise_psd_dbm_hz", "noise_figure_db", "bandwidth_hz",
                          "rate_bps", "p_min_dbm", "p_max_dbm"})
    dflt = LinkBudget()
    return LinkBudget(**{
        key: _number(d.get(key, getattr(dflt, key)), f"{path}.{key}")
        for key in ("noise_psd_dbm_hz", "noise_figure_db", "bandwidth_hz",
                    "rate_bps", "p_min_dbm", "p_max_dbm")
    })


def _parse_grid(v, path: str) -> GridSpec:
    d = _object(v, path, {"x_min", "x_max", "y_min", "y_max", "step_m", "height_m"})
    for key in ("x_min", "x_max", "y_min", "y_max", "step_m"):
        if key not in d:
            raise SceneSchemaError(f"missing key at {path}.{key}", f"{path}.{key}")
    return GridSpec(
        x_min=_number(d["x_min"], f"{path}.x_min"),
        x_max=_number(d["x_max"], f"{path}.x_max"),
        y_min=_number(d["y_min"], f"{path}.y_min"),
        y_max=_number(d["y_max"], f"{path}.y_max"),
        step_m=_number(d["step_m"], f"{path}.step_m"),
        height_m=_number(d.get("height_m", 1.0), f"{path}.height_m"),
    )


def _parse_tracer(v, path: str) -> TracerSettings:
    d = _object(v, path, {"max_reflections", "ris_mode"})
    dflt = TracerSettings()
    return TracerSettings(
        max_reflections=_integer(d.get("max_reflections", dflt.max_reflections),
                                 f"{path}.max_reflections"),
        ris_mode=_string(d.get("ris_mode", dflt.ris_mode), f"{path}.ris_mode",
                         {"plane_wave", "per_element"}),
    )


def build_scene(document: dict) -> Scene:
    """Build a Scene from an already-decoded JSON document (no validation)."""
    d = _object(document, "$", {"frequency_hz", "walls", "bs", "ris", "grid",
                                "link_budget", "raytracer"})
    for key in ("walls", "bs", "grid"):
        if key not in d:
            raise SceneSchemaError(f"missing key at $.{key}", f"$.{key}")
    if not isinstance(d["walls"], list):
        raise SceneSchemaError("expected a list at $.walls", "$.walls")
    return Scene(
        frequency_hz=_number(d.get("frequency_hz", 3.7e9), "$.frequency_hz"),
        walls=tuple(_parse_wall(w, f"$.walls[{i}]") for i, w in enumerate(d["walls"])),
        bs=_parse_bs(d["bs"], "$.bs"),
        ris=_parse_ris(d["ris"], "$.ris") if d.get("ris") is not None else None,
        grid=_parse_grid(d["grid"], "$.grid"),
        budget=_parse_budget(d["link_budget"], "$.link_budget")
        if "link_budget" in d else LinkBudget(),
        tracer=_parse_tracer(d["raytracer"], "$.raytracer")
        if "raytracer" in d else TracerSettings(),
    )


def parse_scene(document: str) -> Scene:
    """Parse and validate a UTF-8 JSON scene document."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    scene = build_scene(data)
    errors = [i for i in validate_scene(scene) if i.severity == "error"]
    if errors:
        raise SceneInvariantError(
            "; ".join(f"{i.code}: {i.message}" for i in errors), issues=errors)
    return scene


def _pattern_doc(p: AntennaPattern) -> dict:
    return {"kind": p.kind, "exponent": p.exponent,
            "peak_gain_dbi": p.peak_gain_dbi,
            "backlobe_floor_db": p.backlobe_floor_db}


def scene_document(scene: Scene) -> dict:
    doc = {
        "frequency_hz": scene.frequency_hz,
        "walls": [
            {"vertices": [list(v) for v in w.vertices],
             "material": {"reflection_loss_db": w.material.reflection_loss_db,
                          "transmission_loss_db": w.material.transmission_loss_db}}
            for w in scene.walls
        ],
        "bs": {
            "reference_position": list(scene.bs.reference_position),
            "boresight": {"azimuth_deg": scene.bs.boresight.azimuth_deg,
                          "downtilt_deg": scene.bs.boresight.downtilt_deg},
            "rows": scene.bs.rows,
            "cols": scene.bs.cols,
            "row_spacing_wavelengths": scene.bs.row_spacing_wavelengths,
            "col_spacing_wavelengths": scene.bs.col_spacing_wavelengths,
            "element_pattern": _pattern_doc(scene.bs.element_pattern),
        },
        "grid": {"x_min": scene.grid.x_min, "x_max": scene.grid.x_max,
                 "y_min": scene.grid.y_min, "y_max": scene.grid.y_max,
                 "step_m": scene.grid.step_m, "height_m": scene.grid.height_m},
        "link_budget": {
            "noise_psd_dbm_hz": scene.budget.noise_psd_dbm_hz,
            "noise_figure_db": scene.budget.noise_figure_db,
            "bandwidth_hz": scene.budget.bandwidth_hz,
            "rate_bps": scene.budget.rate_bps,
            "p_min_dbm": scene.budget.p_min_dbm,
            "p_max_dbm": scene.budget.p_max_dbm,
        },
        "raytracer": {"max_reflections": scene.tracer.max_reflections,
                      "ris_mode": scene.tracer.ris_mode},
    }
    if scene.ris is not None:
        r = scene.ris
        doc["ris"] = {
            "center_position": list(r.center_position),
            "normal": list(r.normal),
            "up": list(r.up),
            "rows": r.rows,
            "cols": r.cols,
            "element_spacing_m": r.element_spacing_m,
            "element_pattern": _pattern_doc(r.element_pattern),
            "weight_mode": r.weight_mode,
        }
    return doc


def serialize_scene(scene: Scene) -> str:
    return json.dumps(scene_document(scene), indent=2) + "\n"


def with_ris(scene: Scene, ris: Optional[RisSpec]) -> Scene:
    return replace(scene, ris=ris)
