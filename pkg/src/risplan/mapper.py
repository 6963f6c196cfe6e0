"""Grid sweep producing coverage/exposure maps, the RIS-vs-baseline
classification, CSV/PGM export and summaries.

The sweep is data-parallel per cell; results are written into pre-sized
storage by cell index so output bytes never depend on worker count.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channel import channel_power, compute_h, compute_q, compute_w, power_db
from .errors import GridMismatchError, RisAbsentError
from .link import CoverageStatus, evaluate_link
from .ris import ris_weights_cascade, ris_weights_literal, equivalent_channel
from .scene import GridSpec, Scene

REDUCTION_EPSILON_DB = 0.01

COVERAGE_HEADER = "x_m,y_m,z_m,gain_db,ue_ris_power_db,p_target_dbm,p_tx_dbm,status"
CLASSIFICATION_HEADER = "x_m,y_m,z_m,category,reduction_db"


class Category:
    NO_CHANGE = "NO_CHANGE"
    REDUCED_EXPOSURE = "REDUCED_EXPOSURE"
    EXTENDED_COVERAGE = "EXTENDED_COVERAGE"


@dataclass(frozen=True)
class CellRecord:
    x_m: float
    y_m: float
    z_m: float
    gain_db: float
    ue_ris_power_db: Optional[float]    # with_ris maps only
    p_target_dbm: float                 # may be +/-inf (internal sentinel)
    p_tx_dbm: Optional[float]
    status: CoverageStatus


@dataclass(frozen=True)
class CoverageMap:
    grid: GridSpec
    variant: str                        # baseline | with_ris
    cells: tuple[CellRecord, ...]       # dense, row-major over (y, x)


@dataclass(frozen=True)
class ClassifiedCell:
    x_m: float
    y_m: float
    z_m: float
    category: str
    reduction_db: Optional[float]


@dataclass(frozen=True)
class ClassificationMap:
    grid: GridSpec
    cells: tuple[ClassifiedCell, ...]


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def _cell_points(grid: GridSpec):
    xs, ys = grid.axis_points()
    return [(float(x), float(y), grid.height_m) for y in ys for x in xs]


def compute_map(scene: Scene, variant: str, *, weight_mode: str | None = None,
                reference_antenna: int = 0, threads: int | None = None,
                progress: Callable[[int, int], None] | None = None) -> CoverageMap:
    """Evaluate every grid cell center.  q is computed once and shared
    read-only across workers."""
    if variant not in ("baseline", "with_ris"):
        raise ValueError(f"unknown variant {variant!r}")
    use_ris = variant == "with_ris"
    if use_ris and scene.ris is None:
        raise RisAbsentError("variant=with_ris requires a scene with a RIS")
    mode = weight_mode or (scene.ris.weight_mode if scene.ris else "literal")
    q = compute_q(scene) if use_ris else None

    points = _cell_points(scene.grid)
    total = len(points)
    results: list[CellRecord | None] = [None] * total

    def evaluate(idx: int) -> CellRecord:
        x, y, z = points[idx]
        h = compute_h(scene, (x, y, z))
        ue_ris_db = None
        if use_ris:
            w = compute_w(scene, (x, y, z))
            ue_ris_db = power_db(channel_power(w))
            if mode == "cascade_conjugate":
                weights = ris_weights_cascade(w, q, h, reference_antenna)
            else:
                weights = ris_weights_literal(w)
            g = equivalent_channel(h, w, q, weights)
        else:
            g = h
        link = evaluate_link(g, scene.budget)
        return CellRecord(x_m=x, y_m=y, z_m=z,
                          gain_db=power_db(link.gain_linear),
                          ue_ris_power_db=ue_ris_db,
                          p_target_dbm=link.p_target_dbm,
                          p_tx_dbm=link.p_tx_dbm,
                          status=link.status)

    nthreads = threads or os.cpu_count() or 1
    done = 0
    if nthreads <= 1:
        for i in range(total):
            results[i] = evaluate(i)
            done += 1
            if progress:
                progress(done, total)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            for i, rec in enumerate(pool.map(evaluate, range(total))):
                results[i] = rec
                done += 1
                if progress:
                    progress(done, total)
    return CoverageMap(grid=scene.grid, variant=variant,
                       cells=tuple(results))    # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Derived maps
# ---------------------------------------------------------------------------

def _check_grids(a: CoverageMap, b: CoverageMap) -> None:
    if len(a.cells) != len(b.cells):
        raise GridMismatchError(
            f"cell counts differ: {len(a.cells)} vs {len(b.cells)}")
    for ca, cb in zip(a.cells, b.cells):
        if (ca.x_m, ca.y_m, ca.z_m) != (cb.x_m, cb.y_m, cb.z_m):
            raise GridMismatchError(
                f"grids differ at ({ca.x_m}, {ca.y_m}) vs ({cb.x_m}, {cb.y_m})")


def improvement_map(baseline: CoverageMap, variant: CoverageMap) -> list[float]:
    """Per-cell equivalent-gain difference in dB (negative where the RIS
    degrades the link)."""
    _check_grids(baseline, variant)
    return [cv.gain_db - cb.gain_db
            for cb, cv in zip(baseline.cells, variant.cells)]


def classify(baseline: CoverageMap, variant: CoverageMap,
             epsilon_db: float = REDUCTION_EPSILON_DB) -> ClassificationMap:
    """Three-way partition: extended coverage, reduced exposure, no change.
    Cells the RIS leaves equal (or degrades) are NO_CHANGE."""
    _check_grids(baseline, variant)
    out = []
    for cb, cv in zip(baseline.cells, variant.cells):
        base_out = cb.status == CoverageStatus.OUT_OF_COVERAGE
        var_out = cv.status == CoverageStatus.OUT_OF_COVERAGE
        if base_out and not var_out:
            cell = ClassifiedCell(cb.x_m, cb.y_m, cb.z_m,
                                  Category.EXTENDED_COVERAGE, None)
        elif not base_out and not var_out \
                and (cb.p_tx_dbm - cv.p_tx_dbm) > epsilon_db:
            cell = ClassifiedCell(cb.x_m, cb.y_m, cb.z_m,
                                  Category.REDUCED_EXPOSURE,
                                  cb.p_tx_dbm - cv.p_tx_dbm)
        else:
            cell = ClassifiedCell(cb.x_m, cb.y_m, cb.z_m, Category.NO_CHANGE, None)
        out.append(cell)
    return ClassificationMap(grid=baseline.grid, cells=tuple(out))


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

def map_summary(obj) -> dict:
    """Aggregate counts and statistics for a coverage or classification map."""
    if isinstance(obj, ClassificationMap):
        counts = {Category.NO_CHANGE: 0, Category.REDUCED_EXPOSURE: 0,
                  Category.EXTENDED_COVERAGE: 0}
        reductions = []
        for c in obj.cells:
            counts[c.category] += 1
            if c.reduction_db is not None:
                reductions.append(c.reduction_db)
        return {
            "kind": "classification",
            "cell_count": len(obj.cells),
            "category_counts": counts,
            "max_reduction_db": max(reductions) if reductions else None,
        }
    counts = {s.value: 0 for s in CoverageStatus}
    gains, ptxs = [], []
    for c in obj.cells:
        counts[c.status.value] += 1
        if c.status != CoverageStatus.OUT_OF_COVERAGE:
            gains.append(c.gain_db)
            ptxs.append(c.p_tx_dbm)
    def stats(vals):
        if not vals:
            return None
        return {"min": min(vals), "max": max(vals),
                "mean": float(np.mean(vals))}
    return {
        "kind": "coverage",
        "variant": obj.variant,
        "cell_count": len(obj.cells),
        "status_counts": counts,
        "gain_db": stats(gains),
        "p_tx_dbm": stats(ptxs),
    }


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------

def _fmt(v: Optional[float]) -> str:
    if v is None or not math.isfinite(v):
        return ""
    return f"{v:.6f}"


def export_map_csv(cmap: CoverageMap) -> bytes:
    """UTF-8, LF, fixed 6-decimal reals; absent optionals as empty fields.
    Byte-identical across runs for identical maps."""
    lines = [COVERAGE_HEADER]
    for c in cmap.cells:
        lines.append(",".join([
            _fmt(c.x_m), _fmt(c.y_m), _fmt(c.z_m), _fmt(c.gain_db),
            _fmt(c.ue_ris_power_db), _fmt(c.p_target_dbm), _fmt(c.p_tx_dbm),
            c.status.value,
        ]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def export_classification_csv(cmap: ClassificationMap) -> bytes:
    lines = [CLASSIFICATION_HEADER]
    for c in cmap.cells:
        lines.append(",".join([
            _fmt(c.x_m), _fmt(c.y_m), _fmt(c.z_m), c.category, _fmt(c.reduction_db),
        ]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _infer_grid(xs: list[float], ys: list[float], z: float) -> GridSpec:
    ux, uy = sorted(set(xs)), sorted(set(ys))
    steps = [b - a for a, b in zip(ux, ux[1:])] + [b - a for a, b in zip(uy, uy[1:])]
    step = min(steps) if steps else 1.0
    return GridSpec(x_min=ux[0], x_max=ux[-1], y_min=uy[0], y_max=uy[-1],
                    step_m=step, height_m=z)


def load_map_csv(data: bytes) -> CoverageMap:
    """Rebuild a CoverageMap from its CSV export (grid inferred from the
    coordinate columns)."""
    text = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != COVERAGE_HEADER.split(","):
        raise GridMismatchError("not a coverage CSV (unexpected header)")
    cells = []
    has_ris_col = False
    for row in reader:
        status = CoverageStatus(row["status"])
        ue_ris = row["ue_ris_power_db"]
        if ue_ris:
            has_ris_col = True
        cells.append(CellRecord(
            x_m=float(row["x_m"]), y_m=float(row["y_m"]), z_m=float(row["z_m"]),
            gain_db=float(row["gain_db"]),
            ue_ris_power_db=float(ue_ris) if ue_ris else None,
            p_target_dbm=float(row["p_target_dbm"]) if row["p_target_dbm"]
            else (math.inf if status == CoverageStatus.OUT_OF_COVERAGE else -math.inf),
            p_tx_dbm=float(row["p_tx_dbm"]) if row["p_tx_dbm"] else None,
            status=status,
        ))
    if not cells:
        raise GridMismatchError("empty coverage CSV")
    grid = _infer_grid([c.x_m for c in cells], [c.y_m for c in cells], cells[0].z_m)
    return CoverageMap(grid=grid,
                       variant="with_ris" if has_ris_col else "baseline",
                       cells=tuple(cells))


PGM_COLUMNS = ("gain_db", "ue_ris_power_db", "p_target_dbm", "p_tx_dbm")


def export_map_pgm(cmap: CoverageMap, column: str) -> bytes:
    """P2 portable graymap of one numeric column, min/max normalized to
    0..255; cells without a value render as 0."""
    if column not in PGM_COLUMNS:
        raise ValueError(f"column must be one of {PGM_COLUMNS}")
    ny, nx = cmap.grid.shape
    vals = []
    for c in cmap.cells:
        v = getattr(c, column)
        vals.append(v if (v is not None and math.isfinite(v)) else None)
    finite = [v for v in vals if v is not None]
    lo = min(finite) if finite else 0.0
    hi = max(finite) if finite else 1.0
    span = hi - lo if hi > lo else 1.0
    rows = []
    for iy in range(ny):
        row = []
        for ix in range(nx):
            v = vals[iy * nx + ix]
            row.append("0" if v is None else str(int(round((v - lo) / span * 255))))
        rows.append(" ".join(row))
    body = "\n".join(rows)
    return f"P2\n{nx} {ny}\n255\n{body}\n".encode("ascii")
