"""Deterministic image-method multipath tracer.

Enumerates the direct path plus every valid specular reflection path up to a
configured order between two points, records wall transmissions along each
segment, and converts paths to complex amplitudes with a free-space plus
scalar-material-loss model.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateEndpointsError
from .geometry import EDGE_MARGIN_M, PolygonGeom
from .scene import AntennaPattern, Scene, Wall, SPEED_OF_LIGHT_M_S

Point = tuple[float, float, float]


@dataclass(frozen=True)
class Interaction:
    kind: str       # reflection | transmission
    wall: int
    point: Point


@dataclass(frozen=True)
class Path:
    points: tuple[Point, ...]
    length_m: float
    interactions: tuple[Interaction, ...]
    departure: Point    # unit vector, tx -> first point
    arrival: Point      # unit vector, last point -> rx (propagation direction)


@dataclass(frozen=True)
class PathTrace:
    tx: Point
    rx: Point
    paths: tuple[Path, ...]


@dataclass(frozen=True)
class OrientedPattern:
    pattern: AntennaPattern
    boresight: Point

    @staticmethod
    def isotropic() -> "OrientedPattern":
        return OrientedPattern(AntennaPattern(), (0.0, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Antenna patterns
# ---------------------------------------------------------------------------

def gain_from_cos(pattern: AntennaPattern, cos_theta: float) -> float:
    """Linear power gain at angle theta from the element boresight."""
    peak = 10.0 ** (pattern.peak_gain_dbi / 10.0)
    if pattern.kind == "isotropic":
        return peak
    if cos_theta > 0.0:
        return peak * cos_theta ** pattern.exponent
    return peak * 10.0 ** (pattern.backlobe_floor_db / 10.0)


def pattern_gain(pattern: AntennaPattern, direction) -> float:
    """Linear power gain toward a unit direction in the element frame
    (boresight along +z)."""
    return gain_from_cos(pattern, float(direction[2]))


# ---------------------------------------------------------------------------
# Scene compilation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _compiled(scene: Scene) -> tuple[PolygonGeom, ...]:
    geoms = []
    for i, w in enumerate(scene.walls):
        g = PolygonGeom(w.vertices, index=i,
                        reflection_loss_db=w.material.reflection_loss_db,
                        transmission_loss_db=w.material.transmission_loss_db)
        geoms.append(g)
    return tuple(geoms)


# ---------------------------------------------------------------------------
# Tracing
# ---------------------------------------------------------------------------

def _as_point(v) -> Point:
    return (float(v[0]), float(v[1]), float(v[2]))


def _segment_crossings(geoms, a, b, exclude: frozenset[int]):
    """Transmission interactions of the open segment a->b, in traversal
    order.  Endpoint contacts within EDGE_MARGIN_M and grazing (in-plane)
    contacts are ignored."""
    hits = []
    for g in geoms:
        if g.index in exclude:
            continue
        hit = g.crossing_scalar(a, b)
        if hit is not None:
            hits.append((hit[0], g.index, hit[1]))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [Interaction("transmission", w, p) for _, w, p in hits]


def _build_path(geoms, points: list[np.ndarray], refl_walls: tuple[int, ...]):
    """Assemble a Path from an ordered point chain tx..rx, inserting the
    transmission interactions each segment incurs."""
    interactions: list[Interaction] = []
    total = 0.0
    nseg = len(points) - 1
    for j in range(nseg):
        a, b = points[j], points[j + 1]
        total += math.dist(a, b)
        exclude = set()
        if j >= 1:
            exclude.add(refl_walls[j - 1])
        if j < len(refl_walls):
            exclude.add(refl_walls[j])
        interactions.extend(_segment_crossings(geoms, a, b, frozenset(exclude)))
        if j < len(refl_walls):
            interactions.append(
                Interaction("reflection", refl_walls[j], _as_point(points[j + 1])))
    dep = points[1] - points[0]
    arr = points[-1] - points[-2]
    dep = dep / np.linalg.norm(dep)
    arr = arr / np.linalg.norm(arr)
    return Path(
        points=tuple(_as_point(p) for p in points),
        length_m=total,
        interactions=tuple(interactions),
        departure=_as_point(dep),
        arrival=_as_point(arr),
    )


def _path_key(path: Path):
    return tuple((i.kind, i.wall) for i in path.interactions)


def trace_paths_batch(scene: Scene, tx, rxs, max_order: int | None = None) -> list[PathTrace]:
    """Trace tx -> each rx in one pass; the image chain per wall sequence is
    shared, validation is vectorized across receivers."""
    if max_order is None:
        max_order = scene.tracer.max_reflections
    tx = np.asarray(tx, dtype=float)
    rxs = np.atleast_2d(np.asarray(rxs, dtype=float))
    m = len(rxs)
    dists = np.linalg.norm(rxs - tx, axis=1)
    if np.any(dists < 1e-9):
        raise DegenerateEndpointsError("tx and rx coincide (|tx-rx| < 1e-9 m)")
    geoms = _compiled(scene)
    found: list[dict] = [dict() for _ in range(m)]

    # direct path, always present
    for i in range(m):
        pts = [tx, rxs[i]]
        path = _build_path(geoms, pts, ())
        found[i][_path_key(path)] = path

    nwalls = len(geoms)
    for order in range(1, max_order + 1):
        for seq in itertools.product(range(nwalls), repeat=order):
            if any(seq[j] == seq[j + 1] for j in range(order - 1)):
                continue
            _try_sequence(geoms, tx, rxs, seq, found)

    traces = []
    for i in range(m):
        paths = sorted(found[i].values(),
                       key=lambda p: (p.length_m, len(p.interactions), _path_key(p)))
        traces.append(PathTrace(tx=_as_point(tx), rx=_as_point(rxs[i]),
                                paths=tuple(paths)))
    return traces


def _try_sequence(geoms, tx, rxs, seq: tuple[int, ...], found: list[dict]) -> None:
    order = len(seq)
    images = [tx]
    for w in seq:
        images.append(geoms[w].mirror(images[-1]))

    m = len(rxs)
    valid = np.ones(m, dtype=bool)
    target = rxs.copy()
    refl_pts: list[np.ndarray] = [None] * order  # type: ignore
    for j in range(order - 1, -1, -1):
        g = geoms[seq[j]]
        a = images[j + 1]
        t, pts, ok = g.intersect_segments(a, target)
        seg_len = np.linalg.norm(target - a, axis=1)
        with np.errstate(invalid="ignore"):
            in_range = ok & np.isfinite(t) \
                & (t * seg_len > EDGE_MARGIN_M) \
                & ((1.0 - t) * seg_len > EDGE_MARGIN_M)
        valid &= in_range
        if not valid.any():
            return
        inside = np.zeros(m, dtype=bool)
        inside[valid] = g.contains_strict(pts[valid])
        valid &= inside
        if not valid.any():
            return
        refl_pts[j] = pts
        target = np.where(valid[:, None], pts, target)

    for i in np.nonzero(valid)[0]:
        pts = [tx] + [refl_pts[j][i] for j in range(order)] + [rxs[i]]
        if any(np.linalg.norm(pts[j + 1] - pts[j]) <= 1e-9 for j in range(len(pts) - 1)):
            continue
        path = _build_path(geoms, pts, seq)
        key = _path_key(path)
        if key not in found[i]:
            found[i][key] = path


def trace_paths(scene: Scene, tx, rx, max_order: int | None = None) -> PathTrace:
    """Direct path plus all image-method reflection paths of order 1..max_order."""
    return trace_paths_batch(scene, tx, [rx], max_order)[0]


# ---------------------------------------------------------------------------
# Path -> complex amplitude
# ---------------------------------------------------------------------------

def path_amplitude(path: Path, frequency_hz: float,
                   tx: OrientedPattern, rx: OrientedPattern,
                   walls: tuple[Wall, ...]) -> complex:
    """Free-space amplitude with pattern gains at both ends, scalar material
    losses per interaction and the propagation phase e^(-j 2 pi L / lambda)."""
    lam = SPEED_OF_LIGHT_M_S / frequency_hz
    g_tx = gain_from_cos(tx.pattern, float(np.dot(path.departure, tx.boresight)))
    g_rx = gain_from_cos(rx.pattern, float(-np.dot(path.arrival, rx.boresight)))
    loss = 1.0
    for it in path.interactions:
        mat = walls[it.wall].material
        db = mat.reflection_loss_db if it.kind == "reflection" else mat.transmission_loss_db
        loss *= 10.0 ** (-db / 20.0)
    mag = math.sqrt(g_tx * g_rx) * lam / (4.0 * math.pi * path.length_m) * loss
    phase = -2.0 * math.pi * path.length_m / lam
    return mag * complex(math.cos(phase), math.sin(phase))
