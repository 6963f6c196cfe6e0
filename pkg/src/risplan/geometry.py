"""Planar-polygon geometry kernels used by the scene model and the tracer."""
from __future__ import annotations

import numpy as np

# Reflection points closer than this to a polygon edge are rejected, and
# segment/wall contacts closer than this to a segment endpoint do not count
# as crossings.  Meters.
EDGE_MARGIN_M = 1e-9


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero-length vector")
    return v / n


def newell_normal(vertices) -> np.ndarray:
    """Unnormalized polygon normal (magnitude = 2x enclosed area)."""
    v = np.asarray(vertices, dtype=float)
    return np.cross(v, np.roll(v, -1, axis=0)).sum(axis=0)


class PolygonGeom:
    """Precomputed plane and 2D projection of one planar polygon."""

    __slots__ = (
        "index", "vertices", "normal", "offset", "origin", "e1", "e2",
        "verts2d", "reflection_loss_db", "transmission_loss_db",
        "_n", "_e1t", "_e2t", "_orig", "_v2",
    )

    def __init__(self, vertices, index: int = -1,
                 reflection_loss_db: float = 0.0,
                 transmission_loss_db: float = 0.0):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 3:
            raise ValueError("polygon needs at least 3 3D vertices")
        n = newell_normal(v)
        mag = float(np.linalg.norm(n))
        if mag < 1e-12:
            raise ValueError("degenerate polygon (zero area)")
        self.index = index
        self.vertices = v
        self.normal = n / mag
        self.origin = v[0].copy()
        self.offset = float(self.normal @ self.origin)
        e1 = v[1] - v[0]
        e1 = e1 - (e1 @ self.normal) * self.normal
        self.e1 = unit(e1)
        self.e2 = np.cross(self.normal, self.e1)
        self.verts2d = self.to2d(v)
        self.reflection_loss_db = reflection_loss_db
        self.transmission_loss_db = transmission_loss_db
        # plain-float copies for the scalar fast path (hot tracer loops)
        self._n = (float(self.normal[0]), float(self.normal[1]), float(self.normal[2]))
        self._e1t = (float(self.e1[0]), float(self.e1[1]), float(self.e1[2]))
        self._e2t = (float(self.e2[0]), float(self.e2[1]), float(self.e2[2]))
        self._orig = (float(self.origin[0]), float(self.origin[1]), float(self.origin[2]))
        self._v2 = [(float(p[0]), float(p[1])) for p in self.verts2d]

    # -- plane ---------------------------------------------------------

    def plane_distance(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.normal - self.offset

    def planarity_deviation(self) -> float:
        return float(np.abs(self.plane_distance(self.vertices)).max())

    def mirror(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return p - 2.0 * (p @ self.normal - self.offset) * self.normal

    def to2d(self, pts) -> np.ndarray:
        rel = np.asarray(pts, dtype=float) - self.origin
        return np.stack([rel @ self.e1, rel @ self.e2], axis=-1)

    # -- polygon tests -------------------------------------------------

    def contains_strict(self, pts3d, margin: float = EDGE_MARGIN_M) -> np.ndarray:
        """True where each point lies strictly inside the polygon, more than
        ``margin`` away from every edge.  Points are assumed on the plane."""
        p = self.to2d(np.atleast_2d(np.asarray(pts3d, dtype=float)))
        x, y = p[:, 0], p[:, 1]
        inside = np.zeros(len(p), dtype=bool)
        v = self.verts2d
        nv = len(v)
        j = nv - 1
        for i in range(nv):
            xi, yi = v[i]
            xj, yj = v[j]
            cond = (yi > y) != (yj > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xcross = (xj - xi) * (y - yi) / (yj - yi) + xi
            inside ^= cond & (x < xcross)
            j = i
        dmin = np.full(len(p), np.inf)
        j = nv - 1
        for i in range(nv):
            a, b = v[j], v[i]
            w = b - a
            ww = float(w @ w)
            t = np.clip(((p - a) @ w) / ww, 0.0, 1.0)
            proj = a + t[:, None] * w
            dmin = np.minimum(dmin, np.linalg.norm(p - proj, axis=1))
            j = i
        return inside & (dmin > margin)

    def is_simple(self) -> bool:
        """No two non-adjacent edges properly intersect."""
        v = self.verts2d
        nv = len(v)
        edges = [(v[i], v[(i + 1) % nv]) for i in range(nv)]
        for i in range(nv):
            for j in range(i + 1, nv):
                if j == i or (j + 1) % nv == i or (i + 1) % nv == j:
                    continue
                if _segments_cross(*edges[i], *edges[j]):
                    return False
        return True

    def crossing_scalar(self, a, b, margin: float = EDGE_MARGIN_M):
        """Scalar fast path: does the open segment a->b strictly cross this
        polygon's interior?  Returns (t, point) or None.  Grazing contacts
        (in-plane segments, endpoint hits within ``margin``) are ignored."""
        ax, ay, az = float(a[0]), float(a[1]), float(a[2])
        bx, by, bz = float(b[0]), float(b[1]), float(b[2])
        nx, ny, nz = self._n
        dx, dy, dz = bx - ax, by - ay, bz - az
        denom = dx * nx + dy * ny + dz * nz
        if abs(denom) < 1e-15:
            return None
        t = (self.offset - (ax * nx + ay * ny + az * nz)) / denom
        if t <= 0.0 or t >= 1.0:
            return None
        seg_len = (dx * dx + dy * dy + dz * dz) ** 0.5
        if t * seg_len <= margin or (1.0 - t) * seg_len <= margin:
            return None
        px, py, pz = ax + t * dx, ay + t * dy, az + t * dz
        if not self.contains_strict_point(px, py, pz, margin):
            return None
        return t, (px, py, pz)

    def contains_strict_point(self, px, py, pz, margin: float = EDGE_MARGIN_M) -> bool:
        ox, oy, oz = self._orig
        rx, ry, rz = px - ox, py - oy, pz - oz
        e1, e2 = self._e1t, self._e2t
        u = rx * e1[0] + ry * e1[1] + rz * e1[2]
        v = rx * e2[0] + ry * e2[1] + rz * e2[2]
        verts = self._v2
        inside = False
        xj, yj = verts[-1]
        d2min = None
        for xi, yi in verts:
            if (yi > v) != (yj > v) and u < (xj - xi) * (v - yi) / (yj - yi) + xi:
                inside = not inside
            wx, wy = xi - xj, yi - yj
            ww = wx * wx + wy * wy
            tt = ((u - xj) * wx + (v - yj) * wy) / ww
            if tt < 0.0:
                tt = 0.0
            elif tt > 1.0:
                tt = 1.0
            ddx, ddy = u - (xj + tt * wx), v - (yj + tt * wy)
            d2 = ddx * ddx + ddy * ddy
            if d2min is None or d2 < d2min:
                d2min = d2
            xj, yj = xi, yi
        return inside and d2min > margin * margin

    def intersect_segments(self, a, b):
        """Intersection of segments a->b (broadcastable Mx3) with the plane.

        Returns (t, points, ok) where ok marks non-parallel segments with a
        finite crossing parameter; callers apply their own range checks.
        """
        a = np.asarray(a, dtype=float)
        b = np.atleast_2d(np.asarray(b, dtype=float))
        a = np.broadcast_to(a, b.shape)
        denom = (b - a) @ self.normal
        ok = np.abs(denom) > 1e-15
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (self.offset - a @ self.normal) / denom
        t = np.where(ok, t, np.nan)
        pts = a + t[:, None] * (b - a)
        return t, pts, ok


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(p1, p2, p3, p4) -> bool:
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))
