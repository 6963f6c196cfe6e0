"""Complex channel assembly for one UE position.

h: UE -> BS direct (N-vector), w: UE -> RIS (K-vector), q: RIS -> BS
(K x N matrix).  RIS-side channels support exact per-element tracing or the
far-field plane-wave approximation (one trace to/from the panel center plus
per-element excess-phase offsets).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RisAbsentError
from .raytrace import OrientedPattern, trace_paths, trace_paths_batch, path_amplitude
from .scene import Scene, bs_element_positions, ris_element_positions, unit

DB_FLOOR = -400.0   # sentinel for 10*log10(0)


def power_db(linear: float) -> float:
    if linear <= 0.0:
        return DB_FLOOR
    return 10.0 * math.log10(linear)


def channel_power(v) -> float:
    """v^H v as a linear power."""
    v = np.asarray(v)
    return float(np.real(np.vdot(v, v)))


@dataclass
class ChannelSet:
    h: np.ndarray               # (N,)
    w: np.ndarray | None        # (K,) or None without RIS
    q: np.ndarray | None        # (K, N) or None without RIS
    ue_position: tuple[float, float, float]


def _sum_amplitudes(trace, frequency_hz, tx, rx, walls) -> complex:
    return sum((path_amplitude(p, frequency_hz, tx, rx, walls) for p in trace.paths),
               complex(0.0))


def compute_h(scene: Scene, ue) -> np.ndarray:
    """Direct UE -> BS channel, one exact trace per BS element.  The UE
    antenna is isotropic 0 dBi."""
    positions, bore = bs_element_positions(scene.bs, scene.wavelength_m)
    traces = trace_paths_batch(scene, ue, positions, scene.tracer.max_reflections)
    ue_pat = OrientedPattern.isotropic()
    bs_pat = OrientedPattern(scene.bs.element_pattern, tuple(bore))
    h = np.empty(len(positions), dtype=complex)
    for n, tr in enumerate(traces):
        h[n] = _sum_amplitudes(tr, scene.frequency_hz, ue_pat, bs_pat, scene.walls)
    return h


def compute_w(scene: Scene, ue) -> np.ndarray:
    """UE -> RIS channel over the K unit cells."""
    if scene.ris is None:
        raise RisAbsentError("scene has no RIS")
    ris = scene.ris
    positions = ris_element_positions(ris)
    ue_pat = OrientedPattern.isotropic()
    ris_pat = OrientedPattern(ris.element_pattern, tuple(unit(ris.normal)))
    f = scene.frequency_hz
    if scene.tracer.ris_mode == "per_element":
        traces = trace_paths_batch(scene, ue, positions, scene.tracer.max_reflections)
        return np.array([
            _sum_amplitudes(tr, f, ue_pat, ris_pat, scene.walls) for tr in traces
        ])
    # plane-wave: one trace to the panel center, far-field phase offsets per cell
    center = np.asarray(ris.center_position, dtype=float)
    trace = trace_paths(scene, ue, center, scene.tracer.max_reflections)
    k0 = 2.0 * math.pi / scene.wavelength_m
    rel = positions - center
    w = np.zeros(len(positions), dtype=complex)
    for p in trace.paths:
        amp = path_amplitude(p, f, ue_pat, ris_pat, scene.walls)
        delta = rel @ np.asarray(p.arrival)     # excess length along arrival
        w += amp * np.exp(-1j * k0 * delta)
    return w


def compute_q(scene: Scene) -> np.ndarray:
    """RIS -> BS channel, K x N.  Independent of the UE position; callers
    should compute it once per scene/RIS placement and reuse it."""
    if scene.ris is None:
        raise RisAbsentError("scene has no RIS")
    ris = scene.ris
    ris_positions = ris_element_positions(ris)
    bs_positions, bore = bs_element_positions(scene.bs, scene.wavelength_m)
    ris_pat = OrientedPattern(ris.element_pattern, tuple(unit(ris.normal)))
    bs_pat = OrientedPattern(scene.bs.element_pattern, tuple(bore))
    f = scene.frequency_hz
    kk, nn = len(ris_positions), len(bs_positions)
    if scene.tracer.ris_mode == "per_element":
        q = np.empty((kk, nn), dtype=complex)
        for k in range(kk):
            traces = trace_paths_batch(scene, ris_positions[k], bs_positions,
                                       scene.tracer.max_reflections)
            for n, tr in enumerate(traces):
                q[k, n] = _sum_amplitudes(tr, f, ris_pat, bs_pat, scene.walls)
        return q
    # plane-wave at both ends: one center-to-center trace
    ris_center = np.asarray(ris.center_position, dtype=float)
    bs_center = np.asarray(scene.bs.reference_position, dtype=float)
    trace = trace_paths(scene, ris_center, bs_center, scene.tracer.max_reflections)
    k0 = 2.0 * math.pi / scene.wavelength_m
    rel_ris = ris_positions - ris_center
    rel_bs = bs_positions - bs_center
    q = np.zeros((kk, nn), dtype=complex)
    for p in trace.paths:
        amp = path_amplitude(p, f, ris_pat, bs_pat, scene.walls)
        # a cell displaced along the departure direction shortens its path;
        # a BS element displaced along the arrival direction lengthens it
        delta_k = -(rel_ris @ np.asarray(p.departure))
        delta_n = rel_bs @ np.asarray(p.arrival)
        q += amp * np.exp(-1j * k0 * delta_k)[:, None] * np.exp(-1j * k0 * delta_n)[None, :]
    return q


def compute_channels(scene: Scene, ue) -> ChannelSet:
    h = compute_h(scene, ue)
    w = q = None
    if scene.ris is not None:
        w = compute_w(scene, ue)
        q = compute_q(scene)
    return ChannelSet(h=h, w=w, q=q,
                      ue_position=(float(ue[0]), float(ue[1]), float(ue[2])))
