"""RIS reflection weights and the equivalent UE -> BS channel.

Two weight rules are provided and never silently substituted for each other:

* ``literal`` conjugates only the UE -> RIS phase, b[k] = conj(w[k])/|w[k]|.
* ``cascade_conjugate`` additionally compensates the RIS -> BS and direct
  phases so the cascade adds coherently on one reference BS antenna.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

DEAD_ELEMENT_EPS = 1e-300


@dataclass(frozen=True)
class RisWeights:
    b: np.ndarray                     # (K,), unit modulus
    mode: str                         # literal | cascade_conjugate
    reference_antenna: int | None = None


def ris_weights_literal(w) -> RisWeights:
    """b[k] = conj(w[k]) / |w[k]|; dead elements (|w[k]| ~ 0) get b[k] = 1."""
    w = np.asarray(w, dtype=complex)
    mag = np.abs(w)
    dead = mag < DEAD_ELEMENT_EPS
    b = np.ones_like(w)
    b[~dead] = np.conj(w[~dead]) / mag[~dead]
    return RisWeights(b=b, mode="literal")


def ris_weights_cascade(w, q, h, n_ref: int) -> RisWeights:
    """Phase-align each cascade term w[k] b[k] q[k, n_ref] with h[n_ref]."""
    w = np.asarray(w, dtype=complex)
    q = np.asarray(q, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if q.shape != (len(w), len(h)):
        raise DimensionMismatchError(
            f"q must be {len(w)}x{len(h)}, got {q.shape}")
    if not 0 <= n_ref < len(h):
        raise IndexError(f"reference antenna {n_ref} out of range 0..{len(h) - 1}")
    h_phase = 0.0 if abs(h[n_ref]) < DEAD_ELEMENT_EPS else float(np.angle(h[n_ref]))
    phase = np.angle(w) + np.angle(q[:, n_ref]) - h_phase
    b = np.exp(-1j * phase)
    dead = np.abs(w) < DEAD_ELEMENT_EPS
    b[dead] = 1.0
    return RisWeights(b=b, mode="cascade_conjugate", reference_antenna=n_ref)


def equivalent_channel(h, w=None, q=None, weights: RisWeights | None = None) -> np.ndarray:
    """g[n] = h[n] + sum_k q[k, n] b[k] w[k]; without a RIS, g = h."""
    h = np.asarray(h, dtype=complex)
    if weights is None or w is None or q is None or len(np.asarray(w)) == 0:
        return h.copy()
    w = np.asarray(w, dtype=complex)
    q = np.asarray(q, dtype=complex)
    b = np.asarray(weights.b, dtype=complex)
    if q.shape != (len(w), len(h)) or len(b) != len(w):
        raise DimensionMismatchError(
            f"inconsistent dimensions: h={h.shape} w={w.shape} q={q.shape} b={b.shape}")
    return h + (b * w) @ q
