"""Link budget: MRC output SNR, Shannon target SNR, required transmit power
and closed-loop power control with coverage determination.

All I/O is in dB/dBm; the SNR and power kernels work in the linear domain.
Infinite target powers are internal sentinels only and never reach files.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .scene import LinkBudget


class CoverageStatus(enum.Enum):
    COVERED = "COVERED"
    COVERED_MIN_POWER = "COVERED_MIN_POWER"
    OUT_OF_COVERAGE = "OUT_OF_COVERAGE"


@dataclass(frozen=True)
class LinkResult:
    gain_linear: float              # g^H g
    p_target_dbm: float             # unclamped, may be +/-inf
    p_tx_dbm: float | None          # present iff covered
    status: CoverageStatus


@dataclass(frozen=True)
class TargetService:
    rate_bps: float
    bandwidth_hz: float

    @property
    def se_bps_hz(self) -> float:
        return self.rate_bps / self.bandwidth_hz

    @property
    def snr_target_linear(self) -> float:
        return 2.0 ** self.se_bps_hz - 1.0


def noise_power_dbm(budget: LinkBudget) -> float:
    return (budget.noise_psd_dbm_hz
            + 10.0 * math.log10(budget.bandwidth_hz)
            + budget.noise_figure_db)


def target_snr(rate_bps: float, bandwidth_hz: float) -> float:
    """Linear target SNR from the Shannon relation SE = log2(1 + SNR)."""
    return 2.0 ** (rate_bps / bandwidth_hz) - 1.0


def snr(g, p_tx_dbm: float, budget: LinkBudget) -> float:
    """Linear SNR at the MRC output for equivalent channel g."""
    gain = float(np.real(np.vdot(g, g)))
    return gain * 10.0 ** ((p_tx_dbm - noise_power_dbm(budget)) / 10.0)


def target_power_dbm(gain_linear: float, snr_target_linear: float,
                     budget: LinkBudget) -> float:
    if snr_target_linear == 0.0:
        return -math.inf
    if gain_linear <= 0.0:
        return math.inf
    return (noise_power_dbm(budget)
            + 10.0 * math.log10(snr_target_linear)
            - 10.0 * math.log10(gain_linear))


def apply_power_control(p_target_dbm: float, budget: LinkBudget):
    """Clamp the target power to the amplifier range.  The boundary
    p_target == p_max counts as covered (out of coverage only beyond it)."""
    if p_target_dbm > budget.p_max_dbm:
        return None, CoverageStatus.OUT_OF_COVERAGE
    if p_target_dbm < budget.p_min_dbm:
        return budget.p_min_dbm, CoverageStatus.COVERED_MIN_POWER
    return p_target_dbm, CoverageStatus.COVERED


def evaluate_link(g, budget: LinkBudget) -> LinkResult:
    gain = float(np.real(np.vdot(g, g)))
    s = target_snr(budget.rate_bps, budget.bandwidth_hz)
    p_target = target_power_dbm(gain, s, budget)
    p_tx, status = apply_power_control(p_target, budget)
    return LinkResult(gain_linear=gain, p_target_dbm=p_target,
                      p_tx_dbm=p_tx, status=status)
