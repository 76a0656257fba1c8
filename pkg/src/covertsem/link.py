"""Receiver-side link quality: SINR, coherent BPSK bit-error probability and
covert (Shannon) rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import ChannelDraw, Scenario, _check_powers


@dataclass(frozen=True)
class LinkQuality:
    sinr: float
    bep: float
    covert_rate: float


def sinr(p_t_watts, p_j_watts, scenario: Scenario, draw: ChannelDraw):
    """Jamming is treated as Gaussian interference at the receiver."""
    _check_powers(p_t_watts, p_j_watts)
    g = scenario.gains
    denom = p_j_watts * g["jr"] * np.asarray(draw.h2_jr) + scenario.k_squared
    if np.any(denom <= 0):
        raise ValueError("zero interference-plus-noise power")
    return p_t_watts * g["tr"] * np.asarray(draw.h2_tr) / denom


def bpsk_bep(sinr):
    """``0.5 * erfc(sqrt(sinr))``, i.e. ``Q(sqrt(2 sinr))``."""
    s = np.asarray(sinr, dtype=float)
    if np.any(s < 0):
        raise ValueError("sinr must be non-negative")
    out = 0.5 * erfc(np.sqrt(s))
    return float(out) if out.ndim == 0 else out


def covert_rate(sinr):
    """Spectral efficiency in bits/s/Hz."""
    out = np.log2(1.0 + np.asarray(sinr, dtype=float))
    return float(out) if out.ndim == 0 else out


def link_quality(p_t_watts, p_j_watts, scenario: Scenario, draw: ChannelDraw) -> LinkQuality:
    s = float(sinr(p_t_watts, p_j_watts, scenario, draw))
    return LinkQuality(sinr=s, bep=bpsk_bep(s), covert_rate=covert_rate(s))
