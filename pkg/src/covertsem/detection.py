"""Warden radiometer test and Monte-Carlo detection error probability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelDraw, Scenario, warden_received_power


@dataclass(frozen=True)
class WardenConfig:
    tau: float = 50.0
    mc_samples: int = 4096
    zeta_th: float = 0.95
    crn: bool = True

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if not 0 < self.zeta_th <= 1:
            raise ValueError("zeta_th must lie in (0, 1]")


@dataclass(frozen=True)
class DepEstimate:
    p_fa: float
    p_md: float
    samples: int

    @property
    def dep(self) -> float:
        return self.p_fa + self.p_md

    # sample variance of the per-sample indicator fa_i + md_i
    indicator_var: float = 0.0

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.indicator_var / max(self.samples, 1)))


def dep_from_powers(p_h0, p_h1, tau: float) -> DepEstimate:
    """Error fractions from paired warden observations.

    Ties with ``tau`` count toward neither error.
    """
    p_h0 = np.asarray(p_h0, dtype=float)
    p_h1 = np.asarray(p_h1, dtype=float)
    fa = p_h0 > tau
    md = p_h1 < tau
    n = fa.size
    err = fa.astype(float) + md
    var = float(err.var(ddof=1)) if n > 1 else 0.0
    return DepEstimate(p_fa=float(fa.mean()), p_md=float(md.mean()), samples=n, indicator_var=var)


def estimate_dep(
    p_t_watts: float,
    p_j_watts: float,
    scenario: Scenario,
    warden: WardenConfig,
    rng: np.random.Generator,
) -> DepEstimate:
    """Monte-Carlo DEP over the warden-link fading of one slot.

    With ``warden.crn`` the jammer-to-warden draw is shared by both
    hypotheses, so the busy observation dominates the idle one sample by
    sample.
    """
    if p_t_watts < 0 or p_j_watts < 0:
        raise ValueError("powers must be non-negative")
    n = warden.mc_samples
    fading = scenario.fading
    h2_tw = fading.sample_power(rng, n)
    h2_jw = fading.sample_power(rng, n)
    h2_jw_idle = h2_jw if warden.crn else fading.sample_power(rng, n)
    unused = np.zeros(n)
    busy = ChannelDraw(h2_tw, unused, h2_jw, unused)
    idle = ChannelDraw(h2_tw, unused, h2_jw_idle, unused)
    p_h0 = warden_received_power(0.0, p_j_watts, scenario, idle)
    p_h1 = warden_received_power(p_t_watts, p_j_watts, scenario, busy)
    return dep_from_powers(p_h0, p_h1, warden.tau)


def is_covert(dep: DepEstimate | float, zeta_th: float) -> bool:
    value = dep.dep if isinstance(dep, DepEstimate) else float(dep)
    return value > zeta_th
