"""Radio propagation primitives: free-space path gain, alpha-mu fading, and
received-power composition at the warden.

All powers are in watts. dBW only appears at the configuration boundary
(see :func:`dbw_to_watts`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

LINKS = ("tw", "tr", "jw", "jr")


def dbw_to_watts(dbw):
    return np.power(10.0, np.asarray(dbw, dtype=float) / 10.0)


def watts_to_dbw(watts):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(watts, dtype=float))


@dataclass(frozen=True)
class NodePositions:
    """2-D coordinates in meters of the five nodes."""

    transmitter: tuple[float, float] = (0.0, 0.0)
    warden: tuple[float, float] = (0.0, 100.0)
    receiver: tuple[float, float] = (100.0, 0.0)
    jammer: tuple[float, float] = (100.0, 100.0)
    regulator: tuple[float, float] = (50.0, 50.0)

    def __post_init__(self):
        for link, d in self.distances().items():
            if not d > 0:
                raise ValueError(f"link {link} has zero length")

    def distances(self) -> dict[str, float]:
        ends = {"t": self.transmitter, "r": self.receiver, "j": self.jammer, "w": self.warden}
        return {link: math.dist(ends[link[0]], ends[link[1]]) for link in LINKS}


@dataclass(frozen=True)
class Carrier:
    frequency_hz: float = 2.4e9
    speed_of_light: float = SPEED_OF_LIGHT
    wavelength: float | None = None

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise ValueError("frequency_hz must be positive")
        if self.wavelength is not None and not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def wavelength_m(self) -> float:
        if self.wavelength is not None:
            return self.wavelength
        return self.speed_of_light / self.frequency_hz


@dataclass(frozen=True)
class PathLossExponents:
    alpha_tw: float = 1.2
    alpha_tr: float = 1.0
    alpha_jw: float = 1.4
    alpha_jr: float = 1.4

    def __post_init__(self):
        for name in ("alpha_tw", "alpha_tr", "alpha_jw", "alpha_jr"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def for_link(self, link: str) -> float:
        return getattr(self, f"alpha_{link}")


@dataclass(frozen=True)
class FadingModel:
    """alpha-mu envelope fading normalized to ``E[|h|^2] = mean_power``.

    The envelope is ``R = r_hat * G**(1/alpha_shape)`` with
    ``G ~ Gamma(mu, 1/mu)``; ``r_hat`` comes from the closed-form moment
    ``E[G**(2/alpha)] = Gamma(mu + 2/alpha) / (Gamma(mu) * mu**(2/alpha))``.
    """

    alpha_shape: float = 2.0
    mu: float = 4.0
    mean_power: float = 1.0
    _power_scale: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.alpha_shape > 0 and self.mu > 0 and self.mean_power > 0):
            raise ValueError("alpha_shape, mu and mean_power must be positive")
        q = 2.0 / self.alpha_shape
        log_moment = math.lgamma(self.mu + q) - math.lgamma(self.mu) - q * math.log(self.mu)
        object.__setattr__(self, "_power_scale", self.mean_power * math.exp(-log_moment))

    @property
    def power_scale(self) -> float:
        """``r_hat**2``."""
        return self._power_scale

    def sample_power(self, rng: np.random.Generator, size=None):
        g = rng.gamma(self.mu, 1.0 / self.mu, size=size)
        return self._power_scale * g ** (2.0 / self.alpha_shape)


def sample_fading_power(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw ``|h|^2`` from ``model`` (a scalar when ``size`` is None)."""
    return model.sample_power(rng, size)


@dataclass(frozen=True)
class NoiseFloor:
    k_squared: float = 1e-9

    def __post_init__(self):
        if not self.k_squared >= 0:
            raise ValueError("k_squared must be non-negative")


@dataclass(frozen=True)
class ChannelDraw:
    """Per-slot power gains ``|h|^2`` for the four links (scalars or arrays)."""

    h2_tw: float | np.ndarray
    h2_tr: float | np.ndarray
    h2_jw: float | np.ndarray
    h2_jr: float | np.ndarray

    def as_array(self) -> np.ndarray:
        return np.array([self.h2_tw, self.h2_tr, self.h2_jw, self.h2_jr], dtype=float)


def path_gain(distance_m, path_loss_exponent, wavelength_m):
    """Free-space style gain ``(wavelength / (4 pi d)) ** exponent``."""
    d = np.asarray(distance_m, dtype=float)
    lam = np.asarray(wavelength_m, dtype=float)
    if np.any(d <= 0) or np.any(lam <= 0):
        raise ValueError("distance and wavelength must be positive")
    if np.any(np.asarray(path_loss_exponent) <= 0):
        raise ValueError("path loss exponent must be positive")
    g = (lam / (4.0 * np.pi * d)) ** path_loss_exponent
    return float(g) if np.ndim(g) == 0 else g


@dataclass(frozen=True)
class Scenario:
    positions: NodePositions = field(default_factory=NodePositions)
    carrier: Carrier = field(default_factory=Carrier)
    exponents: PathLossExponents = field(default_factory=PathLossExponents)
    fading: FadingModel = field(default_factory=FadingModel)
    noise: NoiseFloor = field(default_factory=NoiseFloor)

    @property
    def distances(self) -> dict[str, float]:
        return self.positions.distances()

    @property
    def gains(self) -> dict[str, float]:
        lam = self.carrier.wavelength_m
        d = self.distances
        return {link: path_gain(d[link], self.exponents.for_link(link), lam) for link in LINKS}

    @property
    def k_squared(self) -> float:
        return self.noise.k_squared

    def draw(self, rng: np.random.Generator, size=None) -> ChannelDraw:
        """Independent fading draws for all four links."""
        h = self.fading.sample_power(rng, size=(4,) if size is None else (4, size))
        return ChannelDraw(*h)


def _check_powers(p_t, p_j):
    if np.any(np.asarray(p_t) < 0) or np.any(np.asarray(p_j) < 0):
        raise ValueError("powers must be non-negative")


def warden_received_power(p_t_watts, p_j_watts, scenario: Scenario, draw: ChannelDraw):
    """Power seen by the warden; ``p_t_watts = 0`` gives the idle hypothesis."""
    _check_powers(p_t_watts, p_j_watts)
    g = scenario.gains
    return (
        scenario.k_squared
        + p_t_watts * g["tw"] * draw.h2_tw
        + p_j_watts * g["jw"] * draw.h2_jw
    )
