"""Power-control MDP: state vector, constrained reward and episode mechanics."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .channel import ChannelDraw, Scenario, dbw_to_watts, watts_to_dbw
from .detection import DepEstimate, WardenConfig, estimate_dep
from .link import bpsk_bep, covert_rate, sinr
from .semcom import BleuConfig, BleuLookup, Codebook, load_corpus, mean_bleu_at_bep

STATE_FIELDS = (
    "D_tw", "D_tr", "D_jw", "D_jr",
    "alpha_tw", "alpha_tr", "alpha_jw", "alpha_jr",
    "zeta_th",
    "h_tw", "h_tr", "h_jw", "h_jr",
    "k_squared", "wavelength", "tau",
)
FADING_SLICE = slice(9, 13)
STATE_DIM = len(STATE_FIELDS)
ACTION_DIM = 2


@dataclass(frozen=True)
class EnvConfig:
    scenario: Scenario = field(default_factory=Scenario)
    warden: WardenConfig = field(default_factory=WardenConfig)
    energy_factor_t: float = 1.0
    energy_factor_j: float = 1.0
    # None: the upper power bound in watts, i.e. non-binding
    budget_t: float | None = None
    budget_j: float | None = None
    penalty_psi: float = -1.0
    p_t_bounds_dbw: tuple[float, float] = (0.0, 60.0)
    p_j_bounds_dbw: tuple[float, float] = (0.0, 60.0)
    episode_len: int = 50
    reward_trials: int = 20
    use_lookup: bool = True
    lookup_trials: int = 4000
    lookup_cache: str | None = None
    corpus_path: str | None = None
    bleu: BleuConfig = field(default_factory=BleuConfig)
    # power gains above this value saturate in the normalized state
    fading_state_max: float = 4.0

    def __post_init__(self):
        for name in ("p_t_bounds_dbw", "p_j_bounds_dbw"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be ordered (min < max)")
        if self.episode_len < 1:
            raise ValueError("episode_len must be >= 1")
        if not self.penalty_psi < 0:
            raise ValueError("penalty_psi must be negative")
        if self.reward_trials < 1:
            raise ValueError("reward_trials must be >= 1")

    @property
    def e_t(self) -> float:
        return float(dbw_to_watts(self.p_t_bounds_dbw[1])) if self.budget_t is None else self.budget_t

    @property
    def e_j(self) -> float:
        return float(dbw_to_watts(self.p_j_bounds_dbw[1])) if self.budget_j is None else self.budget_j


@dataclass(frozen=True)
class State:
    raw: np.ndarray
    normalized: np.ndarray

    def __getattr__(self, name):
        try:
            return float(self.raw[STATE_FIELDS.index(name)])
        except ValueError:
            raise AttributeError(name) from None


@dataclass(frozen=True)
class Action:
    p_t_watts: float
    p_j_watts: float


@dataclass(frozen=True)
class StepResult:
    next_state: State
    reward: float
    done: bool
    info: dict


@lru_cache(maxsize=8)
def _cached_lookup(corpus_path, trials, bleu_cfg, cache_file):
    if cache_file is not None and Path(cache_file).exists():
        return BleuLookup.from_csv(cache_file)
    lookup = BleuLookup.build(load_corpus(corpus_path), trials=trials, cfg=bleu_cfg)
    if cache_file is not None:
        lookup.to_csv(cache_file)
    return lookup


def check_constraints(action: Action, dep: DepEstimate | float, cfg: EnvConfig) -> tuple[bool, bool, bool]:
    dep_value = dep.dep if isinstance(dep, DepEstimate) else float(dep)
    c_covert = dep_value > cfg.warden.zeta_th
    c_energy_t = cfg.energy_factor_t * action.p_t_watts <= cfg.e_t
    c_energy_j = cfg.energy_factor_j * action.p_j_watts <= cfg.e_j
    return c_covert, c_energy_t, c_energy_j


class CovertSemComEnv:
    """Single-agent environment; one instance per thread."""

    def __init__(self, cfg: EnvConfig | None = None):
        self.cfg = EnvConfig() if cfg is None else cfg
        self.corpus = load_corpus(self.cfg.corpus_path)
        self.codebook = Codebook.from_corpus(self.corpus)
        self._lookup = None
        self._slot = None
        self._draw = None
        self._constants = self._constant_fields()
        self._lo, self._hi = self._state_bounds()

    @property
    def lookup(self) -> BleuLookup:
        if self._lookup is None:
            c = self.cfg
            self._lookup = _cached_lookup(c.corpus_path, c.lookup_trials, c.bleu, c.lookup_cache)
        return self._lookup

    def _constant_fields(self) -> np.ndarray:
        sc = self.cfg.scenario
        d = sc.distances
        e = sc.exponents
        vals = [d["tw"], d["tr"], d["jw"], d["jr"], e.alpha_tw, e.alpha_tr, e.alpha_jw, e.alpha_jr,
                self.cfg.warden.zeta_th, 0.0, 0.0, 0.0, 0.0,
                sc.k_squared, sc.carrier.wavelength_m, self.cfg.warden.tau]
        return np.array(vals, dtype=float)

    def _state_bounds(self):
        lo = self._constants.copy()
        hi = self._constants.copy()
        lo[FADING_SLICE] = 0.0
        hi[FADING_SLICE] = self.cfg.fading_state_max
        return lo, hi

    def normalize(self, raw) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        span = self._hi - self._lo
        safe = np.where(span > 0, span, 1.0)
        z = np.where(span > 0, 2.0 * (np.clip(raw, self._lo, self._hi) - self._lo) / safe - 1.0, 0.0)
        return z

    def _make_state(self, draw: ChannelDraw) -> State:
        raw = self._constants.copy()
        raw[FADING_SLICE] = draw.as_array()
        return State(raw=raw, normalized=self.normalize(raw))

    @property
    def slot(self):
        return self._slot

    @property
    def done(self) -> bool:
        return self._slot is not None and self._slot >= self.cfg.episode_len

    def reset(self, rng: np.random.Generator) -> State:
        self._slot = 0
        self._draw = self.cfg.scenario.draw(rng)
        return self._make_state(self._draw)

    def action_from_normalized(self, a) -> Action:
        """Affine map of ``a`` in [-1, 1]^2 onto the dBW bounds, then to watts."""
        a = np.clip(np.asarray(a, dtype=float).reshape(ACTION_DIM), -1.0, 1.0)
        dbw = self.normalized_to_dbw(a)
        return Action(float(dbw_to_watts(dbw[0])), float(dbw_to_watts(dbw[1])))

    def normalized_to_dbw(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        lo = np.array([self.cfg.p_t_bounds_dbw[0], self.cfg.p_j_bounds_dbw[0]])
        hi = np.array([self.cfg.p_t_bounds_dbw[1], self.cfg.p_j_bounds_dbw[1]])
        return lo + 0.5 * (a + 1.0) * (hi - lo)

    def dbw_to_normalized(self, dbw) -> np.ndarray:
        dbw = np.asarray(dbw, dtype=float)
        lo = np.array([self.cfg.p_t_bounds_dbw[0], self.cfg.p_j_bounds_dbw[0]])
        hi = np.array([self.cfg.p_t_bounds_dbw[1], self.cfg.p_j_bounds_dbw[1]])
        return 2.0 * (dbw - lo) / (hi - lo) - 1.0

    def bleu_at(self, bep, rng: np.random.Generator) -> float:
        if self.cfg.use_lookup:
            return self.lookup(bep)
        return mean_bleu_at_bep(float(bep), self.corpus, self.cfg.reward_trials, self.cfg.bleu, rng, self.codebook)

    def step(self, action: Action | np.ndarray, rng: np.random.Generator) -> StepResult:
        if self._slot is None:
            raise RuntimeError("call reset() before step()")
        if self.done:
            raise RuntimeError("episode is finished; call reset()")
        if not isinstance(action, Action):
            action = self.action_from_normalized(action)
        cfg = self.cfg
        dep = estimate_dep(action.p_t_watts, action.p_j_watts, cfg.scenario, cfg.warden, rng)
        s = float(sinr(action.p_t_watts, action.p_j_watts, cfg.scenario, self._draw))
        bep = bpsk_bep(s)
        flags = check_constraints(action, dep, cfg)
        if all(flags):
            reward = self.bleu_at(bep, rng)
        else:
            reward = cfg.penalty_psi
        self._slot += 1
        self._draw = cfg.scenario.draw(rng)
        info = {
            "p_t_dbw": float(watts_to_dbw(action.p_t_watts)),
            "p_j_dbw": float(watts_to_dbw(action.p_j_watts)),
            "dep": dep.dep,
            "p_fa": dep.p_fa,
            "p_md": dep.p_md,
            "sinr": s,
            "bep": bep,
            "covert_rate": covert_rate(s),
            "c_covert": flags[0],
            "c_energy_t": flags[1],
            "c_energy_j": flags[2],
        }
        return StepResult(self._make_state(self._draw), float(reward), self.done, info)
