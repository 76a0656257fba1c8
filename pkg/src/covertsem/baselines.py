"""Non-learning references: random and fixed policies, the exhaustive grid
oracle and the transmit-power sweep.

Every grid point is scored on the same fading draws (common random numbers),
so monotone trends hold draw by draw rather than only in expectation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .channel import ChannelDraw, dbw_to_watts, warden_received_power
from .detection import dep_from_powers
from .env import ACTION_DIM, CovertSemComEnv
from .link import bpsk_bep, covert_rate, sinr
from .validation import check_action, check_grid, check_states


@dataclass(frozen=True)
class SweepRow:
    p_t_dbw: float
    p_j_dbw: float
    mean_covert_rate: float
    mean_dep: float
    mean_bep: float
    mean_bleu: float
    mean_reward: float
    covert_fraction: float
    # extras beyond the core schema, always last
    mean_covert_rate_gated: float
    bep_mean_channel: float


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def sweep_csv(rows, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(float(v)) for v in astuple(row)])
    return buf.getvalue()


class _CrnDraws:
    """Shared fading realizations for scoring many power pairs."""

    def __init__(self, env: CovertSemComEnv, draws: int, seed: int):
        if draws < 1:
            raise ValueError("draws must be >= 1")
        self.env = env
        self.draw = env.cfg.scenario.draw(np.random.default_rng(seed), draws)
        self.bleu_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        self.n = draws

    def score(self, p_t_dbw: float, p_j_dbw: float) -> SweepRow:
        env, cfg, dr = self.env, self.env.cfg, self.draw
        p_t = float(dbw_to_watts(p_t_dbw))
        p_j = float(dbw_to_watts(p_j_dbw))
        sc, warden = cfg.scenario, cfg.warden
        idle = ChannelDraw(dr.h2_tw, dr.h2_tr, dr.h2_jw, dr.h2_jr)
        p_h0 = warden_received_power(0.0, p_j, sc, idle)
        p_h1 = warden_received_power(p_t, p_j, sc, dr)
        dep = dep_from_powers(p_h0, p_h1, warden.tau)

        # in-loop covertness checks use mc_samples-sized estimates
        m = min(warden.mc_samples, self.n)
        blocks = [dep_from_powers(p_h0[i : i + m], p_h1[i : i + m], warden.tau).dep
                  for i in range(0, self.n - m + 1, m)]
        covert_fraction = float(np.mean([b > warden.zeta_th for b in blocks]))

        s = sinr(p_t, p_j, sc, dr)
        bep = bpsk_bep(s)
        rate = covert_rate(s)
        if cfg.use_lookup:
            bleu = env.lookup(bep)
        else:
            bleu = np.array([env.bleu_at(b, self.bleu_rng) for b in bep])
        covert = dep.dep > warden.zeta_th
        energy_ok = (cfg.energy_factor_t * p_t <= cfg.e_t) and (cfg.energy_factor_j * p_j <= cfg.e_j)
        mean_bleu = float(np.mean(bleu))
        reward = mean_bleu if (covert and energy_ok) else cfg.penalty_psi
        mean_gain = ChannelDraw(1.0, 1.0, 1.0, 1.0)
        return SweepRow(
            p_t_dbw=float(p_t_dbw),
            p_j_dbw=float(p_j_dbw),
            mean_covert_rate=float(np.mean(rate)),
            mean_dep=dep.dep,
            mean_bep=float(np.mean(bep)),
            mean_bleu=mean_bleu,
            mean_reward=float(reward),
            covert_fraction=covert_fraction,
            mean_covert_rate_gated=float(np.mean(rate)) if covert else 0.0,
            bep_mean_channel=float(bpsk_bep(sinr(p_t, p_j, sc, mean_gain))),
        )


def sweep_transmit_power(env: CovertSemComEnv, p_t_grid_dbw, p_j_fixed_dbw: float, draws: int, seed: int):
    """Fading-averaged metrics along a transmit-power grid.

    ``-inf`` in the grid stands for an idle transmitter (0 W).
    """
    grid = check_grid(p_t_grid_dbw, "p_t_grid_dbw")
    crn = _CrnDraws(env, draws, seed)
    return [crn.score(p, p_j_fixed_dbw) for p in grid]


def grid_search_oracle(env: CovertSemComEnv, p_t_grid_dbw, p_j_grid_dbw, draws: int, seed: int):
    """Exhaustive argmax of the fading-averaged reward.

    Ties go to lower total cost ``eta_t p_t + eta_j p_j``, then lower p_t.
    Returns ``(best_row, table)`` with the table in (p_j, p_t) row-major order.
    """
    pt_grid = check_grid(p_t_grid_dbw, "p_t_grid_dbw")
    pj_grid = check_grid(p_j_grid_dbw, "p_j_grid_dbw")
    crn = _CrnDraws(env, draws, seed)
    table = [crn.score(pt, pj) for pj in pj_grid for pt in pt_grid]
    cfg = env.cfg

    def key(row: SweepRow):
        p_t = float(dbw_to_watts(row.p_t_dbw))
        p_j = float(dbw_to_watts(row.p_j_dbw))
        cost = cfg.energy_factor_t * p_t + cfg.energy_factor_j * p_j
        return (-row.mean_reward, cost, p_t)

    best = min(table, key=key)
    return best, table


class RandomPolicy(BaseEstimator):
    """Uniform actions over the normalized box, ignoring the state."""

    def __init__(self, random_state=0):
        self.random_state = random_state

    def fit(self, env=None, y=None):
        self.rng_ = np.random.default_rng(self.random_state)
        return self

    def act(self, state, rng=None):
        rng = rng if rng is not None else self._rng()
        return rng.uniform(-1.0, 1.0, ACTION_DIM)

    def predict(self, X):
        X = check_states(X)
        return self._rng().uniform(-1.0, 1.0, (X.shape[0], ACTION_DIM))

    def _rng(self):
        if not hasattr(self, "rng_"):
            self.fit()
        return self.rng_


class FixedActionPolicy(BaseEstimator):
    """Always plays ``action_dbw = (p_t_dbw, p_j_dbw)``."""

    def __init__(self, action_dbw=(45.0, 45.0)):
        self.action_dbw = action_dbw

    def fit(self, env: CovertSemComEnv, y=None):
        self.action_ = env.dbw_to_normalized(check_action(self.action_dbw))
        return self

    def act(self, state, rng=None):
        check_is_fitted(self, "action_")
        return self.action_.copy()

    def predict(self, X):
        check_is_fitted(self, "action_")
        X = check_states(X)
        return np.tile(self.action_, (X.shape[0], 1))


class GridSearchOracle(BaseEstimator):
    """Fits the best constant action by exhaustive grid search."""

    def __init__(self, p_t_grid_dbw=None, p_j_grid_dbw=None, draws=4096, random_state=0):
        self.p_t_grid_dbw = p_t_grid_dbw
        self.p_j_grid_dbw = p_j_grid_dbw
        self.draws = draws
        self.random_state = random_state

    def fit(self, env: CovertSemComEnv, y=None):
        cfg = env.cfg
        pt = self.p_t_grid_dbw
        pj = self.p_j_grid_dbw
        if pt is None:
            pt = np.arange(cfg.p_t_bounds_dbw[0], cfg.p_t_bounds_dbw[1] + 0.5, 1.0)
        if pj is None:
            pj = np.arange(cfg.p_j_bounds_dbw[0], cfg.p_j_bounds_dbw[1] + 0.5, 1.0)
        self.best_, self.table_ = grid_search_oracle(env, pt, pj, self.draws, self.random_state)
        self.best_reward_ = self.best_.mean_reward
        self.best_action_dbw_ = np.array([self.best_.p_t_dbw, self.best_.p_j_dbw])
        self.action_ = env.dbw_to_normalized(self.best_action_dbw_)
        return self

    def act(self, state, rng=None):
        check_is_fitted(self, "action_")
        return self.action_.copy()

    def predict(self, X):
        check_is_fitted(self, "action_")
        X = check_states(X)
        return np.tile(self.action_, (X.shape[0], 1))
