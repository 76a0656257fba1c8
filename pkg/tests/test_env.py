from dataclasses import replace

import numpy as np
import pytest

from covertsem.channel import dbw_to_watts
from covertsem.detection import DepEstimate
from covertsem.env import (
    FADING_SLICE,
    STATE_FIELDS,
    Action,
    CovertSemComEnv,
    EnvConfig,
    check_constraints,
)
from covertsem.semcom import mean_bleu_at_bep


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(p_t_bounds_dbw=(10.0, 10.0)), dict(episode_len=0), dict(penalty_psi=0.0), dict(reward_trials=0)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EnvConfig(**kwargs)

    def test_default_budgets_are_upper_bounds(self):
        cfg = EnvConfig()
        assert cfg.e_t == pytest.approx(1e6) and cfg.e_j == pytest.approx(1e6)


class TestConstraints:
    def cfg(self, **kw):
        return EnvConfig(**kw)

    def test_inclusive_energy_bound(self):
        c = check_constraints(Action(10.0, 0.0), 1.0, self.cfg(energy_factor_t=1.0, budget_t=10.0))
        assert c[1] is True

    def test_energy_violation(self):
        c = check_constraints(Action(6.0, 0.0), 1.0, self.cfg(energy_factor_t=2.0, budget_t=10.0))
        assert c[1] is False

    def test_covert_flag(self):
        assert check_constraints(Action(1.0, 1.0), DepEstimate(0.99, 0.0, 1), self.cfg())[0] is True
        assert check_constraints(Action(1.0, 1.0), 0.95, self.cfg())[0] is False

    def test_jammer_budget(self):
        c = check_constraints(Action(1.0, 11.0), 1.0, self.cfg(budget_j=10.0))
        assert c == (True, True, False)


class TestReset:
    def test_deterministic(self, paper_env):
        a = paper_env.reset(np.random.default_rng(3))
        b = paper_env.reset(np.random.default_rng(3))
        assert np.array_equal(a.raw, b.raw) and np.array_equal(a.normalized, b.normalized)

    def test_geometry_from_layout(self, paper_env):
        s = paper_env.reset(np.random.default_rng(0))
        assert s.D_tw == 100.0
        assert (s.D_tr, s.D_jw, s.D_jr) == (100.0, 100.0, 100.0)
        assert (s.alpha_tw, s.alpha_tr, s.alpha_jw, s.alpha_jr) == (1.2, 1.0, 1.4, 1.4)
        assert s.tau == 50.0 and s.zeta_th == 0.95
        assert len(s.raw) == len(STATE_FIELDS) == 16

    def test_fading_differs_between_seeds(self, paper_env):
        a = paper_env.reset(np.random.default_rng(1)).raw[FADING_SLICE]
        b = paper_env.reset(np.random.default_rng(2)).raw[FADING_SLICE]
        assert not np.array_equal(a, b)
        assert np.all(a >= 0)


class TestStep:
    def test_budget_violation_gives_penalty(self, paper_config, lookup_cache):
        cfg = replace(paper_config.env_obj(), budget_t=100.0, lookup_cache=lookup_cache)
        env = CovertSemComEnv(cfg)
        rng = np.random.default_rng(0)
        env.reset(rng)
        res = env.step(Action(1000.0, 1.0), rng)
        assert res.reward == cfg.penalty_psi
        assert res.info["c_energy_t"] is False

    def test_silent_transmitter_scores_noise_bleu(self, paper_config, corpus_env_direct):
        env = corpus_env_direct
        rng = np.random.default_rng(5)
        env.reset(rng)
        res = env.step(Action(0.0, 1e3), rng)
        assert res.info["dep"] == 1.0 and res.info["bep"] == 0.5
        # oracle: direct simulation at bep 0.5
        ref = mean_bleu_at_bep(0.5, env.corpus, 4000, env.cfg.bleu, np.random.default_rng(1), env.codebook)
        assert 0.0 < res.reward < 0.1
        assert abs(res.reward - ref) < 0.05

    def test_episode_length_and_done(self, paper_env):
        rng = np.random.default_rng(0)
        paper_env.reset(rng)
        results = [paper_env.step(np.zeros(2), rng) for _ in range(paper_env.cfg.episode_len)]
        assert [r.done for r in results] == [False] * (len(results) - 1) + [True]
        with pytest.raises(RuntimeError):
            paper_env.step(np.zeros(2), rng)

    def test_step_before_reset(self, paper_config, lookup_cache):
        env = CovertSemComEnv(replace(paper_config.env_obj(), lookup_cache=lookup_cache))
        with pytest.raises(RuntimeError):
            env.step(np.zeros(2), np.random.default_rng(0))

    def test_reward_range_and_constants(self, paper_env):
        rng = np.random.default_rng(9)
        s0 = paper_env.reset(rng)
        const = np.ones(16, bool)
        const[FADING_SLICE] = False
        for _ in range(paper_env.cfg.episode_len):
            res = paper_env.step(rng.uniform(-1, 1, 2), rng)
            assert res.reward == paper_env.cfg.penalty_psi or 0.0 <= res.reward <= 1.0
            if not all((res.info["c_covert"], res.info["c_energy_t"], res.info["c_energy_j"])):
                assert res.reward == paper_env.cfg.penalty_psi
            assert np.array_equal(res.next_state.raw[const], s0.raw[const])
            assert np.all(np.abs(res.next_state.normalized) <= 1.0)

    def test_trajectory_reproducible(self, paper_env):
        def run():
            rng = np.random.default_rng(21)
            paper_env.reset(rng)
            actions = np.random.default_rng(4).uniform(-1, 1, (paper_env.cfg.episode_len, 2))
            return [(r.reward, r.next_state.raw.tobytes()) for r in (paper_env.step(a, rng) for a in actions)]

        assert run() == run()

    def test_action_mapping(self, paper_env):
        act = paper_env.action_from_normalized([-1.0, 1.0])
        assert act.p_t_watts == pytest.approx(1.0) and act.p_j_watts == pytest.approx(1e6)
        mid = paper_env.action_from_normalized([0.0, 0.0])
        assert mid.p_t_watts == pytest.approx(float(dbw_to_watts(30.0)))
        assert np.allclose(paper_env.dbw_to_normalized(paper_env.normalized_to_dbw([0.3, -0.2])), [0.3, -0.2])

    def test_direct_simulation_mode(self, corpus_env_direct):
        rng = np.random.default_rng(0)
        corpus_env_direct.reset(rng)
        res = corpus_env_direct.step(Action(float(dbw_to_watts(45)), float(dbw_to_watts(45))), rng)
        assert 0.0 <= res.reward <= 1.0


@pytest.fixture(scope="module")
def corpus_env_direct(paper_config):
    return CovertSemComEnv(replace(paper_config.env_obj(), use_lookup=False, reward_trials=400))


def test_lookup_agrees_with_direct_simulation(paper_env):
    lk = paper_env.lookup
    for bep in (0.001, 0.02, 0.07, 0.15, 0.3):
        direct = mean_bleu_at_bep(bep, paper_env.corpus, 4000, paper_env.cfg.bleu,
                                  np.random.default_rng(12345), paper_env.codebook)
        assert abs(lk(bep) - direct) < 0.02
