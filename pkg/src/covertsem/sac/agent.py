"""SAC training loop, deterministic evaluation and the estimator wrapper."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..env import ACTION_DIM, STATE_DIM, CovertSemComEnv
from ..validation import check_states
from .core import Critic, GaussianPolicy, ReplayBuffer, SacHyperparams, policy_update, q_update
from .nn import make_optimizer, soft_update

logger = logging.getLogger(__name__)


@dataclass
class CurvePoint:
    episode: int
    mean_reward: float
    eval_reward: float | None = None


@dataclass
class TrainResult:
    policy: GaussianPolicy
    q1: Critic
    q2: Critic
    target_q1: Critic
    target_q2: Critic
    curve: list[CurvePoint] = field(default_factory=list)
    steps: int = 0


def evaluate(policy, env: CovertSemComEnv, episodes: int, seed: int) -> float:
    """Mean of per-episode mean rewards under ``policy.act``; no learning."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    env_rng, act_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    totals = []
    for _ in range(episodes):
        state = env.reset(env_rng)
        rewards = []
        done = False
        while not done:
            res = env.step(policy.act(state, act_rng), env_rng)
            rewards.append(res.reward)
            state, done = res.next_state, res.done
        totals.append(np.mean(rewards))
    return float(np.mean(totals))


class DeterministicActor:
    """Adapter exposing the policy mean through the ``act`` protocol."""

    def __init__(self, policy: GaussianPolicy):
        self.policy = policy

    def act(self, state, rng=None):
        return self.policy.deterministic(state.normalized[None, :])[0]


def train(
    env: CovertSemComEnv,
    hyper: SacHyperparams,
    seed: int,
    episodes: int,
    eval_every: int = 10,
    eval_episodes: int = 3,
    eval_seed: int | None = None,
) -> TrainResult:
    """Run ``episodes`` episodes of off-policy SAC learning.

    Each environment step: act (uniform during warmup), store, then per
    update: sample batch, critic step, target soft update, policy step.
    ``curve`` holds per-episode mean reward and, every ``eval_every``
    episodes and at the end, the deterministic-policy evaluation.
    """
    ss_init, ss_env, ss_act, ss_buf = np.random.SeedSequence(seed).spawn(4)
    init_rng = np.random.default_rng(ss_init)
    env_rng = np.random.default_rng(ss_env)
    act_rng = np.random.default_rng(ss_act)
    buf_rng = np.random.default_rng(ss_buf)
    eval_seed = seed if eval_seed is None else eval_seed

    policy = GaussianPolicy(STATE_DIM, ACTION_DIM, hyper.hidden, init_rng)
    q1 = Critic(STATE_DIM, ACTION_DIM, hyper.hidden, init_rng)
    q2 = Critic(STATE_DIM, ACTION_DIM, hyper.hidden, init_rng)
    tq1, tq2 = q1.clone(), q2.clone()
    opt_pi = make_optimizer(hyper.optimizer, policy.params, hyper.lr_actor)
    opt_q1 = make_optimizer(hyper.optimizer, q1.params, hyper.lr_critic)
    opt_q2 = make_optimizer(hyper.optimizer, q2.params, hyper.lr_critic)
    buffer = ReplayBuffer(hyper.buffer_capacity, STATE_DIM, ACTION_DIM)
    result = TrainResult(policy, q1, q2, tq1, tq2)

    steps = 0
    for ep in range(episodes):
        state = env.reset(env_rng)
        rewards = []
        done = False
        while not done:
            s = state.normalized
            if steps < hyper.warmup_steps:
                a = act_rng.uniform(-1.0, 1.0, ACTION_DIM)
            else:
                a = policy.sample(s[None, :], act_rng)[0][0]
            res = env.step(a, env_rng)
            buffer.add(s, a, res.reward, res.next_state.normalized, res.done)
            rewards.append(res.reward)
            state, done = res.next_state, res.done
            steps += 1
            if steps >= hyper.warmup_steps:
                for _ in range(hyper.updates_per_step):
                    batch = buffer.sample(hyper.batch_size, buf_rng)
                    q_update(batch, q1, q2, tq1, tq2, policy, hyper, opt_q1, opt_q2, act_rng)
                    soft_update(tq1.net, q1.net, hyper.soft_update)
                    soft_update(tq2.net, q2.net, hyper.soft_update)
                    policy_update(batch, q1, q2, policy, hyper, opt_pi, act_rng)
        point = CurvePoint(ep, float(np.mean(rewards)))
        if (eval_every and (ep + 1) % eval_every == 0) or ep == episodes - 1:
            point.eval_reward = evaluate(DeterministicActor(policy), env, eval_episodes, eval_seed)
        result.curve.append(point)
        logger.info("episode %d mean reward %.4f eval %s", ep, point.mean_reward, point.eval_reward)
    result.steps = steps
    return result


class SACPowerController(BaseEstimator):
    """Power regulator trained by SAC; ``fit`` takes an environment.

    ``predict`` maps normalized states (n, 16) to normalized actions (n, 2)
    using the policy mean.
    """

    def __init__(
        self,
        gamma=0.95,
        batch_size=512,
        lr_actor=1e-4,
        lr_critic=1e-4,
        entropy_coef=0.2,
        soft_update=0.995,
        buffer_capacity=100_000,
        warmup_steps=1000,
        updates_per_step=1,
        hidden=(256, 256),
        optimizer="adam",
        episodes=100,
        eval_every=10,
        eval_episodes=3,
        random_state=0,
    ):
        self.gamma = gamma
        self.batch_size = batch_size
        self.lr_actor = lr_actor
        self.lr_critic = lr_critic
        self.entropy_coef = entropy_coef
        self.soft_update = soft_update
        self.buffer_capacity = buffer_capacity
        self.warmup_steps = warmup_steps
        self.updates_per_step = updates_per_step
        self.hidden = hidden
        self.optimizer = optimizer
        self.episodes = episodes
        self.eval_every = eval_every
        self.eval_episodes = eval_episodes
        self.random_state = random_state

    def hyperparams(self) -> SacHyperparams:
        return SacHyperparams(
            gamma=self.gamma,
            batch_size=self.batch_size,
            lr_actor=self.lr_actor,
            lr_critic=self.lr_critic,
            entropy_coef=self.entropy_coef,
            soft_update=self.soft_update,
            buffer_capacity=self.buffer_capacity,
            warmup_steps=self.warmup_steps,
            updates_per_step=self.updates_per_step,
            hidden=tuple(self.hidden),
            optimizer=self.optimizer,
        )

    def fit(self, env, y=None):
        if not isinstance(env, CovertSemComEnv):
            env = CovertSemComEnv(env)
        hyper = self.hyperparams()
        seed = int(self.random_state)
        if self.episodes == 0:
            rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
            self.policy_ = GaussianPolicy(STATE_DIM, ACTION_DIM, hyper.hidden, rng)
            self.learning_curve_ = []
        else:
            res = train(env, hyper, seed, self.episodes, self.eval_every, self.eval_episodes)
            self.policy_ = res.policy
            self.critics_ = (res.q1, res.q2)
            self.learning_curve_ = res.curve
            self.n_steps_ = res.steps
        self.n_features_in_ = STATE_DIM
        return self

    def predict(self, X):
        check_is_fitted(self, "policy_")
        X = check_states(X)
        return self.policy_.deterministic(X)

    def act(self, state, rng=None):
        return self.predict(state.normalized[None, :])[0]

    def save(self, path: str | Path, meta: dict | None = None) -> None:
        """Write parameters plus hyperparameters and seed to one ``.npz``."""
        check_is_fitted(self, "policy_")
        header = {"estimator": self.get_params(), "hyper": asdict(self.hyperparams()), **(meta or {})}
        arrays = {f"policy_{i}": p for i, p in enumerate(self.policy_.params)}
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(json.dumps(header, sort_keys=True, default=list)), **arrays)

    @classmethod
    def load(cls, path: str | Path) -> "SACPowerController":
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["meta"]))
            params = header["estimator"]
            params["hidden"] = tuple(params["hidden"])
            est = cls(**params)
            rng = np.random.default_rng(0)
            policy = GaussianPolicy(STATE_DIM, ACTION_DIM, est.hidden, rng)
            for i, p in enumerate(policy.params):
                stored = data[f"policy_{i}"]
                if stored.shape != p.shape:
                    raise ValueError("checkpoint does not match network shape")
                p[...] = stored
        est.policy_ = policy
        est.n_features_in_ = STATE_DIM
        est.checkpoint_meta_ = header
        return est
