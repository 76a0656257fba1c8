"""Soft Actor-Critic building blocks on top of :mod:`covertsem.sac.nn`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import MLP

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class SacHyperparams:
    gamma: float = 0.95
    batch_size: int = 512
    lr_actor: float = 1e-4
    lr_critic: float = 1e-4
    entropy_coef: float = 0.2
    soft_update: float = 0.995
    buffer_capacity: int = 100_000
    warmup_steps: int = 1000
    updates_per_step: int = 1
    hidden: tuple[int, ...] = (256, 256)
    optimizer: str = "adam"

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if not 0.0 < self.soft_update < 1.0:
            raise ValueError("soft_update must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.buffer_capacity < 1:
            raise ValueError("buffer_capacity must be >= 1")


def _log1m_tanh2(u):
    # log(1 - tanh(u)^2) without cancellation for large |u|
    return 2.0 * (np.log(2.0) - u - np.logaddexp(0.0, -2.0 * u))


class GaussianPolicy:
    """tanh-squashed diagonal Gaussian; actions live in (-1, 1)^k."""

    def __init__(self, state_dim, action_dim, hidden, rng, dtype=np.float64):
        self.action_dim = action_dim
        self.net = MLP((state_dim, *hidden, 2 * action_dim), rng, dtype)
        self._cache = None

    @property
    def params(self):
        return self.net.params

    def _heads(self, s):
        out = self.net.forward(s)
        mean = out[:, : self.action_dim]
        raw_log_std = out[:, self.action_dim :]
        log_std = np.clip(raw_log_std, LOG_STD_MIN, LOG_STD_MAX)
        return mean, raw_log_std, log_std

    def deterministic(self, s):
        mean, _, _ = self._heads(np.atleast_2d(s))
        return np.tanh(mean)

    def sample(self, s, rng: np.random.Generator | None = None, eps=None):
        """Reparameterized draw; returns ``(action, log_prob)``.

        Pass ``eps`` to fix the Gaussian noise (gradient checks).
        """
        s = np.atleast_2d(s)
        mean, raw_log_std, log_std = self._heads(s)
        if eps is None:
            eps = rng.standard_normal(mean.shape)
        std = np.exp(log_std)
        u = mean + std * eps
        a = np.tanh(u)
        log_prob = np.sum(-0.5 * eps**2 - log_std - _HALF_LOG_2PI - _log1m_tanh2(u), axis=1)
        self._cache = (a, std, eps, raw_log_std)
        return a, log_prob

    def backward(self, grad_action, grad_log_prob):
        """Parameter gradients given dL/da (B, k) and dL/dlog_prob (B,)."""
        a, std, eps, raw_log_std = self._cache
        g_lp = grad_log_prob[:, None]
        grad_u = grad_action * (1.0 - a**2) + g_lp * 2.0 * a
        grad_mean = grad_u
        grad_log_std = grad_u * std * eps - g_lp
        grad_log_std = grad_log_std * ((raw_log_std > LOG_STD_MIN) & (raw_log_std < LOG_STD_MAX))
        grads, _ = self.net.backward(np.concatenate([grad_mean, grad_log_std], axis=1))
        return grads


class Critic:
    """Q(s, a) as an MLP over the concatenated state and action."""

    def __init__(self, state_dim, action_dim, hidden, rng, dtype=np.float64):
        self.state_dim = state_dim
        self.net = MLP((state_dim + action_dim, *hidden, 1), rng, dtype)

    @property
    def params(self):
        return self.net.params

    def __call__(self, s, a):
        return self.net.forward(np.concatenate([np.atleast_2d(s), np.atleast_2d(a)], axis=1))[:, 0]

    def backward(self, grad_q):
        """Returns ``(param_grads, dL/da)`` for the cached call."""
        grads, g_in = self.net.backward(grad_q[:, None])
        return grads, g_in[:, self.state_dim :]

    def clone(self) -> "Critic":
        new = Critic.__new__(Critic)
        new.state_dim = self.state_dim
        new.net = self.net.clone()
        return new


class ReplayBuffer:
    def __init__(self, capacity, state_dim, action_dim):
        self.capacity = int(capacity)
        self.s = np.zeros((self.capacity, state_dim))
        self.a = np.zeros((self.capacity, action_dim))
        self.r = np.zeros(self.capacity)
        self.s2 = np.zeros((self.capacity, state_dim))
        self.d = np.zeros(self.capacity)
        self.size = 0
        self._next = 0

    def __len__(self):
        return self.size

    def add(self, s, a, r, s2, d) -> None:
        i = self._next
        self.s[i], self.a[i], self.r[i], self.s2[i], self.d[i] = s, a, r, s2, float(d)
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size, rng: np.random.Generator):
        """Uniform without replacement; the whole buffer if it is smaller."""
        if self.size == 0:
            raise ValueError("cannot sample an empty buffer")
        n = min(batch_size, self.size)
        idx = rng.choice(self.size, size=n, replace=False)
        return self.s[idx], self.a[idx], self.r[idx], self.s2[idx], self.d[idx]


def bellman_target(r, s_next, d, target_q1, target_q2, policy, gamma, alpha_ent, rng=None):
    """``r + gamma (1 - d) (min_i Qhat_i(s', a') - alpha log pi(a'|s'))``, a' ~ pi(.|s')."""
    r = np.asarray(r, dtype=float)
    d = np.asarray(d, dtype=float)
    a_next, logp_next = policy.sample(s_next, rng)
    q_next = np.minimum(target_q1(s_next, a_next), target_q2(s_next, a_next))
    return r + gamma * (1.0 - d) * (q_next - alpha_ent * logp_next)


def critic_loss_and_grads(critic: Critic, s, a, y):
    q = critic(s, a)
    diff = q - y
    loss = float(np.mean(diff**2))
    grads, _ = critic.backward(2.0 * diff / diff.size)
    return loss, grads


def q_update(batch, q1, q2, target_q1, target_q2, policy, hyper: SacHyperparams, opt1, opt2, rng):
    """One gradient step per critic toward the (constant) Bellman target.

    Returns the pre-step losses.
    """
    s, a, r, s2, d = batch
    if len(r) == 0:
        raise ValueError("empty batch")
    y = bellman_target(r, s2, d, target_q1, target_q2, policy, hyper.gamma, hyper.entropy_coef, rng)
    loss1, g1 = critic_loss_and_grads(q1, s, a, y)
    loss2, g2 = critic_loss_and_grads(q2, s, a, y)
    opt1.step(g1)
    opt2.step(g2)
    return loss1, loss2


def policy_loss_and_grads(s, q1, q2, policy: GaussianPolicy, alpha_ent, rng=None, eps=None):
    """``mean(alpha log pi(a|s) - min_i Q_i(s, a))`` with reparameterized a."""
    s = np.atleast_2d(s)
    n = s.shape[0]
    a, logp = policy.sample(s, rng, eps)
    v1 = q1(s, a)
    _, ga1 = q1.backward(np.ones(n))
    v2 = q2(s, a)
    _, ga2 = q2.backward(np.ones(n))
    use1 = (v1 <= v2)[:, None]
    q_min = np.where(use1[:, 0], v1, v2)
    grad_a = -np.where(use1, ga1, ga2) / n
    loss = float(np.mean(alpha_ent * logp - q_min))
    grads = policy.backward(grad_a, np.full(n, alpha_ent / n))
    return loss, grads


def policy_update(batch, q1, q2, policy, hyper: SacHyperparams, opt, rng):
    s = batch[0]
    if len(s) == 0:
        raise ValueError("empty batch")
    loss, grads = policy_loss_and_grads(s, q1, q2, policy, hyper.entropy_coef, rng)
    opt.step(grads)
    return loss
