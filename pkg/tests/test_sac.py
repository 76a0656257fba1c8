import numpy as np
import pytest

from covertsem.sac import (
    MLP,
    SGD,
    Adam,
    Critic,
    GaussianPolicy,
    ReplayBuffer,
    SacHyperparams,
    bellman_target,
    policy_loss_and_grads,
    policy_update,
    q_update,
    soft_update,
)
from covertsem.sac.core import critic_loss_and_grads

from oracles import central_difference, relative_error


class StubQ:
    def __init__(self, value):
        self.value = value

    def __call__(self, s, a):
        return np.full(len(np.atleast_2d(s)), self.value, dtype=float)


class StubPolicy:
    def __init__(self, log_prob):
        self.log_prob = log_prob

    def sample(self, s, rng=None, eps=None):
        n = len(np.atleast_2d(s))
        return np.zeros((n, 1)), np.full(n, self.log_prob)


class ConstantCritic:
    """Q(s, a) = c for every input; zero gradient w.r.t. the action."""

    def __init__(self, c):
        self.c = c

    def __call__(self, s, a):
        self._n = len(s)
        return np.full(self._n, self.c)

    def backward(self, grad_q):
        return None, np.zeros((self._n, 2))


class TestBellmanTarget:
    def test_stub_arithmetic(self):
        y = bellman_target(np.array([1.0]), np.zeros((1, 3)), np.array([0.0]),
                           StubQ(2.0), StubQ(3.0), StubPolicy(-1.0), gamma=0.9, alpha_ent=0.5)
        assert y[0] == pytest.approx(3.25, abs=1e-12)

    def test_terminal(self):
        y = bellman_target(np.array([0.7]), np.zeros((1, 3)), np.array([1.0]),
                           StubQ(50.0), StubQ(60.0), StubPolicy(-3.0), gamma=0.9, alpha_ent=0.5)
        assert y[0] == 0.7

    def test_zero_discount(self):
        y = bellman_target(np.array([0.2]), np.zeros((1, 3)), np.array([0.0]),
                           StubQ(50.0), StubQ(60.0), StubPolicy(-3.0), gamma=0.0, alpha_ent=0.5)
        assert y[0] == 0.2


def small_nets(seed=0, sdim=3, adim=2):
    rng = np.random.default_rng(seed)
    pol = GaussianPolicy(sdim, adim, (6, 5), rng)
    q1 = Critic(sdim, adim, (7, 4), rng)
    q2 = Critic(sdim, adim, (5, 6), rng)
    return rng, pol, q1, q2


class TestGradients:
    def test_critic_gradient_matches_finite_differences(self):
        rng, _, q1, _ = small_nets(1)
        s = rng.normal(size=(8, 3))
        a = rng.uniform(-1, 1, (8, 2))
        y = rng.normal(size=8)
        _, analytic = critic_loss_and_grads(q1, s, a, y)
        numeric = central_difference(lambda: float(np.mean((q1(s, a) - y) ** 2)), q1.params)
        assert relative_error(analytic, numeric) < 1e-4

    @pytest.mark.parametrize("seed", [2, 3, 4])
    def test_policy_gradient_matches_finite_differences(self, seed):
        rng, pol, q1, q2 = small_nets(seed)
        s = rng.normal(size=(8, 3))
        eps = rng.standard_normal((8, 2))
        alpha = 0.3
        _, analytic = policy_loss_and_grads(s, q1, q2, pol, alpha, eps=eps)

        def loss():
            a, logp = pol.sample(s, eps=eps)
            return float(np.mean(alpha * logp - np.minimum(q1(s, a), q2(s, a))))

        numeric = central_difference(loss, pol.params)
        assert relative_error(analytic, numeric) < 1e-4

    def test_tanh_correction_gradient_alone(self):
        # critics contribute nothing: isolates d log pi / d params
        rng, pol, _, _ = small_nets(5)
        s = rng.normal(size=(6, 3))
        eps = rng.standard_normal((6, 2))
        zero = ConstantCritic(0.0)
        _, analytic = policy_loss_and_grads(s, zero, zero, pol, 1.0, eps=eps)
        numeric = central_difference(lambda: float(np.mean(pol.sample(s, eps=eps)[1])), pol.params)
        assert relative_error(analytic, numeric) < 1e-4

    def test_constant_critic_no_entropy_zero_gradient(self):
        rng, pol, _, _ = small_nets(6)
        s = rng.normal(size=(6, 3))
        c = ConstantCritic(4.2)
        loss, grads = policy_loss_and_grads(s, c, c, pol, 0.0, rng=rng)
        assert loss == pytest.approx(-4.2)
        assert all(np.all(g == 0) for g in grads)

    def test_log_prob_matches_change_of_variables(self):
        from scipy.stats import norm

        rng, pol, _, _ = small_nets(7)
        s = rng.normal(size=(5, 3))
        eps = rng.standard_normal((5, 2))
        a, logp = pol.sample(s, eps=eps)
        out = pol.net.forward(s)
        mean, log_std = out[:, :2], np.clip(out[:, 2:], -20, 2)
        u = mean + np.exp(log_std) * eps
        want = np.sum(norm.logpdf(u, mean, np.exp(log_std)) - np.log(1 - np.tanh(u) ** 2), axis=1)
        assert np.allclose(logp, want, rtol=1e-9)


class TestCritics:
    def test_zero_loss_leaves_parameters(self):
        rng, pol, q1, q2 = small_nets(8)
        s = rng.normal(size=(4, 3))
        a = rng.uniform(-1, 1, (4, 2))
        y = q1(s, a)
        before = [p.copy() for p in q1.params]
        loss, grads = critic_loss_and_grads(q1, s, a, y)
        SGD(q1.params, lr=0.1).step(grads)
        assert loss == 0.0
        assert all(np.allclose(b, p, atol=1e-15) for b, p in zip(before, q1.params))

    def test_regression_to_terminal_reward(self):
        rng, pol, q1, q2 = small_nets(9)
        hyper = SacHyperparams(batch_size=1, lr_critic=1e-3)
        batch = (rng.normal(size=(1, 3)), rng.uniform(-1, 1, (1, 2)), np.array([0.8]),
                 rng.normal(size=(1, 3)), np.array([1.0]))
        o1, o2 = Adam(q1.params, 1e-3), Adam(q2.params, 1e-3)
        tq1, tq2 = q1.clone(), q2.clone()
        losses = [q_update(batch, q1, q2, tq1, tq2, pol, hyper, o1, o2, rng)[0] for _ in range(200)]
        assert losses[-1] < losses[0]
        assert np.all(np.diff(losses[:50]) <= 1e-12)
        assert q1(batch[0], batch[1])[0] == pytest.approx(0.8, abs=0.05)

    def test_empty_batch(self):
        rng, pol, q1, q2 = small_nets(10)
        empty = (np.zeros((0, 3)), np.zeros((0, 2)), np.zeros(0), np.zeros((0, 3)), np.zeros(0))
        with pytest.raises(ValueError):
            q_update(empty, q1, q2, q1, q2, pol, SacHyperparams(), None, None, rng)
        with pytest.raises(ValueError):
            policy_update(empty, q1, q2, pol, SacHyperparams(), None, rng)


class TestSoftUpdate:
    @pytest.mark.parametrize("beta, expected", [(1.0, 2.0), (0.0, 4.0), (0.5, 3.0)])
    def test_scalar_blend(self, beta, expected):
        t, p = [np.array(2.0)], [np.array(4.0)]
        soft_update(t, p, beta)
        assert float(t[0]) == expected

    def test_geometric_convergence(self):
        t, p = [np.array(0.0)], [np.array(1.0)]
        beta = 0.9
        for k in range(1, 30):
            soft_update(t, p, beta)
            assert 1.0 - float(t[0]) == pytest.approx(beta**k, rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            soft_update([np.zeros(3)], [np.zeros(4)], 0.5)

    def test_networks(self):
        rng = np.random.default_rng(0)
        a, b = MLP((2, 3, 1), rng), MLP((2, 3, 1), rng)
        want = [0.25 * x + 0.75 * y for x, y in zip(a.params, b.params)]
        soft_update(a, b, 0.25)
        assert all(np.allclose(w, x) for w, x in zip(want, a.params))


class TestReplayBuffer:
    def test_ring_semantics(self):
        buf = ReplayBuffer(5, 1, 1)
        for i in range(8):
            buf.add([i], [0.0], float(i), [i + 1], False)
        assert len(buf) == 5
        assert sorted(buf.r.tolist()) == [3.0, 4.0, 5.0, 6.0, 7.0]

    def test_sample_without_replacement(self):
        buf = ReplayBuffer(100, 1, 1)
        for i in range(50):
            buf.add([i], [0.0], float(i), [0], False)
        _, _, r, _, _ = buf.sample(50, np.random.default_rng(0))
        assert sorted(r.tolist()) == list(map(float, range(50)))
        assert len(buf.sample(512, np.random.default_rng(0))[2]) == 50

    def test_empty(self):
        with pytest.raises(ValueError):
            ReplayBuffer(3, 1, 1).sample(2, np.random.default_rng(0))


class TestPolicy:
    def test_actions_strictly_inside_and_finite(self):
        rng, pol, _, _ = small_nets(11)
        s = rng.normal(scale=50.0, size=(2000, 3))
        a, logp = pol.sample(s, rng)
        assert np.all(np.abs(a) <= 1.0) and np.all(np.isfinite(logp))

    def test_hyperparam_validation(self):
        with pytest.raises(ValueError):
            SacHyperparams(gamma=1.0)
        with pytest.raises(ValueError):
            SacHyperparams(soft_update=1.0)


def run_bandit(updates=5000, alpha=0.2, seed=0):
    """One-step bandit with reward -(a - 0.5)^2 and a constant state."""
    rng = np.random.default_rng(seed)
    pol = GaussianPolicy(1, 1, (32, 32), rng)
    q1, q2 = Critic(1, 1, (32, 32), rng), Critic(1, 1, (32, 32), rng)
    tq1, tq2 = q1.clone(), q2.clone()
    hyper = SacHyperparams(batch_size=128, entropy_coef=alpha, lr_actor=1e-3, lr_critic=1e-3)
    opt_pi, o1, o2 = Adam(pol.params, 1e-3), Adam(q1.params, 1e-3), Adam(q2.params, 1e-3)
    buf = ReplayBuffer(10_000, 1, 1)
    s = np.ones((1, 1))
    for _ in range(updates):
        a = pol.sample(s, rng)[0][0]
        buf.add(s[0], a, -(a[0] - 0.5) ** 2, s[0], True)
        batch = buf.sample(hyper.batch_size, rng)
        q_update(batch, q1, q2, tq1, tq2, pol, hyper, o1, o2, rng)
        soft_update(tq1.net, q1.net, hyper.soft_update)
        soft_update(tq2.net, q2.net, hyper.soft_update)
        policy_update(batch, q1, q2, pol, hyper, opt_pi, rng)
    return float(pol.deterministic(s)[0, 0])


def test_bandit_converges_to_optimum():
    assert run_bandit() == pytest.approx(0.5, abs=0.05)
