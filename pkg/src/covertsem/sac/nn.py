"""Small dense networks with hand-written backpropagation, plus optimizers."""

from __future__ import annotations

import numpy as np


class MLP:
    """ReLU hidden layers, linear output.

    ``forward`` caches the activations of its last call; ``backward`` uses
    that cache, so interleave calls per input batch.
    """

    def __init__(self, sizes, rng: np.random.Generator, dtype=np.float64):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.sizes = tuple(int(s) for s in sizes)
        self.params: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.params.append(rng.uniform(-bound, bound, (fan_in, fan_out)).astype(dtype))
            self.params.append(rng.uniform(-bound, bound, fan_out).astype(dtype))
        self._cache = None

    @property
    def weights(self):
        return self.params[0::2]

    @property
    def biases(self):
        return self.params[1::2]

    def forward(self, x: np.ndarray) -> np.ndarray:
        acts = [x]
        h = x
        n_layers = len(self.params) // 2
        for k in range(n_layers):
            h = h @ self.params[2 * k] + self.params[2 * k + 1]
            if k < n_layers - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        self._cache = acts
        return h

    __call__ = forward

    def backward(self, grad_out: np.ndarray):
        """Returns ``(param_grads, grad_input)`` for the cached forward pass."""
        acts = self._cache
        if acts is None:
            raise RuntimeError("backward called before forward")
        n_layers = len(self.params) // 2
        grads = [None] * len(self.params)
        g = grad_out
        for k in range(n_layers - 1, -1, -1):
            if k < n_layers - 1:
                g = g * (acts[k + 1] > 0)
            grads[2 * k] = acts[k].T @ g
            grads[2 * k + 1] = g.sum(axis=0)
            g = g @ self.params[2 * k].T
        return grads, g

    def copy_from(self, other: "MLP") -> None:
        for p, q in zip(self.params, other.params):
            if p.shape != q.shape:
                raise ValueError("parameter shape mismatch")
            p[...] = q

    def clone(self) -> "MLP":
        new = MLP.__new__(MLP)
        new.sizes = self.sizes
        new.params = [p.copy() for p in self.params]
        new._cache = None
        return new


def soft_update(targets, primaries, beta: float) -> None:
    """In place ``target <- beta * target + (1 - beta) * primary``."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    t_params = targets.params if isinstance(targets, MLP) else targets
    p_params = primaries.params if isinstance(primaries, MLP) else primaries
    if len(t_params) != len(p_params):
        raise ValueError("parameter count mismatch")
    for t, p in zip(t_params, p_params):
        if t.shape != p.shape:
            raise ValueError("parameter shape mismatch")
    for t, p in zip(t_params, p_params):
        t *= beta
        t += (1.0 - beta) * p


class Adam:
    def __init__(self, params, lr=1e-4, betas=(0.9, 0.999), eps=1e-8):
        self.params = params
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads) -> None:
        self.t += 1
        c1 = 1.0 - self.b1**self.t
        c2 = 1.0 - self.b2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def state(self):
        return {"t": self.t, "m": self.m, "v": self.v}


class SGD:
    def __init__(self, params, lr=1e-2):
        self.params = params
        self.lr = lr

    def step(self, grads) -> None:
        for p, g in zip(self.params, grads):
            p -= self.lr * g


def make_optimizer(name: str, params, lr: float):
    if name == "adam":
        return Adam(params, lr=lr)
    if name == "sgd":
        return SGD(params, lr=lr)
    raise ValueError(f"unknown optimizer {name!r}")
