from .agent import DeterministicActor, SACPowerController, TrainResult, evaluate, train
from .core import (
    Critic,
    GaussianPolicy,
    ReplayBuffer,
    SacHyperparams,
    bellman_target,
    policy_loss_and_grads,
    policy_update,
    q_update,
)
from .nn import MLP, SGD, Adam, soft_update

__all__ = [
    "Adam", "Critic", "DeterministicActor", "GaussianPolicy", "MLP", "ReplayBuffer",
    "SACPowerController", "SacHyperparams", "SGD", "TrainResult", "bellman_target",
    "evaluate", "policy_loss_and_grads", "policy_update", "q_update", "soft_update", "train",
]
