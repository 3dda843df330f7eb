"""Full-batch Adam training of soft quantum networks."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from softq.data.synthetic import Dataset
from softq.network.decision import decide_batch
from softq.network.meanfield import mean_field_probs
from softq.network.topology import NetworkTopology
from softq.noise.channels import NoisePolicy
from softq.training.adam import AdamState, adam_step
from softq.training.gradient import loss_and_gradient
from softq.training.record import EpochMetrics, RunRecord, TrainingDiverged


@dataclass
class TrainConfig:
    layer_sizes: tuple[int, ...]
    parallel_encoding_factor: int = 1
    epochs: int = 20
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    init_low: float = -math.pi
    init_high: float = math.pi
    train_noise: dict | None = None

    def adam(self) -> AdamState:
        return AdamState(self.lr, self.beta1, self.beta2, self.epsilon)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layer_sizes"] = list(self.layer_sizes)
        return d


def accuracy(probs, labels) -> float:
    return float(np.mean(decide_batch(probs) == np.asarray(labels)))


def optimize(params, loss_grad: Callable, evaluate: Callable, adam: AdamState, epochs: int):
    """Shared Adam loop.

    ``loss_grad(params) -> (loss, grad)``; ``evaluate(params) -> (train_acc, test_acc)``.
    Metrics of epoch ``e`` describe the parameters after its update.
    """
    params = np.asarray(params, dtype=float)
    loss, grad = loss_grad(params)
    history = []
    for epoch in range(1, epochs + 1):
        if not (math.isfinite(loss) and np.all(np.isfinite(grad))):
            raise TrainingDiverged(f"non-finite loss/gradient before epoch {epoch} (loss={loss!r})")
        params, adam = adam_step(adam, grad, params)
        loss, grad = loss_grad(params)
        if not math.isfinite(loss):
            raise TrainingDiverged(f"loss became {loss!r} at epoch {epoch}; lr={adam.lr}")
        train_acc, test_acc = evaluate(params)
        history.append(EpochMetrics(epoch, float(loss), train_acc, test_acc))
    return params, history


def train_network(config: TrainConfig, train: Dataset, test: Dataset,
                  eval_noise: NoisePolicy | None = None, extra_config: dict | None = None) -> RunRecord:
    """Train from a seeded uniform initialization; returns the run record."""
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    net = NetworkTopology.random(config.layer_sizes, rng, config.parallel_encoding_factor,
                                 config.init_low, config.init_high)
    n_out = net.n_outputs
    y_train = train.targets(n_out)
    noise = NoisePolicy.from_dict(config.train_noise)

    def loss_grad(theta):
        return loss_and_gradient(net.with_params(theta), train.features, y_train, noise)

    def evaluate(theta):
        cur = net.with_params(theta)
        return (accuracy(mean_field_probs(cur, train.features, eval_noise), train.labels),
                accuracy(mean_field_probs(cur, test.features, eval_noise), test.labels))

    theta, history = optimize(net.params, loss_grad, evaluate, config.adam(), config.epochs)
    final = net.with_params(theta)
    cfg = {**(extra_config or {}), **config.to_dict()}
    return RunRecord("soft", cfg, config.seed, history, time.perf_counter() - start, final.to_dict())
