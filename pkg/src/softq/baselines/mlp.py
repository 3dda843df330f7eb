"""A small sigmoid multilayer perceptron trained with exact backpropagation."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from softq.data.synthetic import Dataset
from softq.training.adam import AdamState
from softq.training.record import RunRecord
from softq.training.trainer import accuracy, optimize


def mlp_parameter_count(sizes) -> int:
    return sum((a + 1) * b for a, b in zip(sizes[:-1], sizes[1:]))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class MlpModel:
    sizes: tuple[int, ...]
    params: np.ndarray

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            raise ValueError(f"bad MLP shape {self.sizes}")
        self.params = np.asarray(self.params, dtype=float)
        if self.params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {self.params.shape}")

    @property
    def n_params(self) -> int:
        return mlp_parameter_count(self.sizes)

    @classmethod
    def init(cls, sizes, rng: np.random.Generator) -> "MlpModel":
        chunks = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (a + b))
            chunks += [rng.uniform(-limit, limit, a * b), np.zeros(b)]
        return cls(tuple(sizes), np.concatenate(chunks))

    def layers(self, params=None):
        params = self.params if params is None else params
        out, pos = [], 0
        for a, b in zip(self.sizes[:-1], self.sizes[1:]):
            w = params[pos:pos + a * b].reshape(a, b)
            pos += a * b
            out.append((w, params[pos:pos + b]))
            pos += b
        return out

    def forward(self, X, params=None) -> np.ndarray:
        h = np.atleast_2d(np.asarray(X, dtype=float))
        for w, b in self.layers(params):
            h = _sigmoid(h @ w + b)
        return h

    def loss_and_gradient(self, X, Y, params=None) -> tuple[float, np.ndarray]:
        """MSE (summed over outputs, averaged over samples) and its exact gradient."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
        acts = [X]
        layers = self.layers(params)
        for w, b in layers:
            acts.append(_sigmoid(acts[-1] @ w + b))
        diff = acts[-1] - Y
        loss = float(np.mean(np.sum(diff * diff, axis=1)))
        delta = 2.0 * diff / X.shape[0] * acts[-1] * (1 - acts[-1])
        grads = []
        for k in range(len(layers) - 1, -1, -1):
            w, _ = layers[k]
            grads.append(delta.sum(axis=0))
            grads.append((acts[k].T @ delta).ravel())
            if k:
                delta = (delta @ w.T) * acts[k] * (1 - acts[k])
        return loss, np.concatenate(grads[::-1])

    def to_dict(self) -> dict:
        return {"sizes": list(self.sizes), "params": self.params.tolist()}


def mlp_train(sizes, train: Dataset, test: Dataset, epochs: int = 500, lr: float = 0.05,
              seed: int = 0) -> RunRecord:
    start = time.perf_counter()
    model = MlpModel.init(tuple(sizes), np.random.default_rng(seed))
    y = train.targets(model.sizes[-1])

    def loss_grad(theta):
        return model.loss_and_gradient(train.features, y, theta)

    def evaluate(theta):
        return (accuracy(model.forward(train.features, theta), train.labels),
                accuracy(model.forward(test.features, theta), test.labels))

    theta, history = optimize(model.params, loss_grad, evaluate, AdamState(lr), epochs)
    final = MlpModel(model.sizes, theta)
    cfg = {"sizes": list(model.sizes), "epochs": epochs, "lr": lr, "n_params": model.n_params}
    return RunRecord("mlp", cfg, seed, history, time.perf_counter() - start, final.to_dict())
