"""Layered feedforward wiring of soft quantum neurons and its JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from softq.qcore import EulerUnitary


def parameter_count(layer_sizes: Sequence[int]) -> int:
    """Number of learnable angles: three per edge plus three per non-input bias."""
    return sum(3 * (a + 1) * b for a, b in zip(layer_sizes[:-1], layer_sizes[1:]))


@dataclass
class NetworkTopology:
    """Fully connected layers with one Euler gate per edge and per bias.

    ``edges[l]`` has shape ``(n_l, n_{l+1}, 3)`` and holds the gate applied to
    neuron ``j`` of layer ``l+1`` when neuron ``i`` of layer ``l`` fires.
    ``biases[l]`` has shape ``(n_{l+1}, 3)``. Angles are ``(theta, phi, lam)``.
    ``layer_sizes[0]`` counts input neurons after parallel encoding.
    """

    layer_sizes: tuple[int, ...]
    edges: list[np.ndarray] = field(default_factory=list)
    biases: list[np.ndarray] = field(default_factory=list)
    parallel_encoding_factor: int = 1

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        if len(self.layer_sizes) < 2 or any(n < 1 for n in self.layer_sizes):
            raise ValueError(f"need at least two positive layer sizes, got {self.layer_sizes}")
        k = int(self.parallel_encoding_factor)
        if k < 1 or self.layer_sizes[0] % k:
            raise ValueError(f"input width {self.layer_sizes[0]} not divisible by parallel factor {k}")
        self.parallel_encoding_factor = k
        if not self.edges:
            self.edges = [np.zeros((a, b, 3)) for a, b in self._pairs()]
            self.biases = [np.zeros((b, 3)) for _, b in self._pairs()]
        self.edges = [np.asarray(e, dtype=float) for e in self.edges]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for l, (a, b) in enumerate(self._pairs()):
            if self.edges[l].shape != (a, b, 3) or self.biases[l].shape != (b, 3):
                raise ValueError(f"parameter shapes for layer {l + 1} do not match sizes ({a}, {b})")

    def _pairs(self):
        return list(zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    @classmethod
    def identity(cls, layer_sizes, parallel_encoding_factor: int = 1) -> "NetworkTopology":
        return cls(tuple(layer_sizes), parallel_encoding_factor=parallel_encoding_factor)

    @classmethod
    def random(cls, layer_sizes, rng: np.random.Generator, parallel_encoding_factor: int = 1,
               low: float = -math.pi, high: float = math.pi) -> "NetworkTopology":
        net = cls(tuple(layer_sizes), parallel_encoding_factor=parallel_encoding_factor)
        return net.with_params(rng.uniform(low, high, size=net.n_params))

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def n_features(self) -> int:
        return self.layer_sizes[0] // self.parallel_encoding_factor

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_params(self) -> int:
        return parameter_count(self.layer_sizes)

    def edge(self, layer: int, i: int, j: int) -> EulerUnitary:
        """Gate on edge ``i -> j`` into layer ``layer`` (1-based above the input layer)."""
        return EulerUnitary(*self.edges[layer - 1][i, j])

    def bias(self, layer: int, j: int) -> EulerUnitary:
        return EulerUnitary(*self.biases[layer - 1][j])

    @property
    def params(self) -> np.ndarray:
        """Flat parameter vector: per layer, edges (source-major) then biases."""
        chunks = []
        for e, b in zip(self.edges, self.biases):
            chunks += [e.ravel(), b.ravel()]
        return np.concatenate(chunks)

    def with_params(self, flat) -> "NetworkTopology":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {flat.shape}")
        edges, biases, o = [], [], 0
        for a, b in self._pairs():
            edges.append(flat[o:o + 3 * a * b].reshape(a, b, 3).copy())
            o += 3 * a * b
            biases.append(flat[o:o + 3 * b].reshape(b, 3).copy())
            o += 3 * b
        return NetworkTopology(self.layer_sizes, edges, biases, self.parallel_encoding_factor)

    def expand_inputs(self, features) -> np.ndarray:
        """Repeat each feature over ``parallel_encoding_factor`` adjacent input neurons."""
        x = np.asarray(features, dtype=float)
        if x.shape[-1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[-1]}")
        return np.repeat(x, self.parallel_encoding_factor, axis=-1)

    def to_dict(self) -> dict:
        edges = [
            {"layer": l + 1, "i": i, "j": j, "theta": t, "phi": p, "lam": m}
            for l, e in enumerate(self.edges)
            for i in range(e.shape[0])
            for j in range(e.shape[1])
            for t, p, m in [map(float, e[i, j])]
        ]
        biases = [
            {"layer": l + 1, "j": j, "theta": t, "phi": p, "lam": m}
            for l, b in enumerate(self.biases)
            for j in range(b.shape[0])
            for t, p, m in [map(float, b[j])]
        ]
        return {
            "layer_sizes": list(self.layer_sizes),
            "parallel_encoding_factor": self.parallel_encoding_factor,
            "edges": edges,
            "biases": biases,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkTopology":
        net = cls(tuple(d["layer_sizes"]), parallel_encoding_factor=d.get("parallel_encoding_factor", 1))
        seen = set()
        for e in d["edges"]:
            key = ("e", e["layer"], e["i"], e["j"])
            if key in seen:
                raise ValueError(f"duplicate edge {key[1:]}")
            seen.add(key)
            net.edges[e["layer"] - 1][e["i"], e["j"]] = (e["theta"], e["phi"], e["lam"])
        for b in d["biases"]:
            key = ("b", b["layer"], b["j"])
            if key in seen:
                raise ValueError(f"duplicate bias {key[1:]}")
            seen.add(key)
            net.biases[b["layer"] - 1][b["j"]] = (b["theta"], b["phi"], b["lam"])
        expected = sum(a * b + b for a, b in net._pairs())
        if len(seen) != expected:
            raise ValueError(f"topology lists {len(seen)} gates, expected {expected}")
        return net

    def save(self, path) -> Path:
        path = Path(path)
        # json writes the shortest repr that round-trips each float exactly
        path.write_text(json.dumps(self.to_dict(), indent=1))
        return path

    @classmethod
    def load(cls, path) -> "NetworkTopology":
        return cls.from_dict(json.loads(Path(path).read_text()))
