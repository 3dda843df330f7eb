"""Layered parameterized quantum circuit classifier on a small statevector simulator.

Each block opens with a 3-angle universal gate per qubit followed by a cyclic
layer of controlled universal gates, where qubit ``j`` is the target and
``(j + r) mod N`` the control. An R^Y rotation per qubit closes the block.
The class probability is P(qubit 0 = 1).

Features are mapped linearly from their source range onto [-1, 1], the
domain of the ``arcsin``/``arccos`` encoding.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from softq.data.synthetic import Dataset
from softq.training.adam import AdamState
from softq.training.record import RunRecord
from softq.training.trainer import accuracy, optimize

MAX_QUBITS = 4


@dataclass
class PqcCircuit:
    n_qubits: int
    depth: int
    r: int = 1
    parallel_encoding_factor: int = 1
    params: np.ndarray | None = None
    feature_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"PQC supports 1 to {MAX_QUBITS} qubits, got {self.n_qubits}")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.n_qubits % self.parallel_encoding_factor:
            raise ValueError("parallel encoding factor must divide the qubit count")
        if self.params is None:
            self.params = np.zeros(self.n_params)
        self.params = np.asarray(self.params, dtype=float)
        if self.params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} angles, got {self.params.shape}")
        lo, hi = (float(v) for v in self.feature_range)
        if not hi > lo:
            raise ValueError(f"bad feature range {self.feature_range}")
        self.feature_range = (lo, hi)

    @property
    def gate_count(self) -> int:
        """Non-encoding gates, three per qubit in every block."""
        return 3 * self.n_qubits * self.depth

    @property
    def n_params(self) -> int:
        return 7 * self.n_qubits * self.depth

    @property
    def n_features(self) -> int:
        return self.n_qubits // self.parallel_encoding_factor

    def control(self, j: int) -> int:
        return (j + self.r) % self.n_qubits

    def with_params(self, params) -> "PqcCircuit":
        return PqcCircuit(self.n_qubits, self.depth, self.r, self.parallel_encoding_factor,
                          np.array(params, float), self.feature_range)

    @classmethod
    def random(cls, n_qubits, depth, rng, r=1, parallel_encoding_factor=1,
               feature_range=(-1.0, 1.0), low=-math.pi, high=math.pi):
        c = cls(n_qubits, depth, r, parallel_encoding_factor, feature_range=feature_range)
        return c.with_params(rng.uniform(low, high, c.n_params))

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "depth": self.depth, "r": self.r,
                "parallel_encoding_factor": self.parallel_encoding_factor,
                "feature_range": list(self.feature_range), "params": self.params.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "PqcCircuit":
        return cls(d["n_qubits"], d["depth"], d.get("r", 1), d.get("parallel_encoding_factor", 1),
                   np.array(d["params"], float), tuple(d.get("feature_range", (-1.0, 1.0))))


def encode_qubit(x) -> np.ndarray:
    """``Rz(arccos x^2) Ry(arcsin x) |0>`` for each entry of ``x``; returns (..., 2)."""
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    a = np.arcsin(x) / 2
    b = np.arccos(x * x) / 2
    return np.stack([np.cos(a) * np.exp(-1j * b), np.sin(a) * np.exp(1j * b)], axis=-1)


def _euler(angles) -> np.ndarray:
    """Batched ``Rz(phi) Ry(theta) Rz(lam)``: (..., 3) angles to (..., 2, 2)."""
    th, ph, la = angles[..., 0], angles[..., 1], angles[..., 2]
    c, s = np.cos(th / 2), np.sin(th / 2)
    u = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-0.5j * (ph + la)) * c
    u[..., 0, 1] = -np.exp(-0.5j * (ph - la)) * s
    u[..., 1, 0] = np.exp(0.5j * (ph - la)) * s
    u[..., 1, 1] = np.exp(0.5j * (ph + la)) * c
    return u


def _ry(theta) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2).astype(complex)


def _apply_1q(psi, u, q, control: int | None = None):
    """Apply one gate per parameter set to qubit ``q`` in place.

    ``psi`` is (M, B, 2, ..., 2) and ``u`` is (M, 2, 2). With ``control`` set,
    only the slice where that qubit is |1> is touched.
    """
    base = [slice(None)] * psi.ndim
    if control is not None:
        base[control + 2] = 1
    i0, i1 = list(base), list(base)
    i0[q + 2], i1[q + 2] = 0, 1
    a0, a1 = psi[tuple(i0)], psi[tuple(i1)]
    shape = (psi.shape[0],) + (1,) * (a0.ndim - 1)
    new0 = u[:, 0, 0].reshape(shape) * a0 + u[:, 0, 1].reshape(shape) * a1
    a1 *= u[:, 1, 1].reshape(shape)
    a1 += u[:, 1, 0].reshape(shape) * a0
    a0[...] = new0
    return psi


def to_encoding_domain(X, feature_range) -> np.ndarray:
    lo, hi = feature_range
    return np.clip(2.0 * (np.asarray(X, float) - lo) / (hi - lo) - 1.0, -1.0, 1.0)


def _encode(circ: PqcCircuit, X) -> np.ndarray:
    """Product encoding states, flattened to (B, 2**N) with qubit 0 most significant."""
    n, k = circ.n_qubits, circ.parallel_encoding_factor
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] * k != n:
        raise ValueError(f"{X.shape[1]} features x{k} do not fill {n} qubits")
    qubits = encode_qubit(np.repeat(to_encoding_domain(X, circ.feature_range), k, axis=1))
    psi = qubits[:, 0]
    for q in range(1, n):
        psi = (psi[:, :, None] * qubits[:, q][:, None, :]).reshape(X.shape[0], -1)
    return psi


def circuit_unitaries(circ: PqcCircuit, params: np.ndarray) -> np.ndarray:
    """(M, D, D) array whose ``[m, j]`` row is the image of basis state ``j`` under circuit ``m``."""
    n = circ.n_qubits
    m, dim = params.shape[0], 2 ** n
    psi = np.broadcast_to(np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n), (m, dim) + (2,) * n).copy()
    per = 7 * n
    for b in range(circ.depth):
        chunk = params[:, b * per:(b + 1) * per]
        uni = _euler(chunk[:, :3 * n].reshape(m, n, 3))
        ctl = _euler(chunk[:, 3 * n:6 * n].reshape(m, n, 3))
        ys = _ry(chunk[:, 6 * n:])
        for j in range(n):
            _apply_1q(psi, uni[:, j], j)
        for j in range(n):
            c = circ.control(j)
            # a lone qubit has no control partner; its gate then acts unconditionally
            _apply_1q(psi, ctl[:, j], j, None if c == j else c)
        for j in range(n):
            _apply_1q(psi, ys[:, j], j)
    return psi.reshape(m, dim, dim)


def _evolve(circ: PqcCircuit, params: np.ndarray, X) -> np.ndarray:
    """Final states for every row of ``params``: (M, B, 2**N)."""
    return np.matmul(_encode(circ, X)[None], circuit_unitaries(circ, params))


def _p_first_one(psi) -> np.ndarray:
    amp = np.abs(psi.reshape(psi.shape[0], psi.shape[1], 2, -1)) ** 2
    return np.clip(amp[:, :, 1].sum(axis=-1), 0.0, 1.0)


def statevector(circ: PqcCircuit, X) -> np.ndarray:
    """Final states of one circuit, shape ``(B, 2**N)``."""
    return _evolve(circ, circ.params[None], X)[0]


def pqc_forward(circ: PqcCircuit, X) -> np.ndarray:
    """P(first qubit reads 1) per sample, shape (B,)."""
    return _p_first_one(_evolve(circ, circ.params[None], X))[0]


def pqc_loss_and_fd_gradient(circ: PqcCircuit, X, y, step: float = 1e-5) -> tuple[float, np.ndarray]:
    """MSE against 0/1 labels and its central-difference gradient, evaluated in one batch."""
    p = circ.params
    shifts = np.concatenate([np.zeros((1, p.size)), step * np.eye(p.size), -step * np.eye(p.size)])
    probs = _p_first_one(_evolve(circ, p + shifts, X))
    losses = np.mean((probs - np.asarray(y, float)) ** 2, axis=1)
    grad = (losses[1:p.size + 1] - losses[p.size + 1:]) / (2 * step)
    return float(losses[0]), grad


def pqc_train(n_qubits: int, depth: int, train: Dataset, test: Dataset, epochs: int = 200,
              lr: float = 0.1, seed: int = 0, r: int = 1, parallel_encoding_factor: int = 1,
              fd_step: float = 1e-5) -> RunRecord:
    """MSE on P(1) against the 0/1 label; central-difference gradients; Adam."""
    if train.n_classes != 2:
        raise ValueError("the PQC baseline is a binary classifier")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    feature_range = tuple(train.provenance.get("feature_range", (0.0, 1.0)))
    circ = PqcCircuit.random(n_qubits, depth, rng, r, parallel_encoding_factor, feature_range)
    y = train.labels.astype(float)

    def loss_grad(theta):
        return pqc_loss_and_fd_gradient(circ.with_params(theta), train.features, y, fd_step)

    def evaluate(theta):
        cur = circ.with_params(theta)
        return (accuracy(pqc_forward(cur, train.features)[:, None], train.labels),
                accuracy(pqc_forward(cur, test.features)[:, None], test.labels))

    theta, history = optimize(circ.params, loss_grad, evaluate, AdamState(lr), epochs)
    final = circ.with_params(theta)
    cfg = {"n_qubits": n_qubits, "depth": depth, "r": r, "gate_count": final.gate_count,
           "parallel_encoding_factor": parallel_encoding_factor, "epochs": epochs, "lr": lr,
           "feature_range": list(feature_range)}
    return RunRecord("pqc", cfg, seed, history, time.perf_counter() - start, final.to_dict())
