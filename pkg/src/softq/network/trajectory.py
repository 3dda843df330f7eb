"""Monte Carlo trajectories: every neuron is measured and its bit drives the next layer.

Shots are simulated in fixed blocks; block ``b`` draws from
``default_rng([seed, b])`` so results depend only on ``(seed, shots)``.
"""

from __future__ import annotations

import math

import numpy as np

from softq.network.encoding import NeuronState, clamp_features
from softq.network.meanfield import ForwardResult
from softq.network.topology import NetworkTopology
from softq.noise.channels import NoisePolicy
from softq.qcore import euler_to_matrix, ry

BLOCK_SHOTS = 4096


def _conj(u, rho):
    return u @ rho @ u.conj().T


def _noise(rho, noise: NoisePolicy, rng):
    pauli = noise.pauli()
    flipped = _conj(pauli, rho)
    if noise.stochastic_realization:
        hit = rng.random(rho.shape[0]) < noise.p
        return np.where(hit[:, None, None], flipped, rho)
    return (1 - noise.p) * rho + noise.p * flipped


def _measure(rho, rng) -> np.ndarray:
    return rng.random(rho.shape[0]) < np.clip(rho[:, 1, 1].real, 0.0, 1.0)


def _run_block(net: NetworkTopology, x: np.ndarray, noise, n: int, rng) -> list[np.ndarray]:
    active = noise is not None and noise.active
    bits = []
    layer = []
    for xi in x:
        psi = ry(xi * math.pi)[:, 0]
        rho = np.broadcast_to(np.outer(psi, psi.conj()), (n, 2, 2)).copy()
        if active and noise.noisy_inputs:
            rho = _noise(rho, noise, rng)
        layer.append(_measure(rho, rng))
    bits.append(np.stack(layer, axis=1))
    for l in range(1, net.n_layers):
        prev = bits[-1]
        layer = []
        for j in range(net.layer_sizes[l]):
            rho = np.zeros((n, 2, 2), dtype=complex)
            rho[:, 0, 0] = 1.0
            for i in range(net.layer_sizes[l - 1]):
                w = euler_to_matrix(net.edges[l - 1][i, j])
                rho = np.where(prev[:, i, None, None], _conj(w, rho), rho)
            rho = _conj(euler_to_matrix(net.biases[l - 1][j]), rho)
            if active:
                rho = _noise(rho, noise, rng)
            layer.append(_measure(rho, rng))
        bits.append(np.stack(layer, axis=1))
    return bits


def trajectory_forward(net: NetworkTopology, inputs, noise: NoisePolicy | None = None,
                       shots: int = 10_000, seed: int = 0) -> ForwardResult:
    """Average output bits of ``shots`` independent runs of the network."""
    if shots < 1:
        raise ValueError("shots must be a positive integer")
    x = net.expand_inputs(clamp_features(inputs))
    counts = [np.zeros(n) for n in net.layer_sizes]
    done, block = 0, 0
    while done < shots:
        n = min(BLOCK_SHOTS, shots - done)
        rng = np.random.default_rng([seed, block])
        for c, b in zip(counts, _run_block(net, x, noise, n, rng)):
            c += b.sum(axis=0)
        done += n
        block += 1
    freqs = [c / shots for c in counts]
    marginals = {
        (l, j): NeuronState(np.diag([1 - f, f]).astype(complex))
        for l, fl in enumerate(freqs)
        for j, f in enumerate(fl)
    }
    return ForwardResult(freqs[-1], "trajectory", marginals, shots=shots)


def trajectory_probs(net: NetworkTopology, X, noise: NoisePolicy | None = None,
                     shots: int = 10_000, seed: int = 0) -> np.ndarray:
    """Batched empirical output rates; sample ``k`` uses seed ``(seed, k)``."""
    X = np.atleast_2d(X)
    return np.stack([
        trajectory_forward(net, x, noise, shots, seed=int(np.random.SeedSequence([seed, k]).generate_state(1)[0]))
        .output_probs
        for k, x in enumerate(X)
    ])
