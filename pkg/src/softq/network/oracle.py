"""Exact output statistics by enumerating every outcome vector of each layer.

Outcome vectors are indexed little-endian: bit ``j`` of the index is the bit of
neuron ``j`` in that layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from softq.network.encoding import encode_feature
from softq.network.topology import NetworkTopology
from softq.noise.channels import NoisePolicy
from softq.qcore import KET0, apply_channel, apply_unitary, euler_to_matrix

MAX_NEURONS = 20
MAX_WIDTH = 12


@dataclass
class OracleResult:
    joint: np.ndarray          # P(output vector), length 2**n_out
    marginals: dict            # (layer, j) -> P(neuron fires)
    output_probs: np.ndarray
    engine: str = "oracle"


def _bits(n: int) -> np.ndarray:
    """``(2**n, n)`` table of outcome vectors."""
    idx = np.arange(2 ** n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(bool)


def _product_distribution(q: np.ndarray) -> np.ndarray:
    """Joint law of independent bits firing with probabilities ``q[..., j]``."""
    n = q.shape[-1]
    table = _bits(n)
    return np.prod(np.where(table, q[..., None, :], 1 - q[..., None, :]), axis=-1)


def enumeration_oracle(net: NetworkTopology, inputs, noise: NoisePolicy | None = None) -> OracleResult:
    if sum(net.layer_sizes) > MAX_NEURONS or max(net.layer_sizes) > MAX_WIDTH:
        raise ValueError(
            f"oracle limited to {MAX_NEURONS} neurons and width {MAX_WIDTH}; got {net.layer_sizes}")
    active = noise is not None and noise.active
    channel = noise.kraus() if active else None

    q_in = []
    for x in net.expand_inputs(inputs):
        rho = encode_feature(x).rho
        if active and noise.noisy_inputs:
            rho = apply_channel(rho, channel)
        q_in.append(rho[1, 1].real)
    dist = _product_distribution(np.array(q_in))
    marginals = {(0, i): float(q) for i, q in enumerate(q_in)}

    for l in range(1, net.n_layers):
        n_prev, n_cur = net.layer_sizes[l - 1], net.layer_sizes[l]
        gates = [[euler_to_matrix(net.edges[l - 1][i, j]) for j in range(n_cur)] for i in range(n_prev)]
        bias = [euler_to_matrix(net.biases[l - 1][j]) for j in range(n_cur)]
        cond = np.zeros((2 ** n_prev, n_cur))
        for s, bits in enumerate(_bits(n_prev)):
            if dist[s] == 0:
                continue
            for j in range(n_cur):
                rho = KET0
                for i in np.flatnonzero(bits):
                    rho = apply_unitary(rho, gates[i][j])
                rho = apply_unitary(rho, bias[j])
                if active:
                    rho = apply_channel(rho, channel)
                cond[s, j] = rho[1, 1].real
        cond = np.clip(cond, 0.0, 1.0)
        dist = dist @ _product_distribution(cond)
        for j, p in enumerate(dist @ _bits(n_cur)):
            marginals[(l, j)] = float(p)
    out = np.array([marginals[(net.n_layers - 1, j)] for j in range(net.n_outputs)])
    return OracleResult(dist, marginals, out)
