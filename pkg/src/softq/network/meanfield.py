"""Mean-field forward pass: layer-wise propagation of single-neuron marginals.

Every computed neuron starts in ``|0><0|``. For each source neuron ``i`` of
the previous layer (ascending index) its state is replaced by the mixture
``p_i rho + (1 - p_i) W_ij rho W_ij^dag`` where ``p_i`` is the probability that
neuron ``i`` reads 0; afterwards the bias gate ``U_j`` and any pre-measurement
noise act. The computation runs on Bloch vectors, batched over samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from softq.network.bloch import rotation
from softq.network.encoding import NeuronState, clamp_features
from softq.network.topology import NetworkTopology
from softq.noise.channels import NoisePolicy


@dataclass
class ForwardResult:
    output_probs: np.ndarray
    engine: str
    marginals: dict | None = None
    shots: int | None = None

    def __post_init__(self):
        self.output_probs = np.clip(np.asarray(self.output_probs, dtype=float), 0.0, 1.0)


@dataclass
class LayerTape:
    p0_in: np.ndarray         # (B, n_in) read-out probabilities of the source layer
    states: np.ndarray        # (n_in + 1, B, n_out, 3) Bloch vectors before/after each edge step
    rot_edges: np.ndarray     # (n_in, n_out, 3, 3)
    rot_bias: np.ndarray      # (n_out, 3, 3)


@dataclass
class MeanFieldPass:
    net: NetworkTopology
    noise: NoisePolicy | None
    layer_bloch: list = field(default_factory=list)   # per layer (B, n_l, 3), after noise
    tapes: list = field(default_factory=list)

    @property
    def output_p1(self) -> np.ndarray:
        return 0.5 * (1.0 - self.layer_bloch[-1][..., 2])


def _check_inputs(net: NetworkTopology, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != net.n_features:
        raise ValueError(
            f"network expects {net.n_features} features (input width {net.layer_sizes[0]}"
            f" / parallel factor {net.parallel_encoding_factor}), got {X.shape[1]}")
    return X


def input_bloch(net: NetworkTopology, X, noise: NoisePolicy | None = None) -> np.ndarray:
    x = net.expand_inputs(clamp_features(_check_inputs(net, X))) * np.pi
    r = np.stack([np.sin(x), np.zeros_like(x), np.cos(x)], axis=-1)
    if noise is not None and noise.noisy_inputs:
        r = r * noise.bloch()
    return r


def run_mean_field(net: NetworkTopology, X, noise: NoisePolicy | None = None,
                   keep_tape: bool = False) -> MeanFieldPass:
    X = _check_inputs(net, X)
    out = MeanFieldPass(net, noise)
    r_prev = input_bloch(net, X, noise)
    out.layer_bloch.append(r_prev)
    scale = noise.bloch() if noise is not None and noise.active else None
    batch = X.shape[0]
    for l in range(net.n_layers - 1):
        p0 = 0.5 * (1.0 + r_prev[..., 2])
        rot_e = rotation(net.edges[l])
        rot_b = rotation(net.biases[l])
        n_in, n_out = rot_e.shape[:2]
        r = np.zeros((batch, n_out, 3))
        r[..., 2] = 1.0
        states = [r] if keep_tape else None
        for i in range(n_in):
            turned = np.einsum("jab,Bjb->Bja", rot_e[i], r)
            w = p0[:, i, None, None]
            r = w * r + (1.0 - w) * turned
            if keep_tape:
                states.append(r)
        r = np.einsum("jab,Bjb->Bja", rot_b, r)
        if scale is not None:
            r = r * scale
        out.layer_bloch.append(r)
        if keep_tape:
            out.tapes.append(LayerTape(p0, np.stack(states), rot_e, rot_b))
        r_prev = r
    return out


def mean_field_probs(net: NetworkTopology, X, noise: NoisePolicy | None = None) -> np.ndarray:
    """Batched output-layer firing probabilities, shape ``(B, n_out)``."""
    return np.clip(run_mean_field(net, X, noise).output_p1, 0.0, 1.0)


def mean_field_forward(net: NetworkTopology, inputs, noise: NoisePolicy | None = None) -> ForwardResult:
    """Single-sample forward pass with every neuron's marginal state."""
    res = run_mean_field(net, np.asarray(inputs, dtype=float)[None, :], noise)
    marginals = {
        (l, j): NeuronState.from_bloch(res.layer_bloch[l][0, j])
        for l in range(net.n_layers)
        for j in range(net.layer_sizes[l])
    }
    return ForwardResult(res.output_p1[0], "meanfield", marginals)
