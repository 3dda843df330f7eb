"""Exact gradients of the MSE loss through the mean-field pass.

Each edge step ``r <- p r + (1 - p) R r`` is linear in the target's Bloch
vector and affine in the source read-out probability ``p``, so the adjoint
sweep only ever touches single-neuron (3-dimensional) states.
"""

from __future__ import annotations

import numpy as np

from softq.network.bloch import rotation_jacobian
from softq.network.meanfield import run_mean_field
from softq.network.topology import NetworkTopology
from softq.noise.channels import NoisePolicy
from softq.training.loss import mse_loss


def loss_and_gradient(net: NetworkTopology, X, Y, noise: NoisePolicy | None = None):
    """Return ``(loss, grad)`` with ``grad`` aligned to ``net.params``."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    fwd = run_mean_field(net, X, noise, keep_tape=True)
    pred = fwd.output_p1
    loss = mse_loss(pred, Y)
    n = pred.shape[0]
    scale = noise.bloch() if noise is not None and noise.active else None

    # dL/dp0 at the output layer (p1 = 1 - p0)
    adj_p0 = -2.0 * (pred - Y) / n
    grads_e, grads_b = [None] * (net.n_layers - 1), [None] * (net.n_layers - 1)
    for l in reversed(range(net.n_layers - 1)):
        tape = fwd.tapes[l]
        a = np.zeros(tape.states.shape[1:])
        a[..., 2] = 0.5 * adj_p0
        if scale is not None:
            a = a * scale
        g_bias = np.einsum("Bja,Bjb->jab", a, tape.states[-1])
        a = np.einsum("jab,Bja->Bjb", tape.rot_bias, a)
        n_in = tape.rot_edges.shape[0]
        g_edge = np.zeros_like(tape.rot_edges)
        adj_prev = np.zeros_like(tape.p0_in)
        for i in reversed(range(n_in)):
            r = tape.states[i]
            rot = tape.rot_edges[i]
            w = tape.p0_in[:, i, None, None]
            adj_prev[:, i] = np.einsum("Bja,Bja->B", a, r - np.einsum("jab,Bjb->Bja", rot, r))
            g_edge[i] = np.einsum("Bja,Bjb->jab", (1.0 - w) * a, r)
            a = w * a + (1.0 - w) * np.einsum("jab,Bja->Bjb", rot, a)
        grads_e[l] = np.einsum("ijab,ijkab->ijk", g_edge, rotation_jacobian(net.edges[l]))
        grads_b[l] = np.einsum("jab,jkab->jk", g_bias, rotation_jacobian(net.biases[l]))
        # source read-outs p0 = (1 + z) / 2 feed the layer below
        adj_p0 = adj_prev
    flat = []
    for ge, gb in zip(grads_e, grads_b):
        flat += [ge.ravel(), gb.ravel()]
    return loss, np.concatenate(flat)


def analytic_gradient(net: NetworkTopology, X, Y, noise: NoisePolicy | None = None) -> np.ndarray:
    return loss_and_gradient(net, X, Y, noise)[1]


def finite_difference_gradient(net: NetworkTopology, X, Y, noise: NoisePolicy | None = None,
                               step: float = 1e-5) -> np.ndarray:
    """Central differences of the loss, one coordinate at a time."""
    from softq.network.meanfield import mean_field_probs

    theta = net.params
    g = np.empty_like(theta)
    for k in range(theta.size):
        e = np.zeros_like(theta)
        e[k] = step
        up = mse_loss(mean_field_probs(net.with_params(theta + e), X, noise), Y)
        dn = mse_loss(mean_field_probs(net.with_params(theta - e), X, noise), Y)
        g[k] = (up - dn) / (2 * step)
    return g
