"""Independent reference computations shared by the unit and acceptance suites."""

import math

import numpy as np

from softq.network import NetworkTopology
from softq.qcore import I2, X


def tree_net(layer_sizes, rng) -> NetworkTopology:
    """Random network in which every neuron drives exactly one neuron of the next layer.

    Each non-input neuron keeps at least one parent when the layer widths allow
    it; all other edges are set to the identity gate. No two neurons then
    share an ancestor, which is the wiring where per-neuron marginals are exact.
    """
    net = NetworkTopology.random(layer_sizes, rng)
    for l, (a, b) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
        child = np.concatenate([np.arange(min(a, b)), rng.integers(0, b, max(a - b, 0))])
        rng.shuffle(child)
        mask = np.zeros((a, b), bool)
        mask[np.arange(a), child] = True
        net.edges[l][~mask] = 0.0
    return net


def _entropy(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def _conditional(rho, measured, theta, phi):
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    ns = n[0] * X + n[1] * np.array([[0, -1j], [1j, 0]]) + n[2] * np.diag([1, -1])
    total = 0.0
    for proj in ((I2 + ns) / 2, (I2 - ns) / 2):
        op = np.kron(proj, I2) if measured == 1 else np.kron(I2, proj)
        post = op @ rho @ op
        p = np.trace(post).real
        if p < 1e-14:
            continue
        t = post.reshape(2, 2, 2, 2)
        other = np.einsum("ajak->jk", t) if measured == 1 else np.einsum("iaja->ij", t)
        total += p * _entropy(other / p)
    return total


def brute_force_discord(rho, measured):
    """Dense grid over the measurement sphere, then three zoomed grids around the best point."""
    t = rho.reshape(2, 2, 2, 2)
    rho_m = np.einsum("ajbj->ab", t) if measured == 1 else np.einsum("iaib->ab", t)
    lo_t, hi_t, lo_p, hi_p = 0.0, math.pi, 0.0, 2 * math.pi
    n = 121
    best = None
    for level in range(4):
        thetas = np.linspace(lo_t, hi_t, n)
        phis = np.linspace(lo_p, hi_p, n)
        vals = np.array([[_conditional(rho, measured, a, b) for b in phis] for a in thetas])
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        best = vals[i, j] if best is None else min(best, vals[i, j])
        dt, dp = 2 * (hi_t - lo_t) / (n - 1), 2 * (hi_p - lo_p) / (n - 1)
        lo_t, hi_t = thetas[i] - dt, thetas[i] + dt
        lo_p, hi_p = phis[j] - dp, phis[j] + dp
        n = 41
    return max(_entropy(rho_m) - _entropy(rho) + best, 0.0)
