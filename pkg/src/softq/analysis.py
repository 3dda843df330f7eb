"""Quantumness diagnostics for pairs of neurons.

One measurement-controlled synapse leaves its two neurons in a
classical-quantum state whose discord and negativity are computed here.
A second check confirms that deferring the source measurement to the end
of the circuit leaves every outcome statistic unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from softq.qcore import (
    I2, KET0, KET1, X, Y, Z, EulerUnitary, KrausChannel, QuantumError, apply_channel,
    check_density_matrix, euler_to_matrix, hermitian_eigs, is_unitary, partial_trace,
    random_density_matrix, random_unitary, tensor, tensor_all, von_neumann_entropy,
)

log = logging.getLogger(__name__)

GRID = 64
REFINE_TOL = 1e-6
PAULIS = (X, Y, Z)


@dataclass(frozen=True)
class BipartiteState:
    """Two-qubit density matrix; subsystem 1 is the left tensor factor."""

    rho: np.ndarray
    labels: tuple[str, str] = ("neuron-1", "neuron-2")

    def __post_init__(self):
        rho = check_density_matrix(self.rho)
        if rho.shape != (4, 4):
            raise QuantumError(f"two-qubit state must be 4x4, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    def reduced(self, subsystem: int) -> np.ndarray:
        return partial_trace(self.rho, (2, 2), subsystem - 1)

    def swapped(self) -> "BipartiteState":
        t = self.rho.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
        return BipartiteState(t, self.labels[::-1])

    def describe(self) -> dict:
        return {
            "labels": list(self.labels),
            "real": np.round(self.rho.real, 15).tolist(),
            "imag": np.round(self.rho.imag, 15).tolist(),
        }


@dataclass(frozen=True)
class MeasurementDirection:
    theta: float
    phi: float

    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.vector()
        ns = sum(c * p for c, p in zip(n, PAULIS))
        return (I2 + ns) / 2, (I2 - ns) / 2


def _as_channel(w) -> KrausChannel:
    if isinstance(w, KrausChannel):
        return w
    if isinstance(w, EulerUnitary):
        return KrausChannel.from_unitary(w.matrix())
    return KrausChannel.from_unitary(np.asarray(w, dtype=complex))


def _as_unitary(u) -> np.ndarray:
    if isinstance(u, EulerUnitary):
        return u.matrix()
    arr = np.asarray(u)
    if arr.shape == (3,):
        return euler_to_matrix(tuple(float(a) for a in arr))
    arr = arr.astype(complex)
    if arr.shape != (2, 2) or not is_unitary(arr):
        raise QuantumError("expected a 2x2 unitary or an Euler triple")
    return arr


def build_cq_state(p1: float, rho2, w) -> BipartiteState:
    """``p1 |0><0| (x) rho2 + (1 - p1) |1><1| (x) W(rho2)``."""
    if not 0.0 <= p1 <= 1.0:
        raise ValueError(f"p1 must lie in [0, 1], got {p1}")
    rho2 = check_density_matrix(rho2)
    w_rho = apply_channel(rho2, _as_channel(w))
    return BipartiteState(p1 * tensor(KET0, rho2) + (1 - p1) * tensor(KET1, w_rho))


def _correlation_form(rho) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bloch vectors ``a``, ``b`` and correlation matrix ``T`` of a two-qubit state."""
    a = np.array([np.trace(rho @ tensor(p, I2)).real for p in PAULIS])
    b = np.array([np.trace(rho @ tensor(I2, p)).real for p in PAULIS])
    t = np.array([[np.trace(rho @ tensor(p, q)).real for q in PAULIS] for p in PAULIS])
    return a, b, t


def _binary_entropy_of_radius(r):
    lam = np.clip((1 + r) / 2, 0.0, 1.0)
    out = np.zeros_like(lam)
    for v in (lam, 1 - lam):
        mask = v > 1e-15
        out[mask] -= v[mask] * np.log2(v[mask])
    return out


def conditional_entropy(a, b, t, theta, phi):
    """Average entropy of the unmeasured qubit after measuring along ``(theta, phi)``.

    Works elementwise on arrays of angles.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    n = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], -1)
    na = n @ a
    tn = n @ t
    total = np.zeros(theta.shape)
    for sign in (1.0, -1.0):
        prob = (1 + sign * na) / 2
        unnorm = b + sign * tn
        safe = np.where(prob > 1e-14, prob, 1.0)
        r = np.linalg.norm(unnorm, axis=-1) / (2 * safe)
        total += np.where(prob > 1e-14, prob * _binary_entropy_of_radius(np.minimum(r, 1.0)), 0.0)
    return total


def _minimize_conditional(a, b, t, grid: int = GRID) -> tuple[float, MeasurementDirection]:
    thetas = np.linspace(0.0, math.pi, grid)
    phis = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    vals = conditional_entropy(a, b, t, tg, pg)
    # argmin returns the first minimum in (theta, phi) order, which makes ties deterministic
    order = np.argsort(vals, axis=None, kind="stable")[:4]
    best_val, best = math.inf, None
    for flat in order:
        i, j = np.unravel_index(flat, vals.shape)
        start = np.array([thetas[i], phis[j]])
        res = minimize(lambda x: float(conditional_entropy(a, b, t, x[0], x[1])), start,
                       method="Nelder-Mead", options={"xatol": REFINE_TOL, "fatol": 1e-12})
        val = min(float(res.fun), float(vals[i, j]))
        if val < best_val:
            best_val = val
            best = res.x if res.fun <= vals[i, j] else start
    return best_val, MeasurementDirection(float(best[0]), float(best[1]))


def discord(state: BipartiteState | np.ndarray, measured_subsystem: int = 1,
            return_direction: bool = False):
    """Discord in bits when ``measured_subsystem`` (1 or 2) is measured projectively."""
    if measured_subsystem not in (1, 2):
        raise ValueError("measured_subsystem must be 1 or 2")
    if not isinstance(state, BipartiteState):
        state = BipartiteState(state)
    if measured_subsystem == 2:
        state = state.swapped()
    a, b, t = _correlation_form(state.rho)
    s_cond, direction = _minimize_conditional(a, b, t)
    d = von_neumann_entropy(state.reduced(1)) - von_neumann_entropy(state.rho) + s_cond
    if d < -1e-9:
        log.warning("discord evaluated to %.3e; numerical error above tolerance", d)
    d = max(d, 0.0)
    return (d, direction) if return_direction else d


def partial_transpose(rho, subsystem: int = 2) -> np.ndarray:
    t = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    t = t.transpose(0, 3, 2, 1) if subsystem == 2 else t.transpose(2, 1, 0, 3)
    return t.reshape(4, 4)


def negativity(state: BipartiteState | np.ndarray) -> float:
    rho = state.rho if isinstance(state, BipartiteState) else check_density_matrix(state)
    evals, _ = hermitian_eigs(partial_transpose(rho))
    return float(-np.sum(evals[evals < 0])) + 0.0  # avoid reporting -0.0


# --- deferred measurement ---------------------------------------------------

def _controlled(u, control: int, target: int, n: int = 3) -> np.ndarray:
    """Apply ``u`` to ``target`` when ``control`` is |1> (qubit 0 is the leftmost factor)."""
    off = [I2] * n
    off[control] = KET0
    on = [I2] * n
    on[control] = KET1
    on[target] = u
    return tensor_all(off) + tensor_all(on)


def _local(u, target: int, n: int = 3) -> np.ndarray:
    ops = [I2] * n
    ops[target] = u
    return tensor_all(ops)


@dataclass
class DeferredReport:
    measured_first: np.ndarray   # (2, 2, 2) indexed by (s1, s2, s3)
    measured_last: np.ndarray
    max_difference: float
    negativity_12: float

    def to_dict(self) -> dict:
        return {
            "measured_first": self.measured_first.tolist(),
            "measured_last": self.measured_last.tolist(),
            "max_difference": self.max_difference,
            "pre_measurement_negativity_12": self.negativity_12,
        }


def _p1(rho) -> float:
    return float(np.clip(rho[1, 1].real, 0.0, 1.0))


def deferred_equivalence_check(rho1, w12, w13, u2, u3) -> DeferredReport:
    """Compare mid-circuit measurement with classical control against quantum control.

    Neurons 2 and 3 start in |0>; ``w12``/``w13`` act when neuron 1 reads 1.
    """
    rho1 = check_density_matrix(rho1)
    if rho1.shape != (2, 2):
        raise QuantumError("rho1 must be a single-qubit state")
    w12, w13, u2, u3 = (_as_unitary(g) for g in (w12, w13, u2, u3))

    first = np.zeros((2, 2, 2))
    for s1 in (0, 1):
        p_s1 = float(np.clip(rho1[s1, s1].real, 0.0, 1.0))
        g2 = u2 @ (w12 if s1 else I2)
        g3 = u3 @ (w13 if s1 else I2)
        q2 = _p1(g2 @ KET0 @ g2.conj().T)
        q3 = _p1(g3 @ KET0 @ g3.conj().T)
        for s2 in (0, 1):
            for s3 in (0, 1):
                first[s1, s2, s3] = p_s1 * (q2 if s2 else 1 - q2) * (q3 if s3 else 1 - q3)

    rho = tensor_all([rho1, KET0, KET0])
    ent = _controlled(w13, 0, 2) @ _controlled(w12, 0, 1)
    rho = ent @ rho @ ent.conj().T
    neg = negativity(partial_trace(rho, (2, 2, 2), (0, 1)))
    loc = _local(u2, 1) @ _local(u3, 2)
    rho = loc @ rho @ loc.conj().T
    last = np.clip(np.diag(rho).real, 0.0, 1.0).reshape(2, 2, 2)
    return DeferredReport(first, last, float(np.max(np.abs(first - last))), neg)


def random_deferred_inputs(rng: np.random.Generator):
    """A random source state and four random Euler gates."""
    rho1 = random_density_matrix(2, rng)
    gates = [EulerUnitary(*rng.uniform(-math.pi, math.pi, 3)) for _ in range(4)]
    return (rho1, *gates)


def discord_report(state: BipartiteState, description: dict | None = None) -> dict:
    d1, n1 = discord(state, 1, return_direction=True)
    d2, n2 = discord(state, 2, return_direction=True)
    return {
        "state": {**(description or {}), **state.describe()},
        "discord": {
            "measured_1": d1, "direction_1": [n1.theta, n1.phi],
            "measured_2": d2, "direction_2": [n2.theta, n2.phi],
        },
        "negativity": negativity(state),
    }


def random_local_unitary(state: BipartiteState, rng: np.random.Generator) -> BipartiteState:
    u = tensor(random_unitary(2, rng), random_unitary(2, rng))
    return BipartiteState(u @ state.rho @ u.conj().T, state.labels)
