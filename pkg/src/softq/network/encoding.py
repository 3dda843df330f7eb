"""Angle encoding of classical features and the per-neuron state record."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from softq.qcore import KET0, apply_unitary, ry

log = logging.getLogger(__name__)

# Features outside this interval are clamped before encoding.
FEATURE_RANGE = (-1.0, 1.0)


@dataclass(frozen=True)
class NeuronState:
    rho: np.ndarray

    @property
    def p0(self) -> float:
        return float(self.rho[0, 0].real)

    @property
    def p1(self) -> float:
        return float(self.rho[1, 1].real)

    @classmethod
    def from_bloch(cls, r) -> "NeuronState":
        x, y, z = (float(v) for v in r)
        rho = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)
        return cls(rho)

    def bloch(self) -> np.ndarray:
        return bloch_vector(self.rho)


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([2 * rho[1, 0].real, 2 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real])


def clamp_features(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    lo, hi = FEATURE_RANGE
    clipped = np.clip(x, lo, hi)
    if np.any(clipped != x):
        log.warning("clamped %d feature value(s) into [%g, %g]", int(np.sum(clipped != x)), lo, hi)
    return clipped


def encode_feature(x: float) -> NeuronState:
    """``Ry(x pi)|0>``; the neuron then fires with probability ``sin^2(x pi / 2)``."""
    x = float(clamp_features(x))
    return NeuronState(apply_unitary(KET0, ry(x * math.pi)))


def encoded_p0(x) -> np.ndarray:
    """Vectorized probability of outcome 0 for encoded features."""
    x = clamp_features(x)
    return np.cos(0.5 * math.pi * x) ** 2
