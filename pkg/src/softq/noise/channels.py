"""Pauli flip channels and the policy describing where they act."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from softq.qcore import I2, X, Y, Z, KrausChannel


class Channel(str, enum.Enum):
    NONE = "none"
    BIT_FLIP = "bit_flip"
    PHASE_FLIP = "phase_flip"
    BIT_PHASE_FLIP = "bit_phase_flip"

    @classmethod
    def parse(cls, value) -> "Channel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"bit": "bit_flip", "phase": "phase_flip", "bit_phase": "bit_phase_flip", "bitphase": "bit_phase_flip"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown noise channel {value!r}; expected one of {[c.value for c in cls]}") from None


class Injection(str, enum.Enum):
    # channel on every computed neuron's output state, just before it is read out
    PRE_MEASUREMENT = "pre_measurement"
    # additionally on every input neuron, right after encoding
    POST_ENCODING = "post_encoding"

    @classmethod
    def parse(cls, value) -> "Injection":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown injection point {value!r}") from None


PAULI = {Channel.BIT_FLIP: X, Channel.PHASE_FLIP: Z, Channel.BIT_PHASE_FLIP: Y}

# Bloch-vector axes left untouched by each Pauli (x, y, z)
_PAULI_AXIS = {Channel.BIT_FLIP: 0, Channel.BIT_PHASE_FLIP: 1, Channel.PHASE_FLIP: 2}


def flip_channel(kind, p: float) -> KrausChannel:
    """Kraus set ``{sqrt(1-p) I, sqrt(p) P}`` with ``P`` the Pauli named by ``kind``."""
    kind = Channel.parse(kind)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    if kind is Channel.NONE:
        return KrausChannel((I2,))
    return KrausChannel((math.sqrt(1 - p) * I2, math.sqrt(p) * PAULI[kind]))


def bloch_scaling(kind, p: float) -> np.ndarray:
    """Diagonal action of a flip channel on the Bloch vector.

    A Pauli flip with probability ``p`` keeps the component along its own axis
    and multiplies the other two by ``1 - 2p``.
    """
    kind = Channel.parse(kind)
    s = np.ones(3)
    if kind is not Channel.NONE:
        s[:] = 1.0 - 2.0 * p
        s[_PAULI_AXIS[kind]] = 1.0
    return s


@dataclass(frozen=True)
class NoisePolicy:
    channel: Channel = Channel.NONE
    p: float = 0.0
    injection: Injection = Injection.PRE_MEASUREMENT
    stochastic_realization: bool = False

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel.parse(self.channel))
        object.__setattr__(self, "injection", Injection.parse(self.injection))
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"noise probability must lie in [0, 0.5], got {self.p}")

    @property
    def active(self) -> bool:
        return self.channel is not Channel.NONE and self.p > 0

    @property
    def noisy_inputs(self) -> bool:
        return self.active and self.injection is Injection.POST_ENCODING

    def kraus(self) -> KrausChannel:
        return flip_channel(self.channel, self.p)

    def bloch(self) -> np.ndarray:
        return bloch_scaling(self.channel, self.p)

    def pauli(self):
        return PAULI.get(self.channel)

    def to_dict(self) -> dict:
        return {
            "channel": self.channel.value,
            "p": self.p,
            "injection": self.injection.value,
            "stochastic_realization": self.stochastic_realization,
        }

    @classmethod
    def from_dict(cls, d: dict | None) -> "NoisePolicy | None":
        if d is None:
            return None
        return cls(**d)


NOISELESS = NoisePolicy()
