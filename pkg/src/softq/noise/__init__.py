"""Flip channels and noise policies. The robustness sweep lives in :mod:`softq.noise.sweep`."""

from softq.noise.channels import (
    NOISELESS,
    Channel,
    Injection,
    NoisePolicy,
    bloch_scaling,
    flip_channel,
)

__all__ = ["NOISELESS", "Channel", "Injection", "NoisePolicy", "bloch_scaling", "flip_channel"]
