"""SO(3) images of ZYZ Euler gates, vectorized over leading axes.

A single-qubit unitary ``Rz(phi) Ry(theta) Rz(lam)`` acts on the Bloch vector
as the rotation ``Rz3(phi) Ry3(theta) Rz3(lam)``.
"""

from __future__ import annotations

import numpy as np


def _rz3(a):
    c, s = np.cos(a), np.sin(a)
    o, l = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, -s, o], -1), np.stack([s, c, o], -1), np.stack([o, o, l], -1)], -2)


def _ry3(a):
    c, s = np.cos(a), np.sin(a)
    o, l = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, o, s], -1), np.stack([o, l, o], -1), np.stack([-s, o, c], -1)], -2)


def _drz3(a):
    c, s = np.cos(a), np.sin(a)
    o = np.zeros_like(a)
    return np.stack([np.stack([-s, -c, o], -1), np.stack([c, -s, o], -1), np.stack([o, o, o], -1)], -2)


def _dry3(a):
    c, s = np.cos(a), np.sin(a)
    o = np.zeros_like(a)
    return np.stack([np.stack([-s, o, c], -1), np.stack([o, o, o], -1), np.stack([-c, o, -s], -1)], -2)


def rotation(angles) -> np.ndarray:
    """``(..., 3)`` Euler triples -> ``(..., 3, 3)`` rotation matrices."""
    a = np.asarray(angles, dtype=float)
    return _rz3(a[..., 1]) @ _ry3(a[..., 0]) @ _rz3(a[..., 2])


def rotation_jacobian(angles) -> np.ndarray:
    """Derivatives of :func:`rotation`, shape ``(..., 3, 3, 3)``; axis -3 indexes (theta, phi, lam)."""
    a = np.asarray(angles, dtype=float)
    zp, yt, zl = _rz3(a[..., 1]), _ry3(a[..., 0]), _rz3(a[..., 2])
    d_theta = zp @ _dry3(a[..., 0]) @ zl
    d_phi = _drz3(a[..., 1]) @ yt @ zl
    d_lam = zp @ yt @ _drz3(a[..., 2])
    return np.stack([d_theta, d_phi, d_lam], axis=-3)


def unitary_to_rotation(u) -> np.ndarray:
    """``R_ab = tr(sigma_a U sigma_b U^dag) / 2`` for any 2x2 unitary."""
    from softq.qcore import X, Y, Z

    u = np.asarray(u, dtype=complex)
    paulis = (X, Y, Z)
    return np.array([[0.5 * np.trace(sa @ u @ sb @ u.conj().T).real for sb in paulis] for sa in paulis])
