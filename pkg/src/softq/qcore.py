"""Dense quantum primitives for small systems (dimension 2 through 16).

Matrices are plain ``numpy`` complex arrays. States are density matrices;
gates are unitaries; noise is a list of Kraus operators. Everything here is a
pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_DIM = 16

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)


class QuantumError(ValueError):
    """Raised when an operator or state violates its contract."""


def _as_square(m, name="matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise QuantumError(f"{name} must be square, got shape {m.shape}")
    if not 2 <= m.shape[0] <= MAX_DIM:
        raise QuantumError(f"{name} dimension {m.shape[0]} outside 2..{MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise QuantumError(f"{name} has non-finite entries")
    return m


def rz(angle: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


def ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class EulerUnitary:
    """Single-qubit gate ``Rz(phi) @ Ry(theta) @ Rz(lam)``."""

    theta: float
    phi: float
    lam: float

    def matrix(self) -> np.ndarray:
        return euler_to_matrix(self)

    def angles(self) -> tuple[float, float, float]:
        return (self.theta, self.phi, self.lam)


def euler_to_matrix(u: EulerUnitary | Sequence[float]) -> np.ndarray:
    """Realize a ZYZ Euler triple ``(theta, phi, lam)`` as a 2x2 unitary."""
    theta, phi, lam = u.angles() if isinstance(u, EulerUnitary) else u
    if not all(math.isfinite(a) for a in (theta, phi, lam)):
        raise QuantumError("Euler angles must be finite")
    return rz(phi) @ ry(theta) @ rz(lam)


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    return np.allclose(u @ u.conj().T, np.eye(u.shape[0]), rtol=0, atol=atol)


def is_hermitian(m, atol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=complex)
    return np.allclose(m, m.conj().T, rtol=0, atol=atol)


def check_density_matrix(rho, atol: float = 1e-12) -> np.ndarray:
    """Return ``rho`` as a complex array, raising if it is not a valid state."""
    rho = _as_square(rho, "density matrix")
    if not is_hermitian(rho, atol):
        raise QuantumError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise QuantumError(f"density matrix trace {tr!r} != 1")
    evals, _ = hermitian_eigs(rho)
    if evals[0] < -atol:
        raise QuantumError(f"density matrix has negative eigenvalue {evals[0]!r}")
    return rho


def is_density_matrix(rho, atol: float = 1e-12) -> bool:
    try:
        check_density_matrix(rho, atol)
    except QuantumError:
        return False
    return True


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def apply_unitary(rho, u) -> np.ndarray:
    """``U rho U^dagger``; rejects a non-unitary ``U`` (tolerance 1e-10)."""
    rho = np.asarray(rho, dtype=complex)
    u = _as_square(u, "unitary")
    if rho.shape != u.shape:
        raise QuantumError(f"dimension mismatch: state {rho.shape} vs gate {u.shape}")
    if not is_unitary(u, 1e-10):
        raise QuantumError("gate is not unitary")
    return u @ rho @ u.conj().T


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by its Kraus operators; completeness is checked on creation."""

    kraus_ops: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(_as_square(k, "Kraus operator") for k in self.kraus_ops)
        if not ops:
            raise QuantumError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise QuantumError("Kraus operators differ in dimension")
        total = sum(k.conj().T @ k for k in ops)
        if not np.allclose(total, np.eye(dim), rtol=0, atol=1e-12):
            raise QuantumError("Kraus operators are not complete (sum K^dag K != I)")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def apply(self, rho) -> np.ndarray:
        return apply_channel(rho, self)

    @classmethod
    def from_unitary(cls, u) -> "KrausChannel":
        return cls((np.asarray(u, dtype=complex),))


def apply_channel(rho, ch: KrausChannel) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise QuantumError(f"dimension mismatch: state {rho.shape} vs channel dim {ch.dim}")
    return sum(k @ rho @ k.conj().T for k in ch.kraus_ops)


def tensor(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise QuantumError(f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}")
    return np.kron(a, b)


def tensor_all(mats: Sequence) -> np.ndarray:
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = tensor(out, m)
    return out


def partial_trace(rho, subsystem_dims: Sequence[int], keep) -> np.ndarray:
    """Reduced state on the subsystems listed in ``keep`` (order preserved)."""
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in subsystem_dims]
    if any(d < 1 for d in dims) or math.prod(dims) != rho.shape[0]:
        raise QuantumError(f"subsystem dims {dims} do not factor dimension {rho.shape[0]}")
    keep = sorted({keep} if isinstance(keep, int) else set(keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise QuantumError(f"keep indices {keep} out of range")
    n = len(dims)
    t = rho.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # contract each traced subsystem's row index with its column index
    for offset, k in enumerate(traced):
        axis = k - offset
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d = math.prod(dims[k] for k in keep)
    return t.reshape(d, d)


def hermitian_eigs(m, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(evals, evecs)`` with ``evals`` ascending and eigenvectors in
    the columns of ``evecs``. Sweeps stop once the Frobenius norm of the
    off-diagonal part falls below ``tol`` (scaled by the matrix norm when it
    exceeds one).
    """
    a = _as_square(m, "matrix").copy()
    if not is_hermitian(a, 1e-10):
        raise QuantumError("hermitian_eigs needs a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                # rotate the phase of a_pq away, then a real Jacobi rotation on (p, q)
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1 + tau * tau)) if tau else 1.0
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                cols = [p, q]
                a[:, cols] = a[:, cols] @ j
                a[cols, :] = j.conj().T @ a[cols, :]
                a[p, q] = a[q, p] = 0
                v[:, cols] = v[:, cols] @ j
    else:
        raise QuantumError("Jacobi iteration did not converge")
    evals = np.diag(a).real.copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def von_neumann_entropy(rho) -> float:
    """Entropy in bits, with 0 log 0 taken as 0."""
    evals, _ = hermitian_eigs(rho)
    evals = evals[evals > 1e-15]
    s = float(-np.sum(evals * np.log2(evals)))
    return min(max(s, 0.0), math.log2(np.asarray(rho).shape[0]))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state from a Ginibre matrix; used by tests and analysis drivers."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim: int, n_ops: int, rng: np.random.Generator) -> KrausChannel:
    """Random CPTP map: slices of a random isometry ``dim -> dim * n_ops``."""
    g = rng.normal(size=(dim * n_ops, dim)) + 1j * rng.normal(size=(dim * n_ops, dim))
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[k * dim:(k + 1) * dim] for k in range(n_ops)))
