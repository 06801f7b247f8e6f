"""Small dense linear algebra for few-qubit states.

Subsystems are indexed from 0, leftmost tensor factor first. All entropies are
in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-10
CLAMP_TOL = 1e-8  # eigenvalues in (-CLAMP_TOL, 0) are roundoff


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid density matrix."""


def _as_dims(dims, size):
    dims = tuple(int(d) for d in dims)
    if any(d < 2 for d in dims):
        raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
    if prod(dims) != size:
        raise ValueError(f"dims {dims} do not match size {size}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a tensor product of subsystems."""

    amps: np.ndarray
    dims: tuple

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        dims = _as_dims(self.dims, amps.size)
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-12:
            raise InvalidStateError(f"state norm^2 = {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_unnormalized(cls, amps, dims):
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), dims)

    def dm(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.dims)

    def __len__(self):
        return self.amps.size


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims."""

    data: np.ndarray
    dims: tuple

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {data.shape}")
        dims = _as_dims(self.dims, data.shape[0])
        if np.max(np.abs(data - data.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(data).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace = {tr!r}, expected 1")
        data = 0.5 * (data + data.conj().T)
        if np.linalg.eigvalsh(data)[0] < -NEG_EIG_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def is_pure(self, tol=1e-10) -> bool:
        return abs(np.trace(self.data @ self.data).real - 1.0) < tol


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.dm()
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def _matrix(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.data
    return np.asarray(m)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices (or density matrices)."""
    a, b = _matrix(a), _matrix(b)
    for m in (a, b):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"kron operands must be square, got {m.shape}")
    return np.kron(a, b)


def _check_keep(keep, n):
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    return keep


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduce `rho` to the subsystems in `keep` (kept in ascending order).

    Accepts a PureState as well, in which case the reduction is taken from the
    amplitude tensor directly.
    """
    if isinstance(rho, PureState):
        n = len(rho.dims)
        keep = _check_keep(keep, n)
        rest = [i for i in range(n) if i not in keep]
        t = rho.amps.reshape(rho.dims).transpose(keep + rest)
        dk = prod(rho.dims[k] for k in keep)
        t = t.reshape(dk, -1)
        out = t @ t.conj().T
        return DensityMatrix(out, tuple(rho.dims[k] for k in keep))

    rho = as_density(rho)
    dims = rho.dims
    n = len(dims)
    keep = _check_keep(keep, n)
    rest = [i for i in range(n) if i not in keep]
    t = rho.data.reshape(dims + dims)
    perm = keep + rest
    t = t.transpose(perm + [n + p for p in perm])
    dk = prod(dims[k] for k in keep)
    dr = prod(dims[r] for r in rest) if rest else 1
    t = t.reshape(dk, dr, dk, dr)
    out = np.einsum("ijkj->ik", t)
    return DensityMatrix(out, tuple(dims[k] for k in keep))


def eig_hermitian(m, vectors=False):
    """Eigenvalues of a Hermitian matrix in descending order.

    With ``vectors=True`` returns ``(values, V)`` where column ``V[:, i]``
    belongs to ``values[i]``.
    """
    m = _matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-8:
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (m + m.conj().T)
    if vectors:
        w, v = np.linalg.eigh(h)
        return w[::-1].copy(), v[:, ::-1].copy()
    return np.linalg.eigvalsh(h)[::-1].copy()


def _clamped(ev, err=InvalidStateError):
    ev = np.asarray(ev, dtype=float)
    if ev.size and ev.min() < -CLAMP_TOL:
        raise err(f"eigenvalue {ev.min()!r} is below -{CLAMP_TOL}")
    return np.clip(ev, 0.0, None)


def entropy_of_spectrum(ev) -> float:
    """-sum(l log2 l) with 0 log 0 = 0; `ev` must already be nonnegative."""
    ev = np.asarray(ev, dtype=float)
    ev = ev[ev > 0]
    return max(float(-np.sum(ev * np.log2(ev))), 0.0)


def vn_entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    ev = _clamped(eig_hermitian(as_density(rho)))
    return entropy_of_spectrum(ev)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min()!r}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
    return entropy_of_spectrum(np.clip(p, 0.0, None))


def binary_entropy(q) -> float:
    return entropy_of_spectrum([q, 1.0 - q])


def sqrtm_psd(m, cutoff=0.0) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues at or below `cutoff` are treated as exact zeros.
    """
    w, v = eig_hermitian(m, vectors=True)
    w = _clamped(w, err=ValueError)
    w[w <= cutoff] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def batch_entropy(ev) -> np.ndarray:
    """Row-wise entropy of an array of nonnegative spectra (last axis)."""
    ev = np.clip(np.asarray(ev, dtype=float), 0.0, None)
    safe = np.where(ev > 0, ev, 1.0)
    return np.maximum(-np.sum(ev * np.log2(safe), axis=-1), 0.0)


PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
