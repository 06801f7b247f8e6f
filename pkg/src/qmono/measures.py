"""Bipartite correlation measures on few-qubit states.

Measurements are rank-1 projective measurements on a single qubit. Discord and
the one-way work deficit are minimized over the measured qubit's basis with
:func:`qmono.optimizer.minimize_over_basis`; every optimized value carries the
basis that achieved it.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from math import prod

import numpy as np

from . import qmat
from .optimizer import DEFAULT_CONFIG, MeasurementBasis, OptimizerConfig, minimize_over_basis
from .qmat import DensityMatrix, PureState, as_density, partial_trace, vn_entropy

ZERO_CLAMP = 1e-6

FORWARD = "forward"
BACKWARD = "backward"
DEFICIT_KINDS = (FORWARD, BACKWARD)


class OptimizerFailure(ArithmeticError):
    """An optimized measure came out clearly negative."""


@dataclass(frozen=True)
class MeasurementOutcome:
    probs: np.ndarray
    conditionals: tuple
    dephased: DensityMatrix


@dataclass(frozen=True)
class MeasureValue:
    value: float
    basis: MeasurementBasis | None = None
    converged: bool = True
    evals: int = 0

    def __float__(self):
        return float(self.value)


def _clamp(value, what):
    if value < -ZERO_CLAMP:
        raise OptimizerFailure(f"{what} evaluated to {value!r} < -{ZERO_CLAMP}")
    return max(float(value), 0.0)


def _front(rho: DensityMatrix, party: int):
    """Reorder subsystems so `party` comes first; returns (R, perm, dims).

    R has shape (2, D, 2, D) with R[j, :, k, :] = <j|rho|k> on `party`.
    """
    n = len(rho.dims)
    if not 0 <= party < n:
        raise ValueError(f"party {party} out of range for {n} subsystems")
    if rho.dims[party] != 2:
        raise ValueError(f"party {party} has dimension {rho.dims[party]}, expected a qubit")
    perm = [party] + [i for i in range(n) if i != party]
    dims = rho.dims
    t = rho.data.reshape(dims + dims).transpose(perm + [n + q for q in perm])
    D = prod(dims) // 2
    return t.reshape(2, D, 2, D), perm, dims


def measure_qubit(rho, party: int, basis: MeasurementBasis) -> MeasurementOutcome:
    """Measure qubit `party` of `rho` in `basis`.

    Conditionals are the normalized states of the remaining subsystems (in
    their original order); ``dephased`` is sum_i (P_i x I) rho (P_i x I).
    """
    rho = as_density(rho)
    R, perm, dims = _front(rho, party)
    D = R.shape[1]
    rest_dims = tuple(dims[q] for q in perm[1:])
    n = len(dims)

    probs, conds = [], []
    deph = np.zeros((2 * D, 2 * D), dtype=complex)
    for v in basis.vectors():
        c = np.einsum("j,jakb,k->ab", v.conj(), R, v)
        pi_ = float(np.trace(c).real)
        probs.append(max(pi_, 0.0))
        deph += np.kron(np.outer(v, v.conj()), c)
        if pi_ > 1e-14:
            conds.append(DensityMatrix(c / pi_, rest_dims))
        else:
            conds.append(DensityMatrix(np.eye(D) / D, rest_dims))

    inv = np.argsort(perm)
    pdims = tuple(dims[q] for q in perm)
    t = deph.reshape(pdims + pdims).transpose(list(inv) + [n + q for q in inv])
    deph = t.reshape(2 * D, 2 * D)
    probs = np.array(probs)
    probs = probs / probs.sum()
    return MeasurementOutcome(probs, tuple(conds), DensityMatrix(deph, dims))


class QubitMeasurement:
    """Batched evaluation of measurement statistics on one qubit of `rho`.

    With n the Bloch vector of the basis, the unnormalized conditional states
    are (rho_rest +/- sum_k n_k G_k) / 2, where G_k = tr_party[(sigma_k x I) rho].
    """

    def __init__(self, rho, party: int):
        rho = as_density(rho)
        R, _, _ = _front(rho, party)
        self.D = R.shape[1]
        sig = qmat.PAULI
        # G[0] is the reduced state of the unmeasured subsystems
        self.G = np.einsum("sjl,lajb->sab", sig, R)
        self.s_joint = vn_entropy(rho)
        self.s_measured = vn_entropy(partial_trace(rho, [party]))
        if self.D == 2:
            G = self.G
            self._coef = [(0.5 * G[s, 0, 0].real, 0.5 * G[s, 1, 1].real, complex(0.5 * G[s, 0, 1]))
                          for s in range(4)]

    def spectra(self, t, p):
        """Eigenvalues of p_i * conditional_i, shape (..., 2, D), and probs (..., 2)."""
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        st = np.sin(t)
        n = (st * np.cos(p), st * np.sin(p), np.cos(t))
        G = self.G
        half = 0.5 * G[0]
        odd = 0.5 * (n[0][..., None, None] * G[1] + n[1][..., None, None] * G[2]
                     + n[2][..., None, None] * G[3])
        c0 = half + odd
        c1 = half - odd
        c = np.stack([c0, c1], axis=-3)
        if self.D == 2:
            a = c[..., 0, 0].real
            d = c[..., 1, 1].real
            mean = 0.5 * (a + d)
            r = np.sqrt(0.25 * (a - d) ** 2 + np.abs(c[..., 0, 1]) ** 2)
            ev = np.stack([mean + r, mean - r], axis=-1)
        else:
            ev = np.linalg.eigvalsh(c)
        probs = np.trace(c, axis1=-2, axis2=-1).real
        return np.clip(ev, 0.0, None), np.clip(probs, 0.0, None)

    def dephased_entropy(self, t, p):
        ev, _ = self.spectra(t, p)
        return qmat.batch_entropy(ev.reshape(ev.shape[:-2] + (-1,)))

    def conditional_entropy(self, t, p):
        """sum_i p_i S(conditional_i) = S(dephased) - H(p)."""
        ev, probs = self.spectra(t, p)
        return qmat.batch_entropy(ev.reshape(ev.shape[:-2] + (-1,))) - qmat.batch_entropy(probs)

    def _point(self, t, p):
        """(S(dephased), H(p)) at one basis; two-qubit case only, plain floats."""
        st = math.sin(t)
        n1, n2, n3 = st * math.cos(p), st * math.sin(p), math.cos(t)
        (a0, d0, b0), (a1, d1, b1), (a2, d2, b2), (a3, d3, b3) = self._coef
        a = n1 * a1 + n2 * a2 + n3 * a3
        d = n1 * d1 + n2 * d2 + n3 * d3
        b = n1 * b1 + n2 * b2 + n3 * b3
        s_deph = 0.0
        s_prob = 0.0
        for sign in (1.0, -1.0):
            aa, dd, bb = a0 + sign * a, d0 + sign * d, b0 + sign * b
            mean = 0.5 * (aa + dd)
            r = math.sqrt(0.25 * (aa - dd) ** 2 + bb.real**2 + bb.imag**2)
            for lam in (mean + r, mean - r):
                if lam > 0:
                    s_deph -= lam * math.log2(lam)
            pr = aa + dd
            if pr > 0:
                s_prob -= pr * math.log2(pr)
        return s_deph, s_prob

    def dephased_entropy_at(self, t, p):
        return self._point(t, p)[0]

    def conditional_entropy_at(self, t, p):
        sd, sp = self._point(t, p)
        return sd - sp

    def scalar(self, which):
        """Plain-float twin of ``dephased_entropy``/``conditional_entropy`` (None if D > 2)."""
        if self.D != 2:
            return None
        return self.dephased_entropy_at if which == "dephased" else self.conditional_entropy_at


def _bipartite(rho, split):
    """Reduce `rho` to the parties in `split` and regroup into two parties.

    Returns (DensityMatrix with dims (dA, dB), (A indices, B indices)).
    """
    rho = as_density(rho)
    if split is None:
        if len(rho.dims) != 2:
            raise ValueError("split is required for states with more than two subsystems")
        return rho, ((0,), (1,))
    a, b = (tuple(int(i) for i in g) for g in split)
    if not a or not b or set(a) & set(b):
        raise ValueError(f"invalid bipartition {split}")
    keep = sorted(a + b)
    red = partial_trace(rho, keep) if len(keep) < len(rho.dims) else rho
    pos = {q: i for i, q in enumerate(keep)}
    order = [pos[q] for q in a] + [pos[q] for q in b]
    n = len(keep)
    dims = red.dims
    m = red.data.reshape(dims + dims).transpose(order + [n + q for q in order])
    da = prod(dims[q] for q in order[: len(a)])
    db = prod(dims[q] for q in order[len(a):])
    return DensityMatrix(m.reshape(da * db, da * db), (da, db)), (a, b)


def discord_functional(rho, measured: int, basis: MeasurementBasis) -> float:
    """S(rho_measured) - S(rho) + sum_i p_i S(conditional_i) at a fixed basis."""
    rho = as_density(rho)
    out = measure_qubit(rho, measured, basis)
    cond = sum(p * vn_entropy(c) for p, c in zip(out.probs, out.conditionals))
    return vn_entropy(partial_trace(rho, [measured])) - vn_entropy(rho) + cond


def deficit_functional(rho, measured: int, basis: MeasurementBasis) -> float:
    """S(dephased) - S(rho) at a fixed basis."""
    rho = as_density(rho)
    out = measure_qubit(rho, measured, basis)
    return vn_entropy(out.dephased) - vn_entropy(rho)


def discord(rho, measured: int = 1, split=None, cfg: OptimizerConfig = DEFAULT_CONFIG) -> MeasureValue:
    """Quantum discord with the measurement on party `measured` (0 or 1 of `split`)."""
    bip, _ = _bipartite(rho, split)
    if measured not in (0, 1):
        raise ValueError("measured must be 0 or 1 (position within the bipartition)")
    if bip.dims[measured] != 2:
        raise ValueError("the measured side of the bipartition must be a single qubit")
    k = QubitMeasurement(bip, measured)
    res = minimize_over_basis(k.conditional_entropy, cfg, scalar=k.scalar("conditional"))
    val = k.s_measured - k.s_joint + res.value
    return MeasureValue(_clamp(val, "discord"), res.arg, res.converged, res.evals)


def one_way_deficit(rho, kind: str = FORWARD, split=None,
                    cfg: OptimizerConfig = DEFAULT_CONFIG) -> MeasureValue:
    """One-way work deficit: min over bases of S(dephased) - S(rho).

    ``forward`` measures the first side of `split`, ``backward`` the second.
    For a :class:`PureState` the minimum is the marginal entropy of either
    side, attained in the Schmidt basis, and is returned in closed form; this
    also covers a measured side larger than one qubit.
    """
    if kind not in DEFICIT_KINDS:
        raise ValueError(f"kind must be one of {DEFICIT_KINDS}, got {kind!r}")
    side = 0 if kind == FORWARD else 1
    pure_input = isinstance(rho, PureState) and (
        split is None or len(tuple(split[0])) + len(tuple(split[1])) == len(rho.dims))
    bip, _ = _bipartite(rho, split)
    if pure_input:
        return MeasureValue(vn_entropy(partial_trace(bip, [side])))
    if bip.dims[side] != 2:
        raise ValueError("the measured side of the bipartition must be a single qubit")
    k = QubitMeasurement(bip, side)
    res = minimize_over_basis(k.dephased_entropy, cfg, scalar=k.scalar("dephased"))
    val = res.value - k.s_joint
    return MeasureValue(_clamp(val, "work deficit"), res.arg, res.converged, res.evals)


_SYSY = np.kron(qmat.PAULI[2], qmat.PAULI[2])
RANK_CUTOFF = 1e-14  # eigenvalues of rho below this are roundoff


def _two_qubit(rho) -> DensityMatrix:
    rho = as_density(rho)
    if rho.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
    return rho


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state.

    The spin-flip values are the singular values of sqrt(rho) Y sqrt(rho)^*,
    Y = sigma_y x sigma_y, which avoids square-rooting tiny eigenvalues of
    rho * rho_tilde.
    """
    rho = _two_qubit(rho).data
    sq = qmat.sqrtm_psd(rho, cutoff=RANK_CUTOFF)
    lam = np.linalg.svd(sq @ _SYSY @ sq.conj(), compute_uv=False)
    return float(min(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]), 1.0))


def eof_from_concurrence(c) -> float:
    return qmat.binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))


def eof_two_qubit(rho) -> float:
    """Entanglement of formation (bits) of a two-qubit state."""
    return eof_from_concurrence(concurrence(rho))


def _three_qubit_pure(psi) -> PureState:
    if isinstance(psi, DensityMatrix):
        if not psi.is_pure(1e-8):
            raise ValueError("expected a pure state")
        w, v = qmat.eig_hermitian(psi.data, vectors=True)
        psi = PureState.from_unnormalized(v[:, 0], psi.dims)
    if not isinstance(psi, PureState) or psi.dims != (2, 2, 2):
        raise ValueError("expected a three-qubit pure state")
    return psi


def tangle_ckw(psi, nodal: int = 0) -> float:
    """4 det(rho_nodal) - C^2(nodal, j) - C^2(nodal, k)."""
    psi = _three_qubit_pure(psi)
    others = [i for i in range(3) if i != nodal]
    rn = partial_trace(psi, [nodal]).data
    total = 4.0 * np.linalg.det(rn).real
    for j in others:
        total -= concurrence(partial_trace(psi, sorted([nodal, j]))) ** 2
    return float(total)


def kw_residual(psi, cfg: OptimizerConfig = DEFAULT_CONFIG) -> float:
    """E^f(rho_AB) minus the least average entanglement left in AB after measuring C.

    Measuring C on a pure ABC state leaves pure AB states whose entanglement
    entropy equals the entropy of the conditional A state, so the minimization
    runs on rho_AC with C measured.
    """
    psi = _three_qubit_pure(psi)
    ef = eof_two_qubit(partial_trace(psi, [0, 1]))
    k = QubitMeasurement(partial_trace(psi, [0, 2]), 1)
    res = minimize_over_basis(k.conditional_entropy, cfg, scalar=k.scalar("conditional"))
    return float(ef - res.value)
