"""State families: generalized W, W-class, GHZ-class, Haar-random.

Random draws are counter-based: sample ``i`` of a stream depends only on
``(seed, i)``, so any partition of the index range across workers reproduces
the serial result.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .qmat import DensityMatrix, PureState

PRNG_NAME = "numpy PCG64 seeded by SeedSequence(entropy=seed, spawn_key=(stream, index))"
GENW_LAW = "theta ~ U(0, pi/4], phi ~ U(0, 2pi] independent"
HAAR_LAW = "Haar: normalized i.i.d. standard complex Gaussian amplitudes"

# stream tags keep different families independent under the same seed
_STREAMS = {"haar": 1, "genw": 2, "wclass": 3, "ghzclass": 4, "dm": 5, "basis": 6}


@dataclass(frozen=True)
class SeededSampler:
    seed: int
    counter: int = 0

    def rng(self, stream: str) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(_STREAMS[stream], int(self.counter)),
        )
        return np.random.Generator(np.random.PCG64(ss))

    def at(self, counter: int) -> "SeededSampler":
        return SeededSampler(self.seed, counter)


@dataclass(frozen=True)
class GenWParams:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 < self.theta <= pi / 4 + 1e-15:
            raise ValueError(f"theta must lie in (0, pi/4], got {self.theta!r}")
        if not 0.0 < self.phi <= 2 * pi + 1e-15:
            raise ValueError(f"phi must lie in (0, 2pi], got {self.phi!r}")


def _ket(bits: str) -> int:
    return int(bits, 2)


def generalized_w(p: GenWParams) -> PureState:
    """sin(t)cos(f)|011> + sin(t)sin(f)|101> + cos(t)|110>."""
    if not isinstance(p, GenWParams):
        p = GenWParams(*p)
    a = np.zeros(8, dtype=complex)
    a[_ket("011")] = np.sin(p.theta) * np.cos(p.phi)
    a[_ket("101")] = np.sin(p.theta) * np.sin(p.phi)
    a[_ket("110")] = np.cos(p.theta)
    return PureState(a / np.linalg.norm(a), (2, 2, 2))


def w_class(a, b, c, d=0.0) -> PureState:
    """a|001> + b|010> + c|100> + d|000>."""
    coeffs = np.array([a, b, c, d], dtype=complex)
    norm = np.sum(np.abs(coeffs) ** 2)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"W-class coefficients have norm^2 {norm!r}, expected 1")
    amps = np.zeros(8, dtype=complex)
    amps[_ket("001")], amps[_ket("010")], amps[_ket("100")], amps[_ket("000")] = coeffs
    return PureState(amps / np.sqrt(norm), (2, 2, 2))


def ghz_class(l0, l1, l2, l3, l4, phase=0.0) -> PureState:
    """Five-term canonical form l0|000> + l1 e^{i phase}|100> + l2|101> + l3|110> + l4|111>."""
    lam = np.array([l0, l1, l2, l3, l4], dtype=float)
    if lam.min() < 0:
        raise ValueError("GHZ-class coefficients must be nonnegative")
    norm = np.sum(lam**2)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"GHZ-class coefficients have norm^2 {norm!r}, expected 1")
    amps = np.zeros(8, dtype=complex)
    amps[_ket("000")] = lam[0]
    amps[_ket("100")] = lam[1] * np.exp(1j * phase)
    amps[_ket("101")] = lam[2]
    amps[_ket("110")] = lam[3]
    amps[_ket("111")] = lam[4]
    return PureState(amps / np.sqrt(norm), (2, 2, 2))


def ghz() -> PureState:
    return ghz_class(2**-0.5, 0, 0, 0, 2**-0.5)


def w_state() -> PureState:
    s = 3**-0.5
    return w_class(s, s, s, 0.0)


def bell() -> PureState:
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def product(*kets) -> PureState:
    """Tensor product of single-party kets (unnormalized input allowed)."""
    amps = np.array([1.0 + 0j])
    dims = []
    for k in kets:
        k = np.asarray(k, dtype=complex)
        k = k / np.linalg.norm(k)
        amps = np.kron(amps, k)
        dims.append(k.size)
    return PureState(amps, tuple(dims))


def haar_random_pure(s: SeededSampler, n_qubits: int = 3) -> PureState:
    if n_qubits not in (2, 3):
        raise ValueError(f"n_qubits must be 2 or 3, got {n_qubits}")
    rng = s.rng("haar")
    d = 2**n_qubits
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState.from_unnormalized(z, (2,) * n_qubits)


def sample_genw(s: SeededSampler) -> GenWParams:
    u = s.rng("genw").random(2)  # [0, 1)
    return GenWParams(theta=(1.0 - u[0]) * pi / 4, phi=(1.0 - u[1]) * 2 * pi)


def sample_wclass(s: SeededSampler) -> PureState:
    rng = s.rng("wclass")
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    z /= np.linalg.norm(z)
    return w_class(*z)


def sample_ghzclass(s: SeededSampler) -> PureState:
    rng = s.rng("ghzclass")
    lam = np.abs(rng.standard_normal(5))
    lam /= np.linalg.norm(lam)
    return ghz_class(*lam, phase=rng.uniform(0, 2 * pi))


def random_density_matrix(s: SeededSampler, dims=(2, 2)) -> DensityMatrix:
    """Full-rank Ginibre (Hilbert-Schmidt) random mixed state."""
    rng = s.rng("dm")
    d = int(np.prod(dims))
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, tuple(dims))


FAMILIES = {
    "genw": lambda s: generalized_w(sample_genw(s)),
    "haar3": lambda s: haar_random_pure(s, 3),
    "wclass": sample_wclass,
    "ghzclass": sample_ghzclass,
}

FAMILY_LAWS = {
    "genw": GENW_LAW,
    "haar3": HAAR_LAW,
    "wclass": "W-class a|001>+b|010>+c|100>+d|000>, (a,b,c,d) normalized complex Gaussian",
    "ghzclass": "GHZ-class canonical form, |l_i| normalized half-Gaussian, phase ~ U[0, 2pi)",
}
