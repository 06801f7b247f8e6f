import numpy as np
import pytest
from scipy import stats

from qmono.measures import tangle_ckw
from qmono.qmat import partial_trace, vn_entropy
from qmono.states import (
    GenWParams, SeededSampler, generalized_w, ghz, ghz_class, haar_random_pure, sample_genw,
    sample_ghzclass, sample_wclass, w_class, w_state,
)

from conftest import random_unitary

I011, I101, I110 = 0b011, 0b101, 0b110


def test_genw_substitution():
    a = generalized_w(GenWParams(np.pi / 4, np.pi / 4)).amps
    np.testing.assert_allclose(a[[I011, I101, I110]], [0.5, 0.5, 2**-0.5], atol=1e-15)
    assert np.count_nonzero(np.abs(a) > 1e-15) == 3


def test_genw_zero_amplitude():
    a = generalized_w(GenWParams(np.pi / 4, np.pi / 2)).amps
    assert abs(a[I011]) < 1e-15


@pytest.mark.parametrize("theta,phi", [(1e-6, 1e-6), (0.3, 2.0), (np.pi / 4, 2 * np.pi)])
def test_genw_normalized(theta, phi):
    a = generalized_w(GenWParams(theta, phi)).amps
    assert abs(np.vdot(a, a).real - 1) < 1e-12


@pytest.mark.parametrize("theta,phi", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, 7.0)])
def test_genw_out_of_range(theta, phi):
    with pytest.raises(ValueError):
        GenWParams(theta, phi)


def test_genw_is_bit_flipped_w_class():
    # X x X x X maps |011>,|101>,|110> onto |100>,|010>,|001>
    for i in range(20):
        p = sample_genw(SeededSampler(3, i))
        a = generalized_w(p).amps
        flipped = a[::-1]
        w = w_class(flipped[0b001], flipped[0b010], flipped[0b100], 0.0)
        np.testing.assert_allclose(w.amps, flipped, atol=1e-15)
        assert abs(tangle_ckw(generalized_w(p))) < 1e-8


def test_w_class_examples():
    s = 3**-0.5
    w = w_class(s, s, s, 0)
    np.testing.assert_allclose(w.amps, w_state().amps)
    np.testing.assert_allclose(w.amps[[1, 2, 4]], [s, s, s])
    prod = w_class(0, 0, 1, 0)
    assert prod.amps[0b100] == 1
    with pytest.raises(ValueError):
        w_class(1, 1, 0, 0)


def test_w_class_tangle_vanishes():
    for i in range(50):
        assert abs(tangle_ckw(sample_wclass(SeededSampler(8, i)))) < 1e-8


def test_ghz_class_examples():
    g = ghz_class(2**-0.5, 0, 0, 0, 2**-0.5)
    np.testing.assert_allclose(g.amps[[0, 7]], [2**-0.5] * 2)
    assert ghz_class(1, 0, 0, 0, 0).amps[0] == 1
    assert tangle_ckw(ghz()) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        ghz_class(1, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        ghz_class(-1, 0, 0, 0, 0)


def test_ghz_class_samples_normalized():
    for i in range(20):
        a = sample_ghzclass(SeededSampler(2, i)).amps
        assert abs(np.vdot(a, a).real - 1) < 1e-12


def test_haar_determinism():
    a = haar_random_pure(SeededSampler(42, 17), 3).amps
    b = haar_random_pure(SeededSampler(42, 17), 3).amps
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, haar_random_pure(SeededSampler(42, 18), 3).amps)
    assert abs(np.linalg.norm(a) - 1) < 1e-12
    with pytest.raises(ValueError):
        haar_random_pure(SeededSampler(0), 4)


def test_haar_two_qubit():
    psi = haar_random_pure(SeededSampler(1, 0), 2)
    assert psi.dims == (2, 2)


def test_haar_mean_marginal_purity():
    # E tr(rho_A^2) = (dA + dB) / (dA dB + 1) = 6/9 for dA = 2, dB = 4
    n = 100_000
    rng = np.random.Generator(np.random.PCG64(123))
    # same law as haar_random_pure, vectorized for speed; the sampler itself
    # is checked against the law on a smaller draw below
    z = rng.standard_normal((n, 8)) + 1j * rng.standard_normal((n, 8))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    m = z.reshape(n, 2, 4)
    ra = np.einsum("nia,nja->nij", m, m.conj())
    pur = np.einsum("nij,nji->n", ra, ra).real
    assert pur.mean() == pytest.approx(2 / 3, abs=0.01)

    own = [np.trace(partial_trace(haar_random_pure(SeededSampler(9, i), 3), [0]).data @
                    partial_trace(haar_random_pure(SeededSampler(9, i), 3), [0]).data).real
           for i in range(3000)]
    assert np.mean(own) == pytest.approx(2 / 3, abs=0.01)


def test_haar_local_unitary_invariance():
    n = 10_000
    crit = 1.628 * np.sqrt(2 / n)  # two-sample KS, alpha = 0.01
    u = random_unitary(np.random.default_rng(0), 2)
    U = np.kron(u, np.eye(4))
    pop_a, pop_b, ent_a, ent_b = [], [], [], []
    for i in range(n):
        a = haar_random_pure(SeededSampler(100, i), 3)
        b = haar_random_pure(SeededSampler(200, i), 3)
        ra = partial_trace(a, [0])
        rb = partial_trace(type(b)(U @ b.amps, b.dims), [0])
        pop_a.append(ra.data[0, 0].real)
        pop_b.append(rb.data[0, 0].real)
        ent_a.append(vn_entropy(ra))
        ent_b.append(vn_entropy(rb))
    assert stats.ks_2samp(ent_a, ent_b).statistic < crit
    assert stats.ks_2samp(pop_a, pop_b).statistic < crit


def test_genw_sampler():
    n = 10_000
    ps = [sample_genw(SeededSampler(7, i)) for i in range(n)]
    th = np.array([p.theta for p in ps])
    ph = np.array([p.phi for p in ps])
    assert th.min() > 0 and th.max() <= np.pi / 4
    assert ph.min() > 0 and ph.max() <= 2 * np.pi
    se = (np.pi / 4) / np.sqrt(12 * n)
    assert abs(th.mean() - np.pi / 8) < 3 * se
    assert sample_genw(SeededSampler(7, 5)) == ps[5]
