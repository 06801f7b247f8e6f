import numpy as np
import pytest

from qmono.measures import FORWARD, QubitMeasurement, one_way_deficit
from qmono.optimizer import (
    MeasurementBasis, OptimizerConfig, basis_grid, minimize_over_basis, normalize_angles,
)
from qmono.states import SeededSampler, bell, random_density_matrix


def test_constant_objective():
    r = minimize_over_basis(lambda t, p: 0.0 * t + 3.25)
    assert r.value == 3.25


def test_cos_squared():
    r = minimize_over_basis(lambda t, p: np.cos(t) ** 2)
    assert r.value < 1e-9
    assert r.arg.t == pytest.approx(np.pi / 2, abs=1e-4)


def test_bell_discord_objective_is_flat():
    k = QubitMeasurement(bell(), 1)
    T, P = basis_grid(OptimizerConfig())
    np.testing.assert_allclose(k.conditional_entropy(T, P), 0.0, atol=1e-12)
    r = minimize_over_basis(k.conditional_entropy)
    assert k.s_measured - k.s_joint + r.value == pytest.approx(1.0, abs=1e-6)


def test_non_vectorized_matches():
    f = lambda t, p: (np.sin(t) * np.cos(p) - 0.3) ** 2 + np.cos(t) ** 2
    a = minimize_over_basis(f)
    b = minimize_over_basis(lambda t, p: float(f(t, p)), vectorized=False)
    assert a.value == pytest.approx(b.value, abs=1e-12)


def test_refinement_never_regresses(random_two_qubit):
    cfg = OptimizerConfig()
    T, P = basis_grid(cfg)
    for rho in random_two_qubit:
        k = QubitMeasurement(rho, 0)
        r = minimize_over_basis(k.dephased_entropy, cfg)
        assert r.value <= k.dephased_entropy(T, P).min()
        assert r.converged


def test_deterministic(random_two_qubit):
    k = QubitMeasurement(random_two_qubit[0], 1)
    a = minimize_over_basis(k.dephased_entropy, scalar=k.scalar("dephased"))
    b = minimize_over_basis(k.dephased_entropy, scalar=k.scalar("dephased"))
    assert a == b


def test_iteration_cap_flags_non_convergence(random_two_qubit):
    k = QubitMeasurement(random_two_qubit[1], 0)
    r = minimize_over_basis(k.dephased_entropy, OptimizerConfig(max_iters=2))
    assert not r.converged
    assert np.isfinite(r.value)


def test_grid_doubling_is_stable():
    coarse = OptimizerConfig()
    fine = OptimizerConfig(grid_t=48, grid_p=96)
    for i in range(10):
        rho = random_density_matrix(SeededSampler(2024, i), (2, 2))
        a = one_way_deficit(rho, FORWARD, cfg=coarse).value
        b = one_way_deficit(rho, FORWARD, cfg=fine).value
        assert abs(a - b) <= 5e-5


@pytest.mark.parametrize("kw", [dict(grid_t=4), dict(grid_p=8), dict(refine_tol=1e-3),
                                dict(refine_tol=0), dict(max_iters=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        OptimizerConfig(**kw)


def test_angle_normalization_keeps_projector():
    for t, p in [(-0.4, 1.0), (4.0, 6.0), (7.5, -3.0), (np.pi, 0.0)]:
        tn, pn = normalize_angles(t, p)
        assert 0 <= tn <= np.pi and 0 <= pn < 2 * np.pi
        raw = np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
        np.testing.assert_allclose(MeasurementBasis(tn, pn).bloch(), raw, atol=1e-12)


def test_basis_projectors():
    b = MeasurementBasis(1.1, 4.2)
    p0, p1 = b.projectors()
    np.testing.assert_allclose(p0 + p1, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(p0 @ p0, p0, atol=1e-15)
    np.testing.assert_allclose(p1 @ p1, p1, atol=1e-15)
