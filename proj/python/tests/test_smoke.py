import math

import numpy as np
import pytest

import jumpresp as jr


def test_lyapunov_and_expm():
    L = np.array([[2.0, 0.5], [-0.5, 1.0]])
    Q = np.eye(2)
    C = jr.solve_lyapunov(L, Q)
    assert np.allclose(L @ C + C @ L.T, Q, atol=1e-12)
    E = jr.matrix_exponential(np.array([[0.0, 1.0], [0.0, 0.0]]), 3.0)
    assert np.allclose(E, np.array([[1.0, 3.0], [0.0, 1.0]]), rtol=0.0, atol=1e-14)


def test_oracle_deterministic_shift():
    ou = jr.OUParams(np.array([[2.0]]), np.array([[2.0]]))
    curve = jr.ou_mean_response_det(ou, jr.AffineJumpMap.shift(np.array([1.0])), [0.0, 0.5])
    assert curve.values[1, 0] == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_jump_integral_closed_form_matches_quadrature():
    p0 = jr.GaussianDensity(np.zeros(1), np.eye(1))
    jump = jr.AffineJumpMap(np.array([0.1]), np.array([[0.2]]), np.array([[1.0]]))
    nu = jr.GaussianDensity(np.array([0.3]), np.array([[0.4]]))
    J = jr.JumpIntegral(p0, jump, nu)
    x = np.array([0.7])
    assert J(x) == pytest.approx(J.quadrature(x, 80), rel=1e-10)


def test_estimator_recovers_ou_response():
    traj = jr.simulate_ou_exact(np.array([[2.0]]), np.array([[2.0]]), np.zeros(1), 0.05, 100000, 3)
    assert traj.states.shape == (100001, 1)
    p0 = jr.GaussianDensity(np.zeros(1), np.eye(1))
    curve = jr.det_jump_response(traj, p0, jr.AffineJumpMap.shift(np.array([1.0])), jr.TestFunction.identity(),
                                 [0.0, 0.5])
    for k, lag in enumerate(curve.lags):
        assert abs(curve.values[k, 0] - math.exp(-2.0 * lag)) < 4.0 * curve.std_error[k, 0] + 1e-3


def test_monte_carlo_identity_jump_is_zero():
    cfg = jr.EnsembleConfig()
    cfg.members = 50
    cfg.dt = 0.01
    cfg.horizon = 0.5
    cfg.output_stride = 10
    model = jr.ModelSpec.double_well(0.7)
    curve = jr.mc_det_jump_response(model, jr.AffineJumpMap.shift(np.zeros(1)), jr.TestFunction.identity(), cfg)
    assert np.all(curve.values == 0.0)


def test_errors_map_to_python_exceptions():
    with pytest.raises(jr.ValidationError):
        jr.GaussianDensity(np.zeros(1), -np.eye(1))
    with pytest.raises(ValueError):
        jr.accuracy_diagnostic(0.0, 1.0)
    assert jr.accuracy_diagnostic(0.05, 0.5) == (pytest.approx(0.025), "ok")


def test_cli_in_process():
    code, out, log = jr.run_cli(["compare"])
    assert code == 2
    assert "curves" in log
