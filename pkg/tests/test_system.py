import numpy as np
import pytest

from eqfilter import lie
from eqfilter.lie import GroupElement
from eqfilter.system import (
    LandmarkSet,
    SE2Localisation,
    check_lift_equivariance,
    check_lift_projection,
    check_system_equivariance,
    dynamics,
    output,
    output_jacobian,
    phi,
    psi,
)

from conftest import random_pose


def test_output_example():
    y = output(GroupElement.make(np.pi / 2, (1, 0)), LandmarkSet([[1, 1]]))
    np.testing.assert_allclose(y, [1, 0], atol=1e-15)


def test_output_against_matrix_form(rng):
    landmarks = LandmarkSet(rng.normal(size=(4, 2)))
    P = random_pose(rng)
    expected = []
    for p in landmarks.points:
        expected.extend((np.linalg.inv(P.as_matrix()) @ [p[0], p[1], 1.0])[:2])
    np.testing.assert_allclose(output(P, landmarks), expected, atol=1e-13)


def test_output_is_invariant_to_landmark_frame(rng):
    # moving robot and landmarks together leaves the measurement unchanged
    landmarks = rng.normal(size=(3, 2))
    P, G = random_pose(rng), random_pose(rng)
    moved = landmarks @ G.R.T + G.x
    np.testing.assert_allclose(
        output(P, LandmarkSet(landmarks)),
        output(lie.compose(G, P), LandmarkSet(moved)),
        atol=1e-12,
    )


def test_phi_is_right_multiplication():
    P = GroupElement.make(0.5, (1.0, 2.0))
    X = GroupElement.make(-0.2, (0.3, 0.0))
    np.testing.assert_allclose(phi(X, P).as_matrix(), P.as_matrix() @ X.as_matrix(), atol=1e-15)


def test_psi_matches_conjugation(rng):
    X = random_pose(rng)
    u = rng.normal(size=3)
    Xm = X.as_matrix()
    expected = lie.vee(np.linalg.inv(Xm) @ lie.wedge(u) @ Xm)
    np.testing.assert_allclose(psi(X, u), expected, atol=1e-13)


def test_dynamics_integrate_like_matrix_euler():
    # fine Euler on dP/dt = P U against the body-form velocity
    P0 = GroupElement.make(0.0, (0.7, 0.5))
    u = np.array([0.4, 0.5, 0.0])
    T, n = 1.0, 200000
    P = P0.as_matrix()
    U = lie.wedge(dynamics(P0, u).body)
    for _ in range(n):
        P = P + (T / n) * P @ U
    closed = lie.compose(P0, lie.exp(T * u)).as_matrix()
    np.testing.assert_allclose(P, closed, atol=1e-5)


def test_landmark_set_validation():
    with pytest.raises(ValueError):
        LandmarkSet(np.zeros((0, 2)))
    assert LandmarkSet([1, 2, 3, 4]).points.shape == (2, 2)


def test_output_jacobian_against_fd(rng):
    system = SE2Localisation(rng.normal(size=(3, 2)))
    for _ in range(10):
        P = random_pose(rng)
        fd = lie.numerical_differential(
            lambda b: system.output(system.perturb(P, b)), np.zeros(3)
        )
        np.testing.assert_allclose(output_jacobian(P, system.landmarks), fd, atol=1e-8)


def test_output_jacobian_at_landmark_has_zero_rotation_column():
    P = GroupElement.make(0.4, (1.0, -1.0))
    jac = output_jacobian(P, LandmarkSet([[1.0, -1.0]]))
    np.testing.assert_array_equal(jac[:, 0], [0, 0])
    np.testing.assert_array_equal(jac[:, 1:], -np.eye(2))


def test_action_differential_closed_form_matches_generic(rng):
    system = SE2Localisation([[0.0, 0.0]])
    X, P = random_pose(rng), random_pose(rng)
    generic = system.map_differential(lambda z: system.phi(X, z), P)
    np.testing.assert_allclose(system.action_differential(X, P), generic, atol=1e-8)


def test_equivariance_residuals(rng):
    for _ in range(20):
        X, P = random_pose(rng), random_pose(rng)
        u = rng.normal(size=3)
        assert check_system_equivariance(X, P, u) < 1e-6
        assert check_lift_equivariance(X, P, u) < 1e-12
        assert check_lift_projection(P, u) < 1e-12


def test_equivariance_detects_broken_psi(rng):
    class Broken(SE2Localisation):
        def psi(self, X, u):
            return np.asarray(u)

    system = Broken([[0.0, 0.0]])
    X = GroupElement.make(1.0, (2.0, -1.0))
    P = random_pose(rng)
    u = np.array([0.5, 1.0, 0.0])
    assert check_system_equivariance(X, P, u, system) > 1e-3


def test_two_sided_system_is_equivariant(two_sided, rng):
    for _ in range(10):
        X, P = random_pose(rng), random_pose(rng)
        u = rng.normal(size=6)
        assert check_system_equivariance(X, P, u, two_sided) < 1e-6
        assert check_lift_equivariance(X, P, u, two_sided) < 1e-12


def test_single_precision_output_dtype():
    P = GroupElement.make(0.1, (1.0, 2.0), np.float32)
    assert output(P, LandmarkSet([[3.0, 4.0]])).dtype == np.float32
