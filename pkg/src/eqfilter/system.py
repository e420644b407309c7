"""Equivariant systems and the SE(2) landmark localisation instance.

Tangent vectors are carried in body form: ``TangentVector(base, body)``
stands for ``d/ds phi(exp(s * body), base)`` at ``s = 0``. That is a
canonical representation whenever the state action is free and transitive,
which is the only case handled here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lie
from .lie import GroupElement

# States of the localisation system are robot poses in SE(2).
SystemState = GroupElement


@dataclass(frozen=True)
class TangentVector:
    base: SystemState
    body: np.ndarray


@dataclass(frozen=True, eq=False)
class LandmarkSet:
    """Ordered planar landmark positions, shape ``(n, 2)``."""

    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points)
        if points.dtype.kind != "f":
            points = points.astype(np.float64)
        points = points.reshape(-1, 2)
        if len(points) < 1:
            raise ValueError("a landmark set needs at least one point")
        object.__setattr__(self, "points", points)

    def __len__(self):
        return len(self.points)

    def astype(self, dtype) -> "LandmarkSet":
        return LandmarkSet(self.points.astype(dtype))


class EquivariantSystem:
    """A system on a homogeneous space with a symmetry ``(phi, psi)`` and lift.

    Subclasses provide the actions, the lift and the output. The differential
    hooks default to central differences and may be overridden with closed
    forms.
    """

    state_dim = 3

    def phi(self, X: GroupElement, xi):
        raise NotImplementedError

    def psi(self, X: GroupElement, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lift(self, xi, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def output(self, xi) -> np.ndarray:
        raise NotImplementedError

    def relative(self, base, xi) -> GroupElement:
        """The unique ``W`` with ``phi(W, base) == xi``."""
        raise NotImplementedError

    # body-form coordinates around a base point

    def perturb(self, base, body: np.ndarray):
        return self.phi(lie.exp(body), base)

    def body_coordinates(self, base, xi) -> np.ndarray:
        return lie.log(self.relative(base, xi))

    def dynamics(self, xi, u: np.ndarray) -> TangentVector:
        # the lift projects onto the dynamics, so in body form f_u(xi) = lift
        return TangentVector(xi, self.lift(xi, u))

    def map_differential(self, fn, xi) -> np.ndarray:
        """Body-form differential at ``xi`` of a map from states to states."""
        image = fn(xi)
        return lie.numerical_differential(
            lambda b: self.body_coordinates(image, fn(self.perturb(xi, b))),
            np.zeros(self.state_dim),
        )

    def action_differential(self, X: GroupElement, xi) -> np.ndarray:
        """Body-form matrix of ``D phi_X`` at ``xi``."""
        return self.map_differential(lambda z: self.phi(X, z), xi)

    def output_differential(self, xi) -> np.ndarray:
        """Body-form matrix of ``D h`` at ``xi``."""
        return lie.numerical_differential(
            lambda b: self.output(self.perturb(xi, b)), np.zeros(self.state_dim)
        )

    def lift_state_differential(self, chart, u: np.ndarray) -> np.ndarray:
        """``D_zeta Lambda(zeta, u)`` at the chart origin, composed with ``D chart^-1``."""
        return lie.numerical_differential(
            lambda x: self.lift(chart.inverse(x), u), np.zeros(self.state_dim)
        )


class SE2Localisation(EquivariantSystem):
    """Planar robot measuring known landmarks in its body frame.

    ``phi(X, P) = P X``, ``psi(X, U) = X^-1 U X`` and the lift is the
    input itself.
    """

    def __init__(self, landmarks: LandmarkSet):
        if not isinstance(landmarks, LandmarkSet):
            landmarks = LandmarkSet(landmarks)
        self.landmarks = landmarks

    @property
    def output_dim(self) -> int:
        return 2 * len(self.landmarks)

    def phi(self, X, xi):
        return phi(X, xi)

    def psi(self, X, u):
        return psi(X, u)

    def lift(self, xi, u):
        return lift(xi, u)

    def output(self, xi):
        return output(xi, self.landmarks)

    def relative(self, base, xi):
        return lie.compose(lie.inverse(base), xi)

    def action_differential(self, X, xi):
        # P exp(s b) X = P X exp(s Ad_{X^-1} b)
        return lie.adjoint_matrix(lie.inverse(X))

    def output_differential(self, xi):
        return output_jacobian(xi, self.landmarks)

    def lift_state_differential(self, chart, u):
        # the lift does not depend on the state
        u = np.asarray(u)
        return np.zeros((3, 3), dtype=u.dtype)


def phi(X: GroupElement, xi: SystemState) -> SystemState:
    return lie.compose(xi, X)


def psi(X: GroupElement, u) -> np.ndarray:
    return lie.adjoint_matrix(lie.inverse(X)) @ np.asarray(u)


def lift(xi: SystemState, u) -> np.ndarray:
    return np.asarray(u)


def dynamics(xi: SystemState, u) -> TangentVector:
    """``f_U(P) = P U`` in body form."""
    return TangentVector(xi, np.asarray(u))


def output(xi: SystemState, landmarks: LandmarkSet) -> np.ndarray:
    """Landmark positions expressed in the robot frame, stacked in order."""
    rel = landmarks.points.astype(xi.dtype, copy=False) - xi.x
    return (rel @ xi.R).reshape(-1)


def output_jacobian(xi: SystemState, landmarks: LandmarkSet) -> np.ndarray:
    """Body-form Jacobian of :func:`output` at ``xi``, shape ``(2n, 3)``."""
    y = output(xi, landmarks).reshape(-1, 2)
    n = len(y)
    jac = np.zeros((2 * n, 3), dtype=xi.dtype)
    jac[0::2, 0] = y[:, 1]
    jac[1::2, 0] = -y[:, 0]
    jac[0::2, 1] = -1
    jac[1::2, 2] = -1
    return jac


def check_system_equivariance(
    X: GroupElement, xi: SystemState, u, system: EquivariantSystem | None = None
) -> float:
    """Residual of ``D phi_X f_u(xi) = f_{psi_X u}(phi_X xi)`` in body form.

    The pushforward on the left is evaluated by central differences.
    """
    system = system or SE2Localisation(LandmarkSet([[0.0, 0.0]]))
    pushed = system.map_differential(lambda z: system.phi(X, z), xi)
    lhs = pushed @ system.dynamics(xi, u).body
    rhs = system.dynamics(system.phi(X, xi), system.psi(X, u)).body
    return float(np.max(np.abs(lhs - rhs)))


def check_lift_equivariance(
    X: GroupElement, xi: SystemState, u, system: EquivariantSystem | None = None
) -> float:
    """Residual of ``Ad_{X^-1} lift(xi, u) = lift(phi_X xi, psi_X u)``."""
    system = system or SE2Localisation(LandmarkSet([[0.0, 0.0]]))
    lhs = lie.adjoint_matrix(lie.inverse(X)) @ system.lift(xi, u)
    rhs = system.lift(system.phi(X, xi), system.psi(X, u))
    return float(np.max(np.abs(lhs - rhs)))


def check_lift_projection(
    xi: SystemState, u, system: EquivariantSystem | None = None
) -> float:
    """Residual of ``D phi_xi|_id lift(xi, u) = f_u(xi)``.

    Both sides are compared in matrix form: ``P wedge(lift)`` against
    ``f_U(P) = P wedge(U)``.
    """
    system = system or SE2Localisation(LandmarkSet([[0.0, 0.0]]))
    body = np.asarray(system.lift(xi, u), dtype=np.float64)
    base = xi.as_matrix()
    lhs = base @ lie.wedge(body)
    rhs = base @ lie.wedge(np.asarray(u, dtype=np.float64))
    return float(np.max(np.abs(lhs - rhs)))
