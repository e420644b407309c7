"""Local coordinate charts about an origin and the origin-change matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import lie
from .errors import OriginMismatch
from .lie import GroupElement
from .system import EquivariantSystem, SE2Localisation, SystemState

COMPONENT = "component"
EXPONENTIAL = "exponential"
CHART_KINDS = (COMPONENT, EXPONENTIAL)


def _default_system() -> EquivariantSystem:
    return SE2Localisation([[0.0, 0.0]])


@dataclass(frozen=True, eq=False)
class Chart:
    """Coordinates ``forward: M -> R^3`` with ``forward(origin) = 0``.

    ``D_forward`` maps body-form tangents at the origin to coordinates and
    ``D_inverse`` maps coordinates back. Both are fixed when the chart is
    built: closed forms for the shipped chart kinds, central differences in
    double precision otherwise (see :func:`numerical_differentials`).
    """

    origin: SystemState
    kind: str
    forward: Callable[[SystemState], np.ndarray]
    inverse: Callable[[np.ndarray], SystemState]
    D_forward: np.ndarray = field(repr=False)
    D_inverse: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ActionDifferentialInverse:
    """Right-inverse of ``D phi_origin`` at the identity, in body form."""

    matrix: np.ndarray


def numerical_differentials(origin, forward, inverse, system=None):
    """Central-difference ``(D_forward, D_inverse)`` of a chart at its origin.

    Accuracy degrades like ``|origin| * eps / h`` because the chart is
    evaluated on absolute states; fine near the identity, poor at 1e5.
    """
    system = system or _default_system()
    zero = np.zeros(system.state_dim)
    d_forward = lie.numerical_differential(
        lambda b: forward(system.perturb(origin, b)), zero
    )
    d_inverse = lie.numerical_differential(
        lambda c: system.body_coordinates(origin, inverse(c)), zero
    )
    return d_forward, d_inverse


def component_chart(origin: SystemState) -> Chart:
    """Angle and position differences from ``origin``."""
    origin64 = origin.astype(np.float64)

    def forward(xi):
        dtype = xi.dtype
        return np.array(
            [lie.wrap_angle(xi.theta - dtype.type(origin64.theta)),
             *(xi.x - origin64.x.astype(dtype))],
            dtype=dtype,
        )

    def inverse(c):
        c = np.asarray(c)
        dtype = c.dtype if c.dtype.kind == "f" else np.dtype(np.float64)
        return GroupElement(
            dtype.type(origin64.theta) + c[0],
            origin64.x.astype(dtype) + c[1:3],
        )

    # origin exp(s b) moves the angle by omega and the position by R0 v
    d_forward = np.eye(3)
    d_forward[1:, 1:] = origin64.R
    d_inverse = np.eye(3)
    d_inverse[1:, 1:] = origin64.R.T
    return Chart(origin64, COMPONENT, forward, inverse, d_forward, d_inverse)


def exponential_chart(
    origin: SystemState, system: EquivariantSystem | None = None
) -> Chart:
    """Normal coordinates: ``forward(xi) = log(W)`` with ``phi(W, origin) = xi``."""
    system = system or _default_system()
    origin64 = origin.astype(np.float64)

    def forward(xi):
        return system.body_coordinates(origin64.astype(xi.dtype), xi)

    def inverse(c):
        c = np.asarray(c)
        dtype = c.dtype if c.dtype.kind == "f" else np.dtype(np.float64)
        return system.perturb(origin64.astype(dtype), c)

    # log(exp(b)) = b near zero
    return Chart(origin64, EXPONENTIAL, forward, inverse, np.eye(3), np.eye(3))


def custom_chart(origin, forward, inverse, system=None, kind="custom") -> Chart:
    """Chart from arbitrary maps, with differentials taken numerically."""
    origin64 = origin.astype(np.float64)
    d_forward, d_inverse = numerical_differentials(origin64, forward, inverse, system)
    return Chart(origin64, kind, forward, inverse, d_forward, d_inverse)


def make_chart(kind: str, origin: SystemState, system=None) -> Chart:
    if kind == COMPONENT:
        return component_chart(origin)
    if kind == EXPONENTIAL:
        return exponential_chart(origin, system)
    raise ValueError(f"unknown chart kind {kind!r}; expected one of {CHART_KINDS}")


def action_differential_inverse(origin: SystemState) -> ActionDifferentialInverse:
    # body form is defined through D phi_origin|_id, so its inverse is I
    return ActionDifferentialInverse(np.eye(3))


def origins_related(origin, target, Z, system=None, tol=1e-10) -> bool:
    """Whether ``target == phi(Z^-1, origin)`` up to a scale-aware tolerance."""
    system = system or _default_system()
    image = system.phi(lie.inverse(Z), origin)
    scale = max(1.0, float(np.max(np.abs(origin.x))), float(np.max(np.abs(target.x))))
    return lie.distance(image, target) <= tol * scale


def transition_matrix(
    chart_from: Chart,
    chart_to: Chart,
    Z: GroupElement,
    system: EquivariantSystem | None = None,
    numerical: bool = False,
) -> np.ndarray:
    """Matrix relating coordinates of two charts whose origins differ by ``Z``.

    ``chart_to.origin`` must equal ``phi(Z^-1, chart_from.origin)``. The
    chart parts are the frozen differentials; the action differential comes
    from the system, or from central differences with ``numerical=True``.
    """
    system = system or _default_system()
    Z = Z.astype(np.float64)
    if not origins_related(chart_from.origin, chart_to.origin, Z, system):
        raise OriginMismatch(
            f"chart origin {chart_to.origin!r} is not phi(Z^-1, {chart_from.origin!r})"
        )
    Z_inv = lie.inverse(Z)
    if numerical:
        d_action = system.map_differential(
            lambda z: system.phi(Z_inv, z), chart_from.origin
        )
    else:
        d_action = system.action_differential(Z_inv, chart_from.origin)
    return chart_to.D_forward @ d_action @ chart_from.D_inverse


def transported_right_inverse(
    origin: SystemState, Z: GroupElement, system: EquivariantSystem | None = None
) -> np.ndarray:
    """Right-inverse at ``phi(Z^-1, origin)`` built from the one at ``origin``.

    ``Ad_Z . Dphi_origin^+ . D phi_Z``, where ``D phi_Z`` is taken at the new
    origin and lands in the tangent space at ``origin``.
    """
    system = system or _default_system()
    new_origin = system.phi(lie.inverse(Z), origin)
    d_action = system.map_differential(lambda z: system.phi(Z, z), new_origin)
    return (
        lie.adjoint_matrix(Z)
        @ action_differential_inverse(origin).matrix
        @ d_action
    )
