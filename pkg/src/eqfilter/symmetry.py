"""Error dynamics of the filter and their symmetries.

Everything here is evaluated pointwise. Vector fields are callables from a
state to a :class:`TangentVector`; residuals are sup norms of body-form
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import lie
from .charts import Chart, transition_matrix
from .errors import OriginMismatch
from .filter import FilterState, GainConfig, filter_step, state_estimate
from .lie import GroupElement
from .system import EquivariantSystem, SystemState, TangentVector

VectorField = Callable[[SystemState], TangentVector]

BACK_SUBSTITUTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ErrorParameters:
    u: np.ndarray
    X_hat: GroupElement
    Delta: np.ndarray
    origin: SystemState


def global_error(X_hat: GroupElement, xi: SystemState, system: EquivariantSystem) -> SystemState:
    return system.phi(lie.inverse(X_hat), xi)


def chi(e: SystemState, params: ErrorParameters, system: EquivariantSystem) -> TangentVector:
    """Error vector field evaluated at ``e``."""
    u_origin = system.psi(lie.inverse(params.X_hat), params.u)
    body = (
        system.lift(e, u_origin)
        - system.lift(params.origin, u_origin)
        - np.asarray(params.Delta)
    )
    return TangentVector(e, body)


def error_field(params: ErrorParameters, system: EquivariantSystem) -> VectorField:
    return lambda e: chi(e, params, system)


def pushforward_field(
    Z: GroupElement, field: VectorField, e: SystemState, system: EquivariantSystem
) -> TangentVector:
    """``Phi_Z(field)`` at ``e``: evaluate at ``phi(Z^-1, e)`` and push through ``D phi_Z``.

    The differential is taken numerically, so this does not rely on the
    closed-form action differential of the system.
    """
    base = system.phi(lie.inverse(Z), e)
    tangent = field(base)
    d_action = system.map_differential(lambda z: system.phi(Z, z), base)
    return TangentVector(e, d_action @ tangent.body)


def _body_residual(a: TangentVector, b: TangentVector) -> float:
    return float(np.max(np.abs(np.asarray(a.body) - np.asarray(b.body))))


def check_left_invariance(
    e: SystemState, params: ErrorParameters, Z: GroupElement, system: EquivariantSystem
) -> float:
    """Residual of ``chi(e; psi_Z u, Z X, D, o) = chi(e; u, X, D, o)``.

    Exact when the lift is constant, as for the localisation system; see
    :func:`check_right_invariance` for the form that holds in general.
    """
    moved = replace(
        params,
        u=system.psi(Z, params.u),
        X_hat=lie.compose(Z, params.X_hat),
    )
    return _body_residual(chi(e, moved, system), chi(e, params, system))


def check_input_reduction(
    e: SystemState, params: ErrorParameters, system: EquivariantSystem
) -> float:
    """Residual of ``chi(e; u, X, D, o) = chi(e; psi_{X^-1} u, id, D, o)``."""
    reduced = replace(
        params,
        u=system.psi(lie.inverse(params.X_hat), params.u),
        X_hat=GroupElement.identity(params.X_hat.dtype),
    )
    return _body_residual(chi(e, reduced, system), chi(e, params, system))


def check_error_equivariance(
    e: SystemState, params: ErrorParameters, Z: GroupElement, system: EquivariantSystem
) -> float:
    """Residual of ``Phi_Z chi_(u, X, D, o) = chi_(psi_Z u, X, Ad_{Z^-1} D, phi_Z o)`` at ``e``.

    Exact when the lift is constant; see :func:`check_transport_equivariance`.
    """
    lhs = pushforward_field(Z, error_field(params, system), e, system)
    moved = replace(
        params,
        u=system.psi(Z, params.u),
        Delta=lie.adjoint_matrix(lie.inverse(Z)) @ np.asarray(params.Delta),
        origin=system.phi(Z, params.origin),
    )
    return _body_residual(lhs, chi(e, moved, system))


def check_right_invariance(
    e: SystemState, params: ErrorParameters, Z: GroupElement, system: EquivariantSystem
) -> float:
    """Residual of ``chi(e; psi_Z u, X Z, D, o) = chi(e; u, X, D, o)``.

    Holds for every equivariant system, unlike :func:`check_left_invariance`,
    which needs ``psi`` to commute with the reduction by ``X^-1``.
    """
    moved = replace(
        params,
        u=system.psi(Z, params.u),
        X_hat=lie.compose(params.X_hat, Z),
    )
    return _body_residual(chi(e, moved, system), chi(e, params, system))


def check_transport_equivariance(
    e: SystemState, params: ErrorParameters, Z: GroupElement, system: EquivariantSystem
) -> float:
    """Residual of ``Phi_Z chi_(u, X, D, o) = chi_(u, Z^-1 X, Ad_{Z^-1} D, phi_Z o)`` at ``e``.

    This is the general form of :func:`check_error_equivariance`, and the one
    realised by :func:`transport_filter` with ``Z^-1`` in place of ``Z``.
    """
    lhs = pushforward_field(Z, error_field(params, system), e, system)
    moved = replace(
        params,
        X_hat=lie.compose(lie.inverse(Z), params.X_hat),
        Delta=lie.adjoint_matrix(lie.inverse(Z)) @ np.asarray(params.Delta),
        origin=system.phi(Z, params.origin),
    )
    return _body_residual(lhs, chi(e, moved, system))


def origin_change(
    chart_from: Chart, chart_to: Chart, system: EquivariantSystem
) -> tuple[GroupElement, np.ndarray]:
    """Group element ``Z`` and matrix ``M`` taking ``chart_from`` to ``chart_to``.

    ``Z`` is the unique element with ``chart_to.origin = phi(Z^-1, chart_from.origin)``.
    """
    if chart_to is chart_from:
        return GroupElement.identity(), np.eye(3)
    Z = system.relative(chart_to.origin, chart_from.origin)
    check = system.phi(lie.inverse(Z), chart_from.origin)
    scale = max(1.0, float(np.max(np.abs(chart_to.origin.x))))
    if lie.distance(check, chart_to.origin) > BACK_SUBSTITUTION_TOL * scale:
        raise OriginMismatch("no group element relates the two chart origins")
    return Z, transition_matrix(chart_from, chart_to, Z, system)


def transport_filter(
    state: FilterState, target_chart: Chart, system: EquivariantSystem
) -> FilterState:
    """Re-express a filter about another origin and chart.

    Returns ``(Z X, M Sigma M^T)`` with gains ``(M Q M^T, R)``. The transform
    is computed in double precision and the result cast back to the
    precision of ``state``.
    """
    if target_chart is state.chart:
        return state
    Z, M = origin_change(state.chart, target_chart, system)
    dtype = state.dtype
    X_hat = lie.compose(Z, state.X_hat.astype(np.float64))
    Sigma = M @ state.Sigma.astype(np.float64) @ M.T
    gains = GainConfig(M @ state.gains.Q @ M.T, state.gains.R)
    return FilterState(
        X_hat.astype(dtype),
        ((Sigma + Sigma.T) / 2).astype(dtype),
        target_chart,
        gains,
        state.time,
    )


@dataclass
class EquivalenceReport:
    """Divergence between two filters related by an origin change."""

    times: np.ndarray
    position_diff: np.ndarray
    angle_diff: np.ndarray
    sigma_diff: np.ndarray
    M: np.ndarray

    @property
    def max_position(self) -> float:
        return float(np.max(self.position_diff))

    @property
    def max_angle(self) -> float:
        return float(np.max(self.angle_diff))

    @property
    def max_sigma(self) -> float:
        return float(np.max(self.sigma_diff))

    def rows(self):
        header = ("t", "position_diff", "angle_diff", "sigma_diff")
        body = zip(self.times, self.position_diff, self.angle_diff, self.sigma_diff)
        return header, [tuple(float(v) for v in row) for row in body]


def run_equivalence_experiment(
    scenario, chart_a: Chart, chart_b: Chart
) -> EquivalenceReport:
    """Run two filters that are matched by an origin change on one data record.

    The filter about ``chart_a`` is initialised from the scenario
    (``initial_estimate``, ``Q``, ``R``, ``Sigma0``); the second filter is
    its transport to ``chart_b``.
    """
    from .scenario import build_system, integrate_truth, synthesize_measurements

    dtype = scenario.dtype
    system = build_system(scenario)
    truth = integrate_truth(scenario)
    measurements = synthesize_measurements(
        truth, system.landmarks, scenario.noise_std, scenario.noise_seed
    )
    u = np.asarray(scenario.velocity, dtype=dtype)

    gains = GainConfig(scenario.Q, scenario.R)
    X0 = system.relative(chart_a.origin, scenario.initial_estimate.astype(np.float64))
    filt_a = FilterState(
        X0.astype(dtype), np.asarray(scenario.Sigma0, dtype=dtype), chart_a, gains
    )
    _, M = origin_change(chart_a, chart_b, system)
    filt_b = transport_filter(filt_a, chart_b, system)

    n = len(truth)
    pos = np.zeros(n)
    ang = np.zeros(n)
    sig = np.zeros(n)
    times = np.arange(n) * scenario.dt
    for k in range(n):
        est_a = state_estimate(filt_a, system)
        est_b = state_estimate(filt_b, system)
        pos[k] = float(np.linalg.norm(est_a.x.astype(float) - est_b.x.astype(float)))
        ang[k] = abs(float(lie.wrap_angle(float(est_a.theta) - float(est_b.theta))))
        predicted = M @ filt_a.Sigma.astype(float) @ M.T
        sig[k] = float(np.max(np.abs(filt_b.Sigma.astype(float) - predicted)))
        if k + 1 < n:
            filt_a = filter_step(filt_a, u, measurements[k], system, scenario.dt)
            filt_b = filter_step(filt_b, u, measurements[k], system, scenario.dt)
    return EquivalenceReport(times, pos, ang, sig, M)
