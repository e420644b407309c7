"""Randomised residual suites for the group, system, filter and symmetry identities.

Each suite returns a :class:`Check` with the worst residual over its samples.
``run_all`` is what ``eqfilter verify`` prints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lie
from .charts import component_chart, exponential_chart, make_chart
from .filter import FilterState, GainConfig, output_matrix, state_matrix
from .lie import GroupElement
from .symmetry import (
    ErrorParameters,
    check_input_reduction,
    check_left_invariance,
    check_error_equivariance,
    transport_filter,
    origin_change,
)
from .system import (
    LandmarkSet,
    SE2Localisation,
    check_lift_equivariance,
    check_lift_projection,
    check_system_equivariance,
    phi,
    psi,
)


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:<34} residual={self.residual:.3e}  "
            f"tol={self.tolerance:.0e}  n={self.samples}"
        )


def random_group(rng, spread=5.0) -> GroupElement:
    return GroupElement.make(rng.uniform(-np.pi, np.pi), rng.uniform(-spread, spread, 2))


def random_algebra(rng, max_omega=3.0, spread=2.0) -> np.ndarray:
    return np.concatenate([[rng.uniform(-max_omega, max_omega)], rng.uniform(-spread, spread, 2)])


def random_landmarks(rng, n=None) -> LandmarkSet:
    n = n or int(rng.integers(1, 6))
    return LandmarkSet(rng.standard_normal((n, 2)) * 2)


def _pose_residual(a: GroupElement, b: GroupElement) -> float:
    return lie.distance(a, b)


def group_axioms(rng, n=1000) -> Check:
    worst = 0.0
    for _ in range(n):
        a, b, c = random_group(rng), random_group(rng), random_group(rng)
        worst = max(
            worst,
            _pose_residual(lie.compose(lie.compose(a, b), c), lie.compose(a, lie.compose(b, c))),
            _pose_residual(lie.compose(a, lie.inverse(a)), GroupElement.identity()),
            _pose_residual(lie.compose(GroupElement.identity(), a), a),
        )
    return Check("group axioms", worst, 1e-12, n)


def exp_log_roundtrip(rng, n=1000) -> Check:
    worst = 0.0
    for _ in range(n):
        u = random_algebra(rng)
        worst = max(worst, float(np.max(np.abs(lie.log(lie.exp(u)) - u))))
    return Check("exp/log roundtrip", worst, 1e-10, n)


def adjoint_homomorphism(rng, n=1000) -> Check:
    worst = 0.0
    for _ in range(n):
        x, y = random_group(rng), random_group(rng)
        lhs = lie.adjoint_matrix(lie.compose(x, y))
        rhs = lie.adjoint_matrix(x) @ lie.adjoint_matrix(y)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return Check("Adjoint homomorphism", worst, 1e-12, n)


def action_axioms(rng, n=1000) -> Check:
    worst = 0.0
    identity = GroupElement.identity()
    for _ in range(n):
        x, y, xi = random_group(rng), random_group(rng), random_group(rng)
        u = random_algebra(rng)
        xy = lie.compose(x, y)
        worst = max(
            worst,
            _pose_residual(phi(identity, xi), xi),
            _pose_residual(phi(y, phi(x, xi)), phi(xy, xi)),
            float(np.max(np.abs(psi(identity, u) - u))),
            float(np.max(np.abs(psi(y, psi(x, u)) - psi(xy, u)))),
        )
    return Check("phi/psi action axioms", worst, 1e-12, n)


def system_equivariance(rng, n=100) -> Check:
    worst = max(
        check_system_equivariance(random_group(rng), random_group(rng), random_algebra(rng))
        for _ in range(n)
    )
    return Check("system equivariance (FD)", worst, 1e-6, n)


def lift_conditions(rng, n=100) -> Check:
    worst = 0.0
    for _ in range(n):
        x, xi, u = random_group(rng), random_group(rng), random_algebra(rng)
        worst = max(worst, check_lift_equivariance(x, xi, u), check_lift_projection(xi, u))
    return Check("lift projection/equivariance", worst, 1e-12, n)


def _random_params(rng) -> ErrorParameters:
    return ErrorParameters(
        random_algebra(rng), random_group(rng), rng.standard_normal(3), random_group(rng)
    )


def error_invariance(rng, n=100) -> Check:
    system = SE2Localisation(random_landmarks(rng))
    worst = 0.0
    for _ in range(n):
        e, params, Z = random_group(rng), _random_params(rng), random_group(rng)
        worst = max(
            worst,
            check_left_invariance(e, params, Z, system),
            check_input_reduction(e, params, system),
        )
    return Check("error dynamics invariance", worst, 1e-12, n)


def error_equivariance(rng, n=100) -> Check:
    system = SE2Localisation(random_landmarks(rng))
    worst = max(
        check_error_equivariance(random_group(rng), _random_params(rng), random_group(rng), system)
        for _ in range(n)
    )
    return Check("error dynamics equivariance (FD)", worst, 1e-8, n)


def _random_filter(rng, system, kind=None) -> FilterState:
    kind = kind or ("component", "exponential")[int(rng.integers(2))]
    chart = make_chart(kind, random_group(rng), system)
    return FilterState(random_group(rng), np.eye(3), chart, GainConfig.default(len(system.landmarks)))


def output_matrix_oracle(state: FilterState, system) -> np.ndarray:
    """Central differences of ``s -> h(phi(X, chart^-1(s e_j)))``."""
    return lie.numerical_differential(
        lambda x: system.output(system.phi(state.X_hat, state.chart.inverse(x))),
        np.zeros(3),
    )


def state_matrix_zero(rng, n=50) -> Check:
    worst = 0.0
    for _ in range(n):
        system = SE2Localisation(random_landmarks(rng))
        state = _random_filter(rng, system)
        u = random_algebra(rng)
        worst = max(worst, float(np.max(np.abs(state_matrix(state, u, system)))))
        # the generic route through the chart must agree
        generic = lie.numerical_differential(
            lambda x: system.lift(state.chart.inverse(x), psi(lie.inverse(state.X_hat), u)),
            np.zeros(3),
        )
        worst = max(worst, float(np.max(np.abs(state.chart.D_forward @ generic))))
    return Check("state matrix vanishes", worst, 0.0, n)


def output_matrix_fd(rng, n=50) -> Check:
    worst = 0.0
    for _ in range(n):
        system = SE2Localisation(random_landmarks(rng))
        state = _random_filter(rng, system)
        C = output_matrix(state, system)
        worst = max(worst, float(np.max(np.abs(C - output_matrix_oracle(state, system)))))
    return Check("output matrix vs FD", worst, 1e-8, n)


def output_matrix_transport(rng, n=50) -> Check:
    worst = 0.0
    for _ in range(n):
        system = SE2Localisation(random_landmarks(rng))
        state = _random_filter(rng, system)
        kind = ("component", "exponential")[int(rng.integers(2))]
        target = make_chart(kind, random_group(rng), system)
        _, M = origin_change(state.chart, target, system)
        moved = transport_filter(state, target, system)
        expected = output_matrix(state, system) @ np.linalg.inv(M)
        worst = max(worst, float(np.max(np.abs(output_matrix(moved, system) - expected))))
    return Check("output matrix transport", worst, 1e-8, n)


SUITES = [
    group_axioms,
    exp_log_roundtrip,
    adjoint_homomorphism,
    action_axioms,
    system_equivariance,
    lift_conditions,
    error_invariance,
    error_equivariance,
    state_matrix_zero,
    output_matrix_fd,
    output_matrix_transport,
]


def run_all(seed: int = 0) -> list[Check]:
    return [suite(np.random.default_rng([seed, i])) for i, suite in enumerate(SUITES)]
