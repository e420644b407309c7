import numpy as np
import pytest

from eqfilter import lie
from eqfilter.lie import GroupElement
from eqfilter.system import EquivariantSystem

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class TwoSidedSystem(EquivariantSystem):
    """Test-only system on SE(2) with inputs ``(a, b)`` and ``f = aP + Pb``.

    The symmetry is ``phi(X, P) = PX``, ``psi_X(a, b) = (a, Ad_{X^-1} b)``
    and the lift ``Ad_{P^-1} a + b`` depends on the state.
    """

    def phi(self, X, xi):
        return lie.compose(xi, X)

    def psi(self, X, u):
        u = np.asarray(u, dtype=float)
        return np.concatenate([u[:3], lie.adjoint_matrix(lie.inverse(X)) @ u[3:]])

    def lift(self, xi, u):
        u = np.asarray(u, dtype=float)
        return lie.adjoint_matrix(lie.inverse(xi)) @ u[:3] + u[3:]

    def output(self, xi):
        return np.array([float(xi.theta), *xi.x])

    def relative(self, base, xi):
        return lie.compose(lie.inverse(base), xi)


class ConjugatedLiftSystem(EquivariantSystem):
    """Test-only system with lift ``Ad_{P^-1} G Ad_P u`` for a fixed matrix ``G``.

    Equivariant under ``phi(X, P) = PX`` and ``psi_X u = Ad_{X^-1} u`` by
    construction, and the lift depends on the state through ``psi``.
    """

    G = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.5, 0.0, 1.0]])

    def phi(self, X, xi):
        return lie.compose(xi, X)

    def psi(self, X, u):
        return lie.adjoint_matrix(lie.inverse(X)) @ np.asarray(u, dtype=float)

    def lift(self, xi, u):
        return lie.adjoint_matrix(lie.inverse(xi)) @ self.G @ lie.adjoint_matrix(xi) @ u

    def output(self, xi):
        return np.asarray(xi.x)

    def relative(self, base, xi):
        return lie.compose(lie.inverse(base), xi)


@pytest.fixture
def conjugated():
    return ConjugatedLiftSystem()


@pytest.fixture
def two_sided():
    return TwoSidedSystem()


def random_pose(rng, spread=3.0):
    return GroupElement.make(rng.uniform(-np.pi, np.pi), rng.uniform(-spread, spread, 2))
