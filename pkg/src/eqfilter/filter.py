"""Equivariant filter: linearisation, innovation, and Euler time stepping."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import lie
from .charts import Chart, action_differential_inverse
from .errors import NonFiniteState
from .lie import GroupElement
from .system import EquivariantSystem, SystemState

SYMMETRY_TOL = 1e-12
EIGEN_FLOOR = -1e-12


def _check_psd(name, m):
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    if np.linalg.eigvalsh(m.astype(np.float64)).min() < -SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not positive semi-definite")


@dataclass(frozen=True, eq=False)
class GainConfig:
    """State gain ``Q`` (3x3) and output gain ``R`` (2n x 2n)."""

    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if Q.shape != (3, 3):
            raise ValueError(f"Q must be 3x3, got {Q.shape}")
        if R.shape[0] != R.shape[1]:
            raise ValueError(f"R must be square, got {R.shape}")
        _check_psd("Q", Q)
        _check_psd("R", R)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)

    @classmethod
    def default(cls, n_landmarks: int) -> "GainConfig":
        return cls(0.1 * np.eye(3), 0.3 * np.eye(2 * n_landmarks))


@dataclass(frozen=True, eq=False)
class FilterState:
    X_hat: GroupElement
    Sigma: np.ndarray
    chart: Chart
    gains: GainConfig
    time: float = 0.0

    @property
    def dtype(self) -> np.dtype:
        return self.X_hat.dtype

    def astype(self, dtype) -> "FilterState":
        return replace(self, X_hat=self.X_hat.astype(dtype), Sigma=self.Sigma.astype(dtype))


@dataclass(frozen=True)
class Linearisation:
    A0: np.ndarray
    C: np.ndarray


def make_filter(
    chart: Chart,
    gains: GainConfig,
    X_hat: GroupElement | None = None,
    Sigma=None,
    dtype=np.float64,
) -> FilterState:
    X_hat = GroupElement.identity(dtype) if X_hat is None else X_hat.astype(dtype)
    Sigma = np.eye(3) if Sigma is None else np.asarray(Sigma, dtype=float)
    _check_psd("Sigma", Sigma)
    return FilterState(X_hat, Sigma.astype(dtype), chart, gains)


def _origin(state: FilterState) -> SystemState:
    return state.chart.origin.astype(state.dtype)


def state_estimate(state: FilterState, system: EquivariantSystem) -> SystemState:
    return system.phi(state.X_hat, _origin(state))


def state_matrix(state: FilterState, u, system: EquivariantSystem) -> np.ndarray:
    """Linearised state matrix ``A0`` in chart coordinates."""
    dtype = state.dtype
    u_origin = system.psi(lie.inverse(state.X_hat), np.asarray(u, dtype=dtype))
    # D_phi_origin at the identity is the identity in body form
    d_lift = system.lift_state_differential(state.chart, u_origin)
    return state.chart.D_forward.astype(dtype) @ np.asarray(d_lift, dtype=dtype)


def output_matrix(state: FilterState, system: EquivariantSystem) -> np.ndarray:
    """Linearised output matrix ``C`` in chart coordinates, shape ``(2n, 3)``."""
    dtype = state.dtype
    d_output = system.output_differential(state_estimate(state, system))
    d_action = system.action_differential(state.X_hat, _origin(state))
    return (
        np.asarray(d_output, dtype=dtype)
        @ np.asarray(d_action, dtype=dtype)
        @ state.chart.D_inverse.astype(dtype)
    )


def linearise(state: FilterState, u, system: EquivariantSystem) -> Linearisation:
    return Linearisation(state_matrix(state, u, system), output_matrix(state, system))


def correction(
    state: FilterState, y, system: EquivariantSystem, C: np.ndarray | None = None
) -> np.ndarray:
    """Algebra-valued innovation term ``Delta``."""
    dtype = state.dtype
    C = output_matrix(state, system) if C is None else C
    residual = np.asarray(y, dtype=dtype) - system.output(state_estimate(state, system))
    right_inverse = action_differential_inverse(_origin(state)).matrix.astype(dtype)
    gain = state.Sigma @ C.T @ state.gains.R.astype(dtype)
    return right_inverse @ state.chart.D_inverse.astype(dtype) @ (gain @ residual)


def _clip_negative_eigenvalues(sigma):
    eigvals, eigvecs = np.linalg.eigh(sigma)
    if eigvals.min() >= 0:
        return sigma
    eigvals = np.maximum(eigvals, 0)
    clipped = (eigvecs * eigvals) @ eigvecs.T
    return (clipped + clipped.T) / 2


def filter_step(
    state: FilterState, u, y, system: EquivariantSystem, dt: float
) -> FilterState:
    """One explicit Euler step of the observer and Riccati equations.

    The group state moves multiplicatively,
    ``X <- exp(dt Delta) X exp(dt Lambda)``, which stays on the group and is
    first-order consistent with the observer ODE.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dtype = state.dtype
    dt_ = dtype.type(dt)
    u = np.asarray(u, dtype=dtype)
    lin = linearise(state, u, system)
    delta = correction(state, y, system, lin.C)
    lam = np.asarray(system.lift(state_estimate(state, system), u), dtype=dtype)

    X_next = lie.compose(
        lie.compose(lie.exp(dt_ * delta), state.X_hat), lie.exp(dt_ * lam)
    )

    Sigma, A, C = state.Sigma, lin.A0, lin.C
    Q, R = state.gains.Q.astype(dtype), state.gains.R.astype(dtype)
    SigmaCt = Sigma @ C.T
    Sigma_dot = A @ Sigma + Sigma @ A.T + Q - SigmaCt @ R @ SigmaCt.T
    Sigma_next = Sigma + dt_ * Sigma_dot
    Sigma_next = (Sigma_next + Sigma_next.T) / 2

    if not (np.all(np.isfinite(Sigma_next)) and np.all(np.isfinite(X_next.x))
            and np.isfinite(X_next.theta)):
        raise NonFiniteState(f"non-finite filter state at t={state.time + dt}")

    scale = max(1.0, float(np.max(np.abs(Sigma_next))))
    if np.linalg.eigvalsh(Sigma_next).min() < EIGEN_FLOOR * scale:
        Sigma_next = _clip_negative_eigenvalues(Sigma_next)

    return replace(state, X_hat=X_next, Sigma=Sigma_next, time=state.time + dt)
