"""SE(2) group operations on (angle, translation) pairs.

Algebra elements are plain length-3 arrays ``(omega, v1, v2)``. Group
elements keep their scalar precision (float32 or float64) through every
operation so the same code serves both precision modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CutLocus

SMALL_ANGLE = 1e-4
CUT_LOCUS_TOL = 1e-9


def wrap_angle(theta):
    """Wrap an angle (scalar or array) to [-pi, pi), keeping its dtype."""
    theta = np.asarray(theta)
    pi = theta.dtype.type(np.pi) if theta.dtype.kind == "f" else np.pi
    wrapped = np.mod(theta + pi, 2 * pi) - pi
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(wrapped >= pi, wrapped - 2 * pi, wrapped)[()]


def rotation(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Element of SE(2): rotation angle ``theta`` and translation ``x``."""

    theta: np.floating
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x)
        dtype = x.dtype if x.dtype.kind == "f" else np.dtype(np.float64)
        x = x.astype(dtype, copy=False).reshape(2)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta", wrap_angle(dtype.type(self.theta)))

    @classmethod
    def make(cls, theta=0.0, x=(0.0, 0.0), dtype=np.float64) -> "GroupElement":
        dtype = np.dtype(dtype)
        return cls(dtype.type(theta), np.asarray(x, dtype=dtype))

    @classmethod
    def identity(cls, dtype=np.float64) -> "GroupElement":
        return cls.make(0.0, (0.0, 0.0), dtype)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "GroupElement":
        m = np.asarray(m)
        return cls(np.arctan2(m[1, 0], m[0, 0]), m[:2, 2])

    @property
    def dtype(self) -> np.dtype:
        return self.x.dtype

    @property
    def R(self) -> np.ndarray:
        return rotation(self.theta)

    def as_matrix(self) -> np.ndarray:
        m = np.eye(3, dtype=self.dtype)
        m[:2, :2] = self.R
        m[:2, 2] = self.x
        return m

    def astype(self, dtype) -> "GroupElement":
        dtype = np.dtype(dtype)
        return GroupElement(dtype.type(self.theta), self.x.astype(dtype))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def __repr__(self):
        return f"GroupElement(theta={float(self.theta)!r}, x={self.x.tolist()!r})"


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    return GroupElement(a.theta + b.theta, a.x + a.R @ b.x)


def inverse(a: GroupElement) -> GroupElement:
    return GroupElement(-a.theta, -(a.R.T @ a.x))


def distance(a: GroupElement, b: GroupElement) -> float:
    """Sup-norm difference of (theta, x) components with wrapped angle."""
    dtheta = abs(float(wrap_angle(np.float64(a.theta) - np.float64(b.theta))))
    dx = np.max(np.abs(a.x.astype(np.float64) - b.x.astype(np.float64)))
    return max(dtheta, float(dx))


def wedge(u) -> np.ndarray:
    u = np.asarray(u)
    m = np.zeros((3, 3), dtype=u.dtype if u.dtype.kind == "f" else np.float64)
    m[0, 1], m[1, 0] = -u[0], u[0]
    m[:2, 2] = u[1:3]
    return m


def vee(m) -> np.ndarray:
    m = np.asarray(m)
    return np.array([m[1, 0], m[0, 2], m[1, 2]])


def _v_coefficients(omega):
    """Return (sin w / w, (1 - cos w) / w) with a series near zero."""
    if abs(omega) < SMALL_ANGLE:
        w2 = omega * omega
        return 1 - w2 / 6 + w2 * w2 / 120, omega / 2 - omega * w2 / 24
    return np.sin(omega) / omega, (1 - np.cos(omega)) / omega


def exp(u) -> GroupElement:
    u = np.asarray(u)
    if u.dtype.kind != "f":
        u = u.astype(np.float64)
    omega, v = u[0], u[1:3]
    a, b = _v_coefficients(omega)
    x = np.array([a * v[0] - b * v[1], b * v[0] + a * v[1]], dtype=u.dtype)
    return GroupElement(omega, x)


def log(g: GroupElement) -> np.ndarray:
    omega = g.theta
    if abs(float(omega) + np.pi) < CUT_LOCUS_TOL:
        raise CutLocus(f"log undefined at theta={float(omega)!r}")
    a, b = _v_coefficients(omega)
    det = a * a + b * b
    x = g.x
    v = np.array([a * x[0] + b * x[1], -b * x[0] + a * x[1]], dtype=g.dtype) / det
    return np.array([omega, v[0], v[1]], dtype=g.dtype)


def adjoint_matrix(g: GroupElement) -> np.ndarray:
    """Matrix of ``u -> vee(g wedge(u) g^-1)``."""
    c, s = np.cos(g.theta), np.sin(g.theta)
    t1, t2 = g.x
    return np.array(
        [[1, 0, 0], [t2, c, -s], [-t1, s, c]],
        dtype=g.dtype,
    )


def numerical_differential(
    fn: Callable[[np.ndarray], np.ndarray], point
) -> np.ndarray:
    """Central-difference Jacobian of ``fn`` at ``point``.

    Step per coordinate is ``cbrt(eps) * max(1, |x_j|)``, with eps taken
    from the dtype of ``point``.
    """
    point = np.atleast_1d(np.asarray(point))
    if point.dtype.kind != "f":
        point = point.astype(np.float64)
    base_step = np.cbrt(np.finfo(point.dtype).eps)
    columns = []
    for j in range(point.size):
        h = base_step * max(1.0, abs(float(point[j])))
        plus, minus = point.copy(), point.copy()
        plus[j] += h
        minus[j] -= h
        # use the actually representable step
        width = plus[j] - minus[j]
        diff = np.atleast_1d(np.asarray(fn(plus))) - np.atleast_1d(np.asarray(fn(minus)))
        columns.append(diff / width)
    return np.stack(columns, axis=1)
