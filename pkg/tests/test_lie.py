import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqfilter import lie
from eqfilter.errors import CutLocus
from eqfilter.lie import GroupElement

angles = st.floats(-3.1, 3.1)
coords = st.floats(-10, 10)
poses = st.builds(lambda t, a, b: GroupElement.make(t, (a, b)), angles, coords, coords)
algebra = st.builds(lambda w, a, b: np.array([w, a, b]), st.floats(-3, 3), coords, coords)


def series_expm(m, terms=50):
    """Truncated power series of the matrix exponential."""
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_compose_example():
    g = lie.compose(GroupElement.make(np.pi / 2, (1, 0)), GroupElement.make(0, (1, 0)))
    assert g.theta == pytest.approx(np.pi / 2)
    np.testing.assert_allclose(g.x, [1, 1], atol=1e-15)


def test_compose_matches_matrix_product(rng):
    for _ in range(20):
        a = GroupElement.make(rng.uniform(-3, 3), rng.normal(size=2))
        b = GroupElement.make(rng.uniform(-3, 3), rng.normal(size=2))
        np.testing.assert_allclose(
            lie.compose(a, b).as_matrix(), a.as_matrix() @ b.as_matrix(), atol=1e-14
        )


def test_inverse_matches_matrix_inverse():
    g = GroupElement.make(0.7, (2.0, -1.0))
    np.testing.assert_allclose(
        lie.inverse(g).as_matrix(), np.linalg.inv(g.as_matrix()), atol=1e-14
    )


def test_wrap_angle_range():
    assert lie.wrap_angle(np.pi) == pytest.approx(-np.pi)
    assert lie.wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert -np.pi <= lie.wrap_angle(-1e-20) < np.pi
    assert GroupElement.make(8.0).theta == pytest.approx(8.0 - 2 * np.pi)


def test_wedge_vee_inverse():
    u = np.array([0.3, -1.0, 2.0])
    np.testing.assert_array_equal(lie.vee(lie.wedge(u)), u)
    np.testing.assert_array_equal(lie.wedge(u), [[0, -0.3, -1.0], [0.3, 0, 2.0], [0, 0, 0]])


@pytest.mark.parametrize(
    "u",
    [
        [0.0, 1.0, -2.0],
        [1e-6, 0.5, 0.5],
        [5e-5, -3.0, 1.0],
        [2e-4, 1.0, 1.0],
        [1.2, 0.4, -0.7],
        [-3.0, 2.0, 2.0],
    ],
)
def test_exp_against_series(u):
    u = np.array(u)
    np.testing.assert_allclose(
        lie.exp(u).as_matrix(), series_expm(lie.wedge(u)), atol=1e-12
    )


def test_exp_pure_rotation():
    g = lie.exp([np.pi / 2, 0, 0])
    assert g.theta == pytest.approx(np.pi / 2)
    np.testing.assert_array_equal(g.x, [0, 0])


def test_exp_pure_translation():
    g = lie.exp([0, 1.5, -2.0])
    np.testing.assert_allclose(g.x, [1.5, -2.0])


def test_log_cut_locus():
    with pytest.raises(CutLocus):
        lie.log(GroupElement.make(np.pi, (1.0, 0.0)))


def test_log_near_cut_locus_is_finite():
    u = lie.log(GroupElement.make(-np.pi + 1e-6, (1.0, 0.0)))
    assert np.all(np.isfinite(u))


def test_small_angle_branch_is_continuous():
    v = np.array([1.0, -2.0])
    below = lie.exp([0.999e-4, *v]).x
    above = lie.exp([1.001e-4, *v]).x
    assert np.max(np.abs(below - above)) < 1e-6


def test_adjoint_against_conjugation(rng):
    for _ in range(20):
        g = GroupElement.make(rng.uniform(-3, 3), rng.normal(size=2) * 3)
        u = rng.normal(size=3)
        conj = g.as_matrix() @ lie.wedge(u) @ np.linalg.inv(g.as_matrix())
        np.testing.assert_allclose(lie.adjoint_matrix(g) @ u, lie.vee(conj), atol=1e-13)


def test_adjoint_against_finite_differences():
    g = GroupElement.make(0.9, (1.5, -0.5))
    fd = lie.numerical_differential(
        lambda u: lie.log(lie.compose(lie.compose(g, lie.exp(u)), lie.inverse(g))),
        np.zeros(3),
    )
    np.testing.assert_allclose(fd, lie.adjoint_matrix(g), atol=1e-9)


def test_numerical_differential_linear_map():
    A = np.array([[1.0, 2.0], [3.0, -4.0], [0.5, 0.0]])
    np.testing.assert_allclose(lie.numerical_differential(lambda x: A @ x, [3.0, -1.0]), A)


def test_single_precision_is_preserved():
    g = GroupElement.make(0.3, (1.0, 2.0), np.float32)
    h = lie.compose(g, lie.exp(np.array([0.1, 0.2, 0.3], dtype=np.float32)))
    assert h.dtype == np.float32
    assert lie.inverse(h).dtype == np.float32
    assert lie.log(h).dtype == np.float32
    assert np.asarray(h.theta).dtype == np.float32


def test_from_matrix_roundtrip():
    g = GroupElement.make(-2.0, (0.3, 4.0))
    assert lie.distance(GroupElement.from_matrix(g.as_matrix()), g) < 1e-15


@settings(max_examples=200, deadline=None)
@given(poses, poses, poses)
def test_associativity(a, b, c):
    lhs = lie.compose(lie.compose(a, b), c)
    rhs = lie.compose(a, lie.compose(b, c))
    assert lie.distance(lhs, rhs) < 1e-12


@settings(max_examples=200, deadline=None)
@given(poses)
def test_inverse_property(a):
    assert lie.distance(lie.compose(a, lie.inverse(a)), GroupElement.identity()) < 1e-12
    assert lie.distance(lie.compose(lie.inverse(a), a), GroupElement.identity()) < 1e-12


@settings(max_examples=200, deadline=None)
@given(algebra)
def test_log_exp_roundtrip(u):
    np.testing.assert_allclose(lie.log(lie.exp(u)), u, atol=1e-10 * max(1, np.abs(u).max()))


@settings(max_examples=200, deadline=None)
@given(poses)
def test_exp_log_roundtrip(g):
    assert lie.distance(lie.exp(lie.log(g)), g) < 1e-11


@settings(max_examples=200, deadline=None)
@given(poses, poses)
def test_adjoint_homomorphism(a, b):
    np.testing.assert_allclose(
        lie.adjoint_matrix(lie.compose(a, b)),
        lie.adjoint_matrix(a) @ lie.adjoint_matrix(b),
        atol=1e-12,
    )


def test_distance_wraps_angle():
    a = GroupElement.make(np.pi - 1e-3)
    b = GroupElement.make(-np.pi + 1e-3)
    assert lie.distance(a, b) == pytest.approx(2e-3)
    assert math.isclose(lie.distance(a, a), 0.0)
