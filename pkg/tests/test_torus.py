import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dropletlab.torus import (
    MAX_DISTANCE,
    ORIGIN,
    TorusPoint,
    minimal_image,
    pairwise_torus_distances,
    torus_distance,
    wrap,
    wrap_array,
)

coord = st.floats(-50, 50, allow_nan=False)
point = st.tuples(coord, coord, coord)


def brute_distance(a, b):
    d = np.asarray(a) - np.asarray(b)
    d = d - np.round(d)
    return min(np.linalg.norm(d + np.array(s)) for s in itertools.product((-1, 0, 1), repeat=3))


def test_wrap_examples():
    assert wrap((0.75, -0.5, 1.0)).coords == (-0.25, -0.5, 0.0)
    assert wrap((0.5, 0.5, 0.5)).coords == (-0.5, -0.5, -0.5)
    assert wrap((-1.5, 2.25, 3.0)).coords == (-0.5, 0.25, 0.0)


def test_wrap_rejects_nonfinite():
    with pytest.raises(ValueError):
        wrap((np.nan, 0, 0))
    with pytest.raises(ValueError):
        TorusPoint((0.0, 0.0))


@given(point)
def test_wrapped_coordinates_in_cell(p):
    c = np.array(wrap(p).coords)
    assert np.all(c >= -0.5) and np.all(c < 0.5)


@given(point, st.tuples(*[st.integers(-5, 5)] * 3))
def test_wrap_ignores_lattice_shifts(p, n):
    a = wrap(p)
    b = wrap(tuple(np.array(p) + np.array(n)))
    assert torus_distance(a, b) < 1e-12


@given(point, point)
def test_distance_matches_brute_force(a, b):
    assert torus_distance(a, b) == pytest.approx(brute_distance(wrap(a).array, wrap(b).array), abs=1e-12)


@given(point, point)
def test_distance_symmetric_and_bounded(a, b):
    d = torus_distance(a, b)
    assert d == pytest.approx(torus_distance(b, a), abs=1e-14)
    assert 0 <= d <= MAX_DISTANCE + 1e-12


@given(point, point, point)
def test_triangle_inequality(a, b, c):
    assert torus_distance(a, c) <= torus_distance(a, b) + torus_distance(b, c) + 1e-12


def test_point_arithmetic():
    a = TorusPoint((0.4, 0.0, 0.0))
    b = TorusPoint((0.3, 0.0, 0.0))
    assert (a + b).coords == pytest.approx((-0.3, 0.0, 0.0))
    assert (a - b).coords == pytest.approx((0.1, 0.0, 0.0))
    assert (-a).coords == pytest.approx((-0.4, 0.0, 0.0))
    assert a.norm() == pytest.approx(0.4)
    assert ORIGIN.norm() == 0.0


def test_minimal_image_boundary_tie():
    v = minimal_image(np.array([0.5, 0.5, 0.5]))
    assert np.linalg.norm(v) == pytest.approx(MAX_DISTANCE)


def test_pairwise_matrix():
    pts = np.array([[0.45, 0, 0], [-0.45, 0, 0], [0, 0.2, 0]])
    d = pairwise_torus_distances(pts)
    assert d[0, 1] == pytest.approx(0.1)
    assert np.allclose(d, d.T) and np.all(np.diag(d) == 0)


def test_wrap_array_keeps_shape():
    x = np.random.default_rng(0).uniform(-3, 3, (4, 5, 3))
    w = wrap_array(x)
    assert w.shape == x.shape
    assert np.allclose(np.round(x - w), x - w)
