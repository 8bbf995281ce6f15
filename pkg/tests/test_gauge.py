import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from anisohardy.errors import InvalidParameters, NoAnalyticDual, SingularPoint
from anisohardy.gauge import (Gauge, gauge_from_record, identity_residuals, make_gauge, polar,
                              schwarz_gap)

vec2 = arrays(np.float64, 2, elements=st.floats(-10, 10)).filter(lambda v: np.abs(v).max() > 1e-3)


def test_identities_hold_for_every_family(any_gauge):
    g, h0 = any_gauge
    x = np.random.default_rng(0).standard_normal((500, g.dim))
    res = identity_residuals(g, h0, x)
    assert max(res.values()) < 1e-8, res


def test_euclidean_polar_is_euclidean(euc2):
    g, h0 = euc2
    x = np.array([[3.0, 4.0], [-1.0, 0.5]])
    np.testing.assert_allclose(h0.value(x), np.linalg.norm(x, axis=1))


def test_ellipsoidal_polar_uses_inverse_matrix():
    A = np.diag([4.0, 1.0])
    h0 = polar(make_gauge("ellipsoidal", 2, matrix=A))
    # H0(x) = sqrt(x . A^-1 x)
    assert h0.value(np.array([2.0, 0.0])) == pytest.approx(1.0)
    assert h0.value(np.array([0.0, 2.0])) == pytest.approx(2.0)


def test_numeric_polar_matches_analytic(lq2):
    g, h0 = lq2
    hn = polar(g, "numeric")
    x = np.random.default_rng(1).standard_normal((20, 2))
    np.testing.assert_allclose(hn.value(x), h0.value(x), rtol=1e-9)


def test_custom_gauge_has_no_analytic_polar():
    g = Gauge("custom", 2, func=lambda xi: np.linalg.norm(xi, axis=-1))
    with pytest.raises(NoAnalyticDual):
        polar(g)


def test_norm_equivalence_bounds(any_gauge):
    g, _ = any_gauge
    d = np.random.default_rng(2).standard_normal((4000, g.dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    v = g.value(d)
    assert v.min() >= g.alpha * (1 - 1e-9)
    assert v.max() <= g.beta * (1 + 1e-9)


@pytest.mark.parametrize("kw", [dict(family="weighted-lq", dim=2, q=1.0),
                                dict(family="weighted-lq", dim=2, weights=[1, -1]),
                                dict(family="ellipsoidal", dim=2, matrix=[[1, 2], [2, 1]]),
                                dict(family="euclidean", dim=1),
                                dict(family="nope", dim=2)])
def test_invalid_gauges_rejected(kw):
    with pytest.raises(InvalidParameters):
        make_gauge(kw.pop("family"), kw.pop("dim"), **kw)


def test_record_round_trip(lq3):
    g, _ = lq3
    g2 = gauge_from_record(g.record())
    x = np.random.default_rng(3).standard_normal((10, 3))
    np.testing.assert_array_equal(g.value(x), g2.value(x))


def test_record_dimension_conflict():
    with pytest.raises(InvalidParameters):
        gauge_from_record({"family": "euclidean", "dimension": 2}, dim=3)


def test_identity_residuals_reject_origin(euc2):
    g, h0 = euc2
    with pytest.raises(SingularPoint):
        identity_residuals(g, h0, np.zeros((1, 2)))


@settings(max_examples=60, deadline=None)
@given(xi=vec2, x=vec2, t=st.floats(0.01, 100))
def test_schwarz_and_homogeneity(xi, x, t):
    g = make_gauge("weighted-lq", 2, q=3, weights=[1.0, 2.0])
    h0 = polar(g)
    assert schwarz_gap(g, h0, xi, x) >= -1e-9 * (1 + np.abs(xi).max() * np.abs(x).max())
    assert g.value(t * xi) == pytest.approx(t * g.value(xi), rel=1e-12)
    assert g.value(-xi) == pytest.approx(g.value(xi), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=vec2, b=vec2)
def test_triangle_inequality(a, b):
    g = make_gauge("ellipsoidal", 2, matrix=[[4.0, 1.0], [1.0, 1.0]])
    assert g.value(a + b) <= g.value(a) + g.value(b) + 1e-12
