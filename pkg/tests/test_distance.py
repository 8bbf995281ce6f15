import warnings

import numpy as np
import pytest

from anisohardy.distance import (DomainShape, domain_from_record, eikonal_check,
                                 finsler_p_laplacian, superharmonicity_check)
from anisohardy.errors import InvalidParameters, RidgeProximityWarning
from anisohardy.fields import ScalarField


def test_wulff_ball_distance_is_R_minus_h0(any_gauge):
    g, h0 = any_gauge
    dom = DomainShape("wulff-ball", g, h0, R=2.0)
    x = np.random.default_rng(0).standard_normal((6, g.dim))
    x *= (1.3 * np.random.default_rng(1).uniform(0.1, 1, 6) / h0.value(x))[:, None]
    exact = 2.0 - h0.value(x)
    np.testing.assert_allclose(dom.distance(x), exact, atol=1e-12)
    np.testing.assert_allclose(dom.numeric_distance(x, n_samples=4000), exact, atol=1e-9)


def test_polytope_distance_uses_face_gauge(lq2):
    g, h0 = lq2
    dom = DomainShape("cube", g, h0, side=2.0)
    x = np.array([[0.0, 0.9]])
    # distance to the face x_2 = 1 is (1 - x_2) / H(e_2)
    assert dom.distance(x)[0] == pytest.approx(0.1 / g.value(np.array([0.0, 1.0])))
    np.testing.assert_allclose(dom.numeric_distance(x), dom.distance(x), atol=1e-10)


def test_halfspace_constant(any_gauge):
    g, h0 = any_gauge
    dom = DomainShape("half-space", g, h0)
    assert dom.halfspace_constant() == pytest.approx(dom.halfspace_constant("closed"), abs=1e-12)


def test_inradius_of_cube_and_polytope(lq3):
    g, h0 = lq3
    cube = DomainShape("cube", g, h0, side=2.0)
    poly = domain_from_record({"kind": "polytope",
                               "halfspaces": np.c_[np.r_[np.eye(3), -np.eye(3)], np.ones(6)]}, g, h0)
    assert cube.inradius() == pytest.approx(poly.inradius())
    assert cube.inradius() == pytest.approx(1 / g.value(np.eye(3)).max())


@pytest.mark.parametrize("kind", ["wulff-ball", "half-space", "cube"])
def test_eikonal_and_superharmonicity(kind, any_gauge):
    g, h0 = any_gauge
    dom = DomainShape(kind, g, h0, R=1.0, side=2.0)
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.5, 0.5, (40, g.dim))
    if kind == "half-space":
        x[:, -1] = np.abs(x[:, -1]) + 0.1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RidgeProximityWarning)
        ek = eikonal_check(dom, x)
    assert ek.passed, ek.summary_lines()
    sh = superharmonicity_check(dom, p=2.0, grid_resolution=12)
    assert sh.passed, sh.summary_lines()


def test_ridge_samples_are_flagged(euc2):
    g, h0 = euc2
    dom = DomainShape("cube", g, h0, side=2.0)
    with pytest.warns(RidgeProximityWarning):
        rep = eikonal_check(dom, np.array([[0.5, 0.5], [0.0, 0.3]]))
    assert rep.notes["ridge_flagged"] >= 1


def test_p_laplacian_of_quadratic(euc3):
    g, _ = euc3
    u = ScalarField(lambda x: 0.5 * np.sum(x ** 2, -1), lambda x: np.array(x, dtype=float))
    assert finsler_p_laplacian(g, u, 2, np.array([0.3, 0.2, 0.5])) == pytest.approx(3.0, abs=1e-8)


def test_wulff_ball_superharmonicity_value(lq2):
    g, h0 = lq2
    rep = superharmonicity_check(DomainShape("wulff-ball", g, h0, R=1.0), p=2.0)
    assert rep.notes["max_rel_dev_from_(N-1)/H0"] < 1e-6


def test_invalid_domains(euc2):
    g, h0 = euc2
    with pytest.raises(InvalidParameters):
        DomainShape("sphere", g, h0)
    with pytest.raises(InvalidParameters):
        DomainShape("wulff-ball", g, h0, R=-1.0)
