import numpy as np
import pytest

from anisohardy.errors import InvalidParameters
from anisohardy.fields import (CORPUS_NAMES, Core, RadialProfile, ScalarField, Support,
                               corpus_field, dilate, lift_radial, scale_values,
                               truncated_log_power_profile, truncated_power_profile)


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_corpus_gradients_match_finite_differences(name, lq3):
    _, h0 = lq3
    u = corpus_field(name, h0)
    rng = np.random.default_rng(5)
    x = rng.uniform(-1.5, 1.5, (200, 3))
    # stay away from the kinks of the tapered profiles
    r = h0.value(x)
    bps = [0.5, 1.0, 2.0, 0.25]
    x = x[np.min(np.abs(r[:, None] - np.array(bps)[None]), axis=1) > 1e-3]
    err, ok = u.check_gradient(x, rel_tol=1e-4)
    assert ok, err


def test_corpus_size_and_unknown_name(euc2):
    _, h0 = euc2
    assert len(CORPUS_NAMES) >= 8
    with pytest.raises(InvalidParameters):
        corpus_field("nope", h0)


def test_lifted_field_is_h0_radial(lq2):
    _, h0 = lq2
    u = corpus_field("bump", h0)
    x = np.random.default_rng(0).standard_normal((50, 2))
    np.testing.assert_allclose(u.value(x), u.profile.value(h0.value(x)))


def test_polar_eval_agrees_with_value(lq2):
    _, h0 = lq2
    for name in ("tilted_bump", "x1_bump", "offcenter_bump"):
        u = corpus_field(name, h0)
        rays = np.random.default_rng(1).standard_normal((7, 2))
        rays /= h0.value(rays)[:, None]
        r = np.linspace(0.05, 1.2, 9)
        uu, du, _ = u.polar_eval(rays, r, need_grad=True)
        x = r[None, :, None] * rays[:, None, :]
        np.testing.assert_allclose(uu, u.value(x), atol=1e-14)
        # du is the derivative along the ray
        np.testing.assert_allclose(du, np.sum(u.grad(x) * rays[:, None, :], -1), atol=1e-12)


def test_profiles_and_cores():
    p = truncated_power_profile(0.3, 0.5)
    assert p.core == Core("power", 0.3, 0.5)
    r = np.array([0.1, 0.4])
    np.testing.assert_allclose(p.value(r), r ** -0.3)
    lp = truncated_log_power_profile(0.25, 1.0)
    np.testing.assert_allclose(lp.value(r[:1]), np.log(10.0) ** 0.25)
    err, ok = lp.check_derivative(np.array([0.1, 0.2, 0.3, 0.45]))
    assert ok, err


def test_wrappers(euc2):
    _, h0 = euc2
    u = corpus_field("bump", h0)
    x = np.array([[0.2, 0.1], [0.5, -0.3]])
    np.testing.assert_allclose(scale_values(u, 3.0).value(x), 3 * u.value(x))
    d = dilate(u, 2.0)
    np.testing.assert_allclose(d.value(x), u.value(2 * x))
    np.testing.assert_allclose(d.grad(x), 2 * u.grad(2 * x))


def test_support_geometry(lq2):
    _, h0 = lq2
    s = Support("box", lo=(0.1, 0.2), hi=(0.5, 0.6))
    assert not s.contains_origin()
    rmin, rmax = s.radial_extent(h0)
    corners = np.array([[0.1, 0.2], [0.1, 0.6], [0.5, 0.2], [0.5, 0.6]])
    assert rmax == pytest.approx(h0.value(corners).max())
    assert 0 < rmin <= h0.value(np.array([0.1, 0.2]))
    assert Support("wulff", inner=0.0, outer=1.0).contains_origin()


def test_scalar_field_fd_gradient_fallback():
    u = ScalarField(lambda x: np.sum(np.asarray(x) ** 2, -1), dim=2)
    assert not u.has_analytic_grad
    np.testing.assert_allclose(u.grad(np.array([[1.0, 2.0]])), [[2.0, 4.0]], rtol=1e-6)


def test_lift_radial_names(euc2):
    _, h0 = euc2
    prof = RadialProfile(lambda r: 1 - r, lambda r: -np.ones_like(r), R=1.0, name="cone")
    assert lift_radial(prof, h0).name == "cone"


def test_pointwise_bound_constant_is_sharp():
    from anisohardy.fields import RadialProfile, radial_pointwise_bounds
    # N=4, p=2: U = r^-2 - R^-2 makes the Hoelder step an equality up to the r/R tail
    R = 100.0
    U = RadialProfile(lambda r: r ** -2.0 - R ** -2.0, lambda r: -2.0 * r ** -3.0, R=R)
    rep = radial_pointwise_bounds(U, 2.0, 4, R, [1.0])
    assert rep.passed
    lhs, rhs = rep.notes["lhs@r=1"], rep.notes["rhs@r=1"]
    assert lhs / rhs == pytest.approx(np.sqrt(1 - 1e-4), rel=1e-8)


def test_pointwise_bound_critical_log_profile():
    from anisohardy.fields import RadialProfile, radial_pointwise_bounds
    U = RadialProfile(lambda r: np.log(1.0 / r), lambda r: -1.0 / r, R=1.0)
    rep = radial_pointwise_bounds(U, 2.0, 2, 1.0, [0.01, 0.1, 0.5])
    assert rep.passed
    # log(R/r) is the Hoelder equality case: slack vanishes
    assert max(abs(r.value) for r in rep.rows) < 1e-8
