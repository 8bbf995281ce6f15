import numpy as np
import pytest
from conftest import gauge_zoo
from scipy.integrate import quad

from anisohardy.distance import DomainShape
from anisohardy.errors import AdmissibilityViolation, InvalidParameters, SupportViolation
from anisohardy.gauge import polar
from anisohardy.fields import RadialProfile, corpus_field, lift_radial
from anisohardy.hardy import (HardyFunctional, critical_quotient, eigen_lower_bound, evaluate,
                              geometric_quotient, geometric_quotients, subcritical_quotient,
                              uncertainty_product, weighted_quotient)


def radial_oracle(profile, num_w, den_w, p, lo=0.0):
    """1-D adaptive quadrature of the radial form of a quotient."""
    hi = profile.R
    pts = list(profile.breakpoints)
    num = quad(lambda s: abs(profile.deriv(s)) ** p * num_w(s), lo, hi, points=pts or None,
               epsabs=0, epsrel=1e-13, limit=500)[0]
    den = quad(lambda s: abs(profile.value(s)) ** p * den_w(s), lo, hi, points=pts or None,
               epsabs=0, epsrel=1e-13, limit=500)[0]
    return num / den


@pytest.mark.parametrize("name", ["bump", "paraboloid", "plateau", "gaussian", "annulus_bump"])
@pytest.mark.parametrize("p", [1.5, 2.5])
def test_subcritical_matches_radial_oracle(name, p, lq3):
    g, h0 = lq3
    u = corpus_field(name, h0)
    F = HardyFunctional("subcritical", p, 3, g, h0=h0)
    q = subcritical_quotient(u, F).quotient
    lo = u.profile.inner or 0.0
    ref = radial_oracle(u.profile, lambda s: s ** 2, lambda s: s ** (2 - p), p, lo)
    assert q == pytest.approx(ref, rel=1e-8)


def test_critical_matches_radial_oracle(lq2):
    g, h0 = lq2
    u = corpus_field("annulus_bump", h0, r1=0.3, r2=0.9)
    F = HardyFunctional("critical", 2, 2, g, R=1.0, h0=h0)
    ref = radial_oracle(u.profile, lambda s: s, lambda s: 1 / (s * np.log(1 / s) ** 2), 2, 0.3)
    assert critical_quotient(u, F).quotient == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("gname", sorted(gauge_zoo()))
@pytest.mark.parametrize("name", ["bump", "decreasing_linear", "truncated_power"])
def test_p1_attainment(gname, name):
    g = gauge_zoo()[gname]
    h0 = polar(g)
    N = g.dim
    F = HardyFunctional("subcritical", 1, N, g, h0=h0)
    assert subcritical_quotient(corpus_field(name, h0), F).quotient == pytest.approx(N - 1, abs=1e-8)


def test_nonradial_fields_exceed_constant(lq3):
    g, h0 = lq3
    F = HardyFunctional("subcritical", 2, 3, g, h0=h0)
    for name in ("tilted_bump", "x1_bump", "offcenter_bump"):
        r = subcritical_quotient(corpus_field(name, h0), F)
        assert r.quotient >= r.bound
        assert r.passed()


def test_uncertainty_gaussian_is_extremal(lq2):
    g, h0 = lq2
    F = HardyFunctional("uncertainty", 2, 2, g, h0=h0)
    r = uncertainty_product(corpus_field("gaussian", h0), F)
    assert r.quotient / r.bound == pytest.approx(1.0, abs=1e-9)
    assert uncertainty_product(corpus_field("bump", h0), F).quotient > r.bound


def test_weighted_reduces_to_subcritical(lq3):
    g, h0 = lq3
    u = corpus_field("annulus_bump", h0)
    w = weighted_quotient(u, HardyFunctional("weighted", 2, 3, g, alpha=-2, h0=h0))
    s = subcritical_quotient(u, HardyFunctional("subcritical", 2, 3, g, h0=h0))
    assert w.quotient == pytest.approx(s.quotient, rel=1e-12)
    assert w.bound == pytest.approx(s.bound)


def test_weighted_needs_support_away_from_origin(lq2):
    g, h0 = lq2
    with pytest.raises(SupportViolation):
        weighted_quotient(corpus_field("bump", h0), HardyFunctional("weighted", 2, 2, g, alpha=1, h0=h0))


@pytest.mark.parametrize("kw, err", [
    (dict(kind="subcritical", p=2, N=2), AdmissibilityViolation),
    (dict(kind="critical", p=2, N=2), AdmissibilityViolation),
    (dict(kind="critical", p=3, N=2, R=1.0), AdmissibilityViolation),
    (dict(kind="weighted", p=2, N=2, alpha=-2), AdmissibilityViolation),
    (dict(kind="uncertainty", p=3, N=2), AdmissibilityViolation),
    (dict(kind="geometric", p=1, N=2), AdmissibilityViolation),
    (dict(kind="nope", p=2, N=2), InvalidParameters),
    (dict(kind="subcritical", p=2, N=3), InvalidParameters),
])
def test_admissibility(kw, err, lq2):
    g, h0 = lq2
    with pytest.raises(err):
        HardyFunctional(gauge=g, h0=h0, **kw)


def test_sharp_constants(lq2):
    g, h0 = lq2
    assert HardyFunctional("subcritical", 4, 2, g).sharp_constant == pytest.approx(0.0625)
    assert HardyFunctional("critical", 2, 2, g, R=1).sharp_constant == pytest.approx(0.25)
    assert HardyFunctional("weighted", 2, 2, g, alpha=1).sharp_constant == pytest.approx(2.25)
    assert HardyFunctional("uncertainty", 2, 2, g).sharp_constant == pytest.approx(1.0)


def test_critical_rejects_support_reaching_boundary(lq2):
    g, h0 = lq2
    F = HardyFunctional("critical", 2, 2, g, R=1.0, h0=h0)
    with pytest.raises(SupportViolation):
        critical_quotient(corpus_field("bump", h0), F)


def test_field_jumping_at_support_edge_is_rejected(euc2):
    g, h0 = euc2
    jump = RadialProfile(lambda r: np.exp(-r ** 2), lambda r: -2 * r * np.exp(-r ** 2), R=0.9,
                         name="cut_gaussian")
    F = HardyFunctional("critical", 2, 2, g, R=1.0, h0=h0)
    with pytest.raises(SupportViolation):
        critical_quotient(lift_radial(jump, h0), F)


@pytest.mark.parametrize("kind", ["wulff-ball", "cube", "half-space"])
def test_geometric_quotient_above_constant(kind, lq2):
    g, h0 = lq2
    dom = DomainShape(kind, g, h0, R=1.0, side=2.0)
    if kind == "wulff-ball":
        u = corpus_field("bump", h0, radius=0.8)
    else:
        u = corpus_field("offcenter_bump", h0, center=np.array([0.1, 0.5]), radius=0.3)
    F = HardyFunctional("geometric", 2, 2, g, h0=h0, domain=dom)
    r = geometric_quotient(u, F)
    assert r.quotient >= r.bound
    both = geometric_quotients(u, F, [1.5, 2.0])
    assert both[1].quotient == r.quotient
    assert both[0].bound == pytest.approx((1 / 3) ** 1.5)


def test_geometric_wulff_ball_matches_oracle(euc2):
    g, h0 = euc2
    dom = DomainShape("wulff-ball", g, h0, R=1.0)
    u = corpus_field("bump", h0, radius=0.8)
    F = HardyFunctional("geometric", 2, 2, g, h0=h0, domain=dom)
    ref = radial_oracle(u.profile, lambda s: s, lambda s: s / (1 - s) ** 2, 2)
    assert geometric_quotient(u, F).quotient == pytest.approx(ref, rel=1e-9)


def test_eigen_bound_below_rayleigh_quotient_on_disc(euc2):
    g, h0 = euc2
    dom = DomainShape("wulff-ball", g, h0, R=1.0)
    F = HardyFunctional("geometric", 2, 2, g, h0=h0, domain=dom)
    eb = eigen_lower_bound(F, dom, corpus_field("paraboloid", h0, radius=1.0 - 1e-9))
    assert eb.bound == pytest.approx(0.25)
    assert eb.consistent
    # paraboloid 1 - r^2 on the unit disc: Rayleigh quotient 6
    assert eb.rayleigh == pytest.approx(6.0, rel=1e-6)


def test_evaluate_dispatch(lq2):
    g, h0 = lq2
    F = HardyFunctional("subcritical", 1.5, 2, g, h0=h0)
    u = corpus_field("bump", h0)
    assert evaluate(u, F).quotient == subcritical_quotient(u, F).quotient
