import numpy as np
import pytest

from anisohardy.errors import BoundaryViolation, InvalidParameters
from anisohardy.fields import bump_profile, corpus_field, gaussian_profile, plateau_profile
from anisohardy.hardy import HardyFunctional, critical_quotient, subcritical_quotient
from anisohardy.transform import (BridgeParams, bridge_identity_check, bridge_map, critical_scale,
                                  inverse_power_map, jacobian_check, power_map, pushforward_volume,
                                  scaling_correspondence_check, subcritical_scale)


def test_power_map_round_trip(lq3):
    _, h0 = lq3
    y = np.random.default_rng(0).standard_normal((20, 3))
    np.testing.assert_allclose(inverse_power_map(2.0, 0.7, h0, power_map(2.0, 0.7, h0, y)), y,
                               rtol=1e-12)


def test_jacobian_formula(any_gauge):
    _, h0 = any_gauge
    rep = jacobian_check(h0, n=30)
    assert rep.passed, rep.summary_lines()


def test_pushforward_volume(lq2):
    _, h0 = lq2
    est, se, exact = pushforward_volume(1.5, 0.5, h0, n=100_000)
    assert abs(est - exact) < max(4 * se, 0.01 * exact)


@pytest.mark.parametrize("lam", [0.25, 0.5, 2.0, 4.0])
def test_subcritical_scaling_invariance(lam, lq3):
    g, h0 = lq3
    F = HardyFunctional("subcritical", 2, 3, g, h0=h0)
    for name in ("bump", "tilted_bump"):
        u = corpus_field(name, h0)
        q0 = subcritical_quotient(u, F).quotient
        assert subcritical_quotient(subcritical_scale(u, lam, 2, 3), F).quotient == pytest.approx(q0, abs=1e-8)


@pytest.mark.parametrize("lam", [0.25, 2.0, 4.0])
def test_critical_scaling_invariance(lam, lq2):
    g, h0 = lq2
    F = HardyFunctional("critical", 2, 2, g, R=1.0, h0=h0)
    for name, kw in (("plateau", dict(r0=0.3, r1=0.8)), ("tilted_bump", dict(radius=0.9))):
        u = corpus_field(name, h0, **kw)
        q0 = critical_quotient(u, F).quotient
        q = critical_quotient(critical_scale(u, lam, 2, 1.0, h0), F).quotient
        assert q == pytest.approx(q0, abs=1e-7)


@pytest.mark.parametrize("m, N", [(3, 2), (4, 3)])
def test_bridge_identity(m, N, lq2, lq3):
    _, h0 = lq2 if N == 2 else lq3
    P = BridgeParams(m, N, 1.0)
    rep = bridge_identity_check(plateau_profile(0.3, 0.8), P, h0)
    assert rep.passed, rep.summary_lines()


def test_bridge_round_trip_and_correspondence():
    P = BridgeParams(4, 2, 1.0)
    w = bump_profile(0.9)
    u = bridge_map(w, "critical->subcritical", P)
    back = bridge_map(u, "subcritical->critical", P)
    s = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(back.value(s), w.value(s), atol=1e-13)
    rep = scaling_correspondence_check(u, P, 2.0, np.geomspace(0.05, 20, 40))
    assert rep.passed


def test_bridge_validation():
    with pytest.raises(InvalidParameters):
        BridgeParams(2, 2)
    with pytest.raises(BoundaryViolation):
        bridge_map(gaussian_profile(), "critical->subcritical", BridgeParams(3, 2))
    assert BridgeParams(5, 3).alpha == pytest.approx(1.0)
