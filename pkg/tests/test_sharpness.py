import numpy as np
import pytest

from anisohardy.errors import GeometryViolation, InadmissibleAlpha, SweepDivergence
from anisohardy.sharpness import (DEFAULT_ALPHAS, SharpnessProbe, build_critical_family,
                                  critical_exponent, fit_decay, halfspace_oracle_quotient,
                                  non_attainment_report, radial_family_quotient, sharp_constant,
                                  sweep, virtual_extremal_energy)


def test_critical_exponents():
    assert critical_exponent("subcritical", 2, 3) == pytest.approx(0.5)
    assert critical_exponent("critical", 2, 2) == pytest.approx(0.5)
    assert critical_exponent("halfspace", 2, 2) == pytest.approx(0.5)
    assert sharp_constant("critical", 2, 2) == pytest.approx(0.25)


@pytest.mark.parametrize("target, N, gap", [("subcritical", 3, 0.02), ("critical", 2, 0.03),
                                            ("halfspace", 2, 0.03)])
def test_sweeps_converge_and_match_oracles(target, N, gap, lq2, lq3):
    g, h0 = lq3 if N == 3 else lq2
    probe = SharpnessProbe(target, g, DEFAULT_ALPHAS[target], p=2, N=N, h0=h0)
    rep = sweep(probe, final_gap=gap)
    assert rep.passed, rep.summary_lines()
    a = probe.alphas[-1]
    if target == "halfspace":
        ref = halfspace_oracle_quotient(2, a)
    else:
        ref = radial_family_quotient(target, 2, N, a, probe.delta, probe.R)
    assert probe.quotients[-1] == pytest.approx(ref, rel=1e-8)
    assert all(q >= probe.constant for q in probe.quotients)


def test_probe_validates_alphas(euc3):
    g, h0 = euc3
    with pytest.raises(InadmissibleAlpha):
        SharpnessProbe("subcritical", g, (0.3, 0.6), p=2, h0=h0)
    with pytest.raises(InadmissibleAlpha):
        SharpnessProbe("subcritical", g, (0.45, 0.3), p=2, h0=h0)


def test_strict_sweep_detects_divergence(euc3, monkeypatch):
    g, h0 = euc3
    probe = SharpnessProbe("subcritical", g, (0.3, 0.4), p=2, h0=h0)
    real = SharpnessProbe.evaluate
    calls = []

    def rising(self, a):
        r = real(self, a)
        calls.append(a)
        if len(calls) == 2:
            r.quotient += 1.0
        return r

    monkeypatch.setattr(SharpnessProbe, "evaluate", rising)
    with pytest.raises(SweepDivergence):
        sweep(probe)


def test_critical_family_geometry(euc2):
    g, h0 = euc2
    with pytest.raises(GeometryViolation):
        build_critical_family(g, 2, R=1.0, delta=0.6, alpha=0.3, h0=h0)


def test_decay_fit_recovers_rate():
    gaps = np.array([0.2, 0.1, 0.05, 0.01])
    fit = fit_decay(gaps, 3.0 * gaps ** 1.5)
    assert fit.rate == pytest.approx(1.5)
    assert fit.prefactor == pytest.approx(3.0)


def test_non_attainment(euc3):
    g, _ = euc3
    rep = non_attainment_report("subcritical", g, 2, 3, [0.3, 0.4])
    assert rep.passed
    e = [virtual_extremal_energy("critical", 2, 2, c) for c in (1e-2, 1e-8, 1e-32)]
    assert e[0] < e[1] < e[2]
