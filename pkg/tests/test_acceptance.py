"""End-to-end acceptance checks, one test per criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import time

import numpy as np
import pytest

from anisohardy.cli import main
from anisohardy.config import default_config
from anisohardy.distance import DomainShape, eikonal_check, superharmonicity_check
from anisohardy.fields import bump_profile, corpus_field, plateau_profile
from anisohardy.gauge import identity_residuals, make_gauge, polar
from anisohardy.hardy import (HardyFunctional, critical_quotient, eigen_lower_bound,
                              subcritical_quotient, uncertainty_product)
from anisohardy.sharpness import DEFAULT_ALPHAS, SharpnessProbe, sweep
from anisohardy.suites import RADIAL, SuiteContext, inner_corpus, run_suite
from anisohardy.transform import (BridgeParams, bridge_identity_check, bridge_map, critical_scale,
                                  jacobian_check, pushforward_volume, scaling_correspondence_check,
                                  subcritical_scale)

criterion = pytest.mark.criterion

LQ = {2: [1.0, 2.0], 3: [1.0, 2.0, 0.5]}


def _pair(family, dim):
    if family == "ellipsoidal":
        g = make_gauge("ellipsoidal", 2, matrix=np.diag([4.0, 1.0]))
    elif family == "weighted-lq":
        g = make_gauge("weighted-lq", dim, q=3, weights=LQ[dim])
    else:
        g = make_gauge("euclidean", dim)
    return g, polar(g)


@criterion(1, "gauge identities below 1e-8 at 1000 points in under 1 s")
def test_identity_residuals():
    cases = [("euclidean", 2), ("euclidean", 3), ("ellipsoidal", 2), ("weighted-lq", 2),
             ("weighted-lq", 3)]
    pairs = [_pair(f, d) for f, d in cases]
    rng = np.random.default_rng(1)
    for (f, d), (g, h0) in zip(cases, pairs):
        x = rng.standard_normal((1000, d)) * rng.uniform(0.1, 10.0, (1000, 1))
        t0 = time.perf_counter()
        res = identity_residuals(g, h0, x)
        dt = time.perf_counter() - t0
        assert max(res.values()) < 1e-8, (f, d, res)
        assert dt < 1.0, (f, d, dt)


@criterion(2, "Hardy quotients never fall below their constants over the corpus, under 30 s")
def test_inequality_corpus():
    cfg = default_config()
    ctx = SuiteContext(cfg)
    t0 = time.perf_counter()
    reports = [run_suite(s, cfg, ctx)
               for s in ("subcritical", "critical", "geometric", "weighted", "uncertainty")]
    dt = time.perf_counter() - t0
    rows = [r for rep in reports for r in rep.rows if r.relation == "ge"]
    fields = {r.check_id.split(":")[-2] for r in reports[0].rows if r.check_id.endswith(":quotient")}
    assert len(fields) >= 8
    assert rows and all(r.value >= r.reference - 1e-6 for r in rows), \
        [r.check_id for r in rows if not r.passed]
    assert dt < 30.0, dt


@criterion(3, "sharpness sweeps reach the sharp constants, each under 20 s")
@pytest.mark.parametrize("target, N, p, gap", [("subcritical", 3, 2.0, 0.02),
                                               ("critical", 2, 2.0, 0.03),
                                               ("halfspace", 2, 2.0, 0.03)])
def test_sharpness(target, N, p, gap):
    g, h0 = _pair("euclidean", N)
    probe = SharpnessProbe(target, g, DEFAULT_ALPHAS[target], p=p, N=N, R=1.0, h0=h0)
    t0 = time.perf_counter()
    rep = sweep(probe, final_gap=gap)
    dt = time.perf_counter() - t0
    assert rep.passed, rep.summary_lines()
    assert abs(probe.quotients[-1] - probe.constant) <= gap
    if target == "subcritical":
        assert probe.constant == pytest.approx(0.25)
    assert dt < 20.0


@criterion(4, "p = 1 quotient equals N - 1 for radially decreasing fields")
@pytest.mark.parametrize("family", ["euclidean", "weighted-lq"])
@pytest.mark.parametrize("N", [2, 3])
def test_p1_attainment(family, N):
    g, h0 = _pair(family, N)
    F = HardyFunctional("subcritical", 1, N, g, h0=h0)
    for name in ("bump", "decreasing_linear", "paraboloid", "plateau"):
        q = subcritical_quotient(corpus_field(name, h0), F).quotient
        assert abs(q - (N - 1)) < 1e-8, (name, q)


@criterion(5, "the Gaussian saturates the uncertainty principle")
def test_uncertainty_gaussian():
    g, h0 = _pair("euclidean", 2)
    r = uncertainty_product(corpus_field("gaussian", h0), HardyFunctional("uncertainty", 2, 2, g, h0=h0))
    assert abs(r.quotient / r.bound - 1.0) < 1e-3


@criterion(6, "power-map Jacobian and Monte Carlo image volume")
@pytest.mark.parametrize("family, N", [("euclidean", 2), ("weighted-lq", 3), ("ellipsoidal", 2)])
def test_jacobian(family, N):
    _, h0 = _pair(family, N)
    rep = jacobian_check(h0, n=100)
    assert rep.row("det_rel_err").value < 1e-6
    for c, a in ((1.0, 0.0), (2.0, 1.0), (0.5, -0.5)):
        est, _, exact = pushforward_volume(c, a, h0, n=200_000)
        assert abs(est - exact) <= 0.01 * exact


LAMBDAS = (0.25, 0.5, 2.0, 4.0)


@criterion(7, "quotients invariant under both scalings")
@pytest.mark.parametrize("N", [2, 3])
def test_scaling_invariance(N):
    g, h0 = _pair("weighted-lq", N)
    p = 1.5
    F = HardyFunctional("subcritical", p, N, g, h0=h0)
    for name in RADIAL:
        u = corpus_field(name, h0)
        q0 = subcritical_quotient(u, F).quotient
        for lam in LAMBDAS:
            q = subcritical_quotient(subcritical_scale(u, lam, p, N), F).quotient
            assert abs(q - q0) < 1e-6, (name, lam)
    Fc = HardyFunctional("critical", N, N, g, R=1.0, h0=h0)
    for name, u in inner_corpus(h0, 1.0):
        if name not in RADIAL:
            continue
        q0 = critical_quotient(u, Fc).quotient
        for lam in LAMBDAS:
            q = critical_quotient(critical_scale(u, lam, N, 1.0, h0), Fc).quotient
            assert abs(q - q0) < 1e-6, (name, lam)


@criterion(8, "bridge identity between critical and subcritical deficits")
@pytest.mark.parametrize("m, N", [(3, 2), (4, 2), (4, 3), (5, 3)])
def test_bridge(m, N):
    _, h0 = _pair("weighted-lq", N)
    P = BridgeParams(m, N, 1.0)
    for w in (bump_profile(0.9), plateau_profile(0.3, 0.8)):
        rep = bridge_identity_check(w, P, h0, tol=1e-6)
        assert rep.passed, rep.summary_lines()
    u = bridge_map(bump_profile(0.9), "critical->subcritical", P)
    for lam in LAMBDAS:
        rep = scaling_correspondence_check(u, P, lam, np.geomspace(0.05, 20.0, 64), tol=1e-10)
        assert rep.passed, rep.summary_lines()


@criterion(9, "anisotropic distance geometry and the eigenvalue bound")
@pytest.mark.parametrize("family, N", [("euclidean", 2), ("weighted-lq", 2), ("weighted-lq", 3)])
def test_geometry(family, N):
    g, h0 = _pair(family, N)
    rng = np.random.default_rng(7)
    ball = DomainShape("wulff-ball", g, h0, R=1.0)
    x = rng.uniform(-0.6, 0.6, (50, N))
    x = x[h0.value(x) < 0.95]
    err = np.abs(ball.numeric_distance(x) - (1.0 - h0.value(x)))
    assert err.max() < 1e-9
    assert eikonal_check(ball, x[h0.value(x) > 0.05]).passed
    for kind in ("half-space", "wulff-ball", "cube"):
        dom = DomainShape(kind, g, h0, R=1.0, side=2.0)
        rep = superharmonicity_check(dom, p=2.0, grid_resolution=12)
        assert rep.passed, (kind, rep.summary_lines())
    if family == "euclidean":
        F = HardyFunctional("geometric", 2.0, N, g, domain=ball, h0=h0)
        eb = eigen_lower_bound(F, ball, trial=corpus_field("paraboloid", h0, radius=1.0))
        assert eb.bound <= eb.rayleigh


@criterion(10, "two full runs produce byte-identical CSV")
def test_reproducible_csv(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--suite", "all", "--out", str(a)]) == 0
    assert main(["run", "--suite", "all", "--out", str(b)]) == 0
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
