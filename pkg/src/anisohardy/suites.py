"""Verification suites: each wires gauges, fields and evaluators into report rows.

Every suite is a function of an `ExperimentConfig` returning a list of
`ExperimentReport`.  Random samples come from generators seeded by the
config seed, and parallel work inside the evaluators uses order-stable
reductions, so a suite's rows are reproducible bit for bit.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .distance import (domain_from_record, eikonal_check,
                       superharmonicity_check)
from .errors import RidgeProximityWarning
from .fields import (corpus_field, box_bump, euclidean_ball_bump, face_profile_field,
                     bump_profile, plateau_profile, truncated_log_power_profile,
                     paraboloid_profile)
from .gauge import IDENTITY_IDS, identity_residuals, polar, schwarz_gap
from .hardy import (HardyFunctional, critical_quotient, eigen_lower_bound, geometric_quotients,
                    subcritical_quotient, uncertainty_product, weighted_quotient)
from .report import CheckRow, ExperimentReport
from .sharpness import TARGETS, SharpnessProbe, non_attainment_report, sweep
from .transform import (BridgeParams, bridge_identity_check, bridge_map, critical_scale,
                        jacobian_check, pushforward_volume, scaling_correspondence_check,
                        subcritical_scale)

INEQ_TOL = 1e-6
IDENTITY_TOL = 1e-8
P1_TOL = 1e-8
SCALING_TOL = 1e-6
BRIDGE_TOL = 1e-6
BRIDGE_POINTWISE_TOL = 1e-10
DISTANCE_TOL = 1e-9
EIKONAL_TOL = 1e-6
SUPERHARMONIC_TOL = 1e-4
UNCERTAINTY_TOL = 1e-3
VOLUME_RTOL = 0.01

# radially nonincreasing, nonnegative profiles
DECREASING = ("bump", "truncated_power", "truncated_log_power", "decreasing_linear", "plateau",
              "gaussian", "paraboloid")
RADIAL = DECREASING + ("annulus_bump",)
AWAY_FROM_ORIGIN = ("annulus_bump", "tilted_annulus", "offcenter_bump")
# exponents of the singular corpus fields r^(-a) and log(R/r)^a near the origin
POWER_CORE = 0.2
LOG_POWER_CORE = 0.25


def finite_energy(name, p, N):
    """Whether ``int |grad u|^p`` is finite for the named corpus field."""
    if name == "truncated_power":
        return (POWER_CORE + 1) * p < N
    if name == "truncated_log_power":
        # |U'|^p r^(N-1) ~ r^(N-1-p) log(1/r)^(p(a-1))
        return p < N or (p == N and p * (LOG_POWER_CORE - 1) < -1)
    return True


def _tag(x):
    return format(float(x), "g")


@dataclass
class SuiteContext:
    """Per-run caches of gauges and polars keyed by dimension."""

    config: object

    @cached_property
    def _gauges(self):
        return {}

    def gauge(self, dim):
        if dim not in self._gauges:
            g = self.config.gauge_for(dim)
            self._gauges[dim] = (g, polar(g))
        return self._gauges[dim][0]

    def h0(self, dim):
        self.gauge(dim)
        return self._gauges[dim][1]

    @property
    def res(self):
        return self.config.resolution

    def rng(self, salt):
        # one independent stream per (seed, purpose)
        return np.random.default_rng([self.config.seed, salt])


def inner_corpus(h0, R):
    """Corpus fields compactly supported inside the Wulff ball of radius R."""
    d = h0.dim
    c = np.zeros(d)
    c[0], c[1] = 0.35 * R, 0.15 * R
    specs = [
        ("bump", {"radius": 0.9 * R}),
        ("tilted_bump", {"radius": 0.9 * R}),
        ("x1_bump", {"radius": 0.9 * R}),
        ("truncated_log_power", {"a": LOG_POWER_CORE, "R": R}),
        ("annulus_bump", {"r1": 0.3 * R, "r2": 0.9 * R}),
        ("tilted_annulus", {"r1": 0.3 * R, "r2": 0.9 * R}),
        ("offcenter_bump", {"center": c, "radius": 0.3 * R}),
        ("decreasing_linear", {"radius": 0.9 * R}),
        ("plateau", {"r0": 0.3 * R, "r1": 0.8 * R}),
        ("paraboloid", {"radius": 0.9 * R}),
    ]
    out = []
    for name, kw in specs:
        u = corpus_field(name, h0, **kw)
        if u.support.radial_extent(h0)[1] < R:
            out.append((name, u))
    return out


def whole_corpus(h0, names):
    return [(n, corpus_field(n, h0)) for n in names]


# -- identities ------------------------------------------------------------------------

def suite_identities(cfg, ctx):
    rep = ExperimentReport("identities")
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        rng = ctx.rng(100 + N)
        x = rng.standard_normal((1000, N)) * rng.uniform(0.1, 10.0, (1000, 1))
        res = identity_residuals(g, h0, x, seed=cfg.seed)
        for key in IDENTITY_IDS:
            rep.add(CheckRow.close(f"N={N}:{key}", res[key], 0.0, IDENTITY_TOL, "STATED"))
        xi = rng.standard_normal((1000, N))
        gap = schwarz_gap(g, h0, xi, x)
        rep.add(CheckRow.at_least(f"N={N}:schwarz_min_gap", gap.min() / np.abs(gap).max(), 0.0,
                                  1e-12, "STATED"))
        # equality holds along x = grad H(xi)
        eq = schwarz_gap(g, h0, xi, g.grad(xi)) / g.value(xi)
        rep.add(CheckRow.close(f"N={N}:schwarz_equality", np.abs(eq).max(), 0.0, 1e-12, "STATED"))
    return [rep]


# -- Hardy functionals -------------------------------------------------------------------

def suite_subcritical(cfg, ctx):
    rep = ExperimentReport("subcritical")
    extra = []
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        fields = whole_corpus(h0, _corpus_names())
        for p in cfg.p:
            if p == N:
                continue
            F = HardyFunctional("subcritical", p, N, g, h0=h0, res=ctx.res)
            quotients = []
            for name, u in fields:
                if (p > N and name not in AWAY_FROM_ORIGIN) or not finite_energy(name, p, N):
                    continue
                r = subcritical_quotient(u, F)
                quotients.append(r.quotient)
                tag = f"N={N}:p={_tag(p)}:{name}"
                rep.add(CheckRow.at_least(f"{tag}:quotient", r.quotient, r.bound, INEQ_TOL, "STATED",
                                          r.quad_err))
                if p == 1 and name in DECREASING:
                    rep.add(CheckRow.close(f"{tag}:attained", r.quotient, N - 1, P1_TOL, "STATED",
                                           quad_err=r.quad_err))
            if 1 < p < N and quotients:
                nar = non_attainment_report("subcritical", g, p, N, quotients)
                extra.append(_retag(nar, "subcritical", f"N={N}:p={_tag(p)}:"))
    return [rep] + extra


def _retag(report, suite, prefix):
    out = ExperimentReport(suite, notes=report.notes)
    for r in report.rows:
        out.add(CheckRow(prefix + r.check_id, r.value, r.reference, r.provenance, r.tolerance,
                         r.relation, r.quad_err))
    return out


def _corpus_names():
    from .fields import CORPUS_NAMES
    return CORPUS_NAMES


def suite_critical(cfg, ctx):
    rep = ExperimentReport("critical")
    extra = []
    R = cfg.R
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        F = HardyFunctional("critical", N, N, g, R=R, h0=h0, res=ctx.res)
        quotients = []
        for name, u in inner_corpus(h0, R):
            r = critical_quotient(u, F)
            quotients.append(r.quotient)
            rep.add(CheckRow.at_least(f"N={N}:R={_tag(R)}:{name}:quotient", r.quotient, r.bound,
                                      INEQ_TOL, "STATED", r.quad_err))
        nar = non_attainment_report("critical", g, N, N, quotients, R=R)
        extra.append(_retag(nar, "critical", f"N={N}:"))
    return [rep] + extra


def suite_weighted(cfg, ctx):
    rep = ExperimentReport("weighted")
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        fields = whole_corpus(h0, AWAY_FROM_ORIGIN)
        for p in cfg.p:
            for a in cfg.weighted_alphas:
                F = HardyFunctional("weighted", p, N, g, alpha=a, h0=h0, res=ctx.res)
                for name, u in fields:
                    r = weighted_quotient(u, F)
                    rep.add(CheckRow.at_least(f"N={N}:p={_tag(p)}:alpha={_tag(a)}:{name}:quotient",
                                              r.quotient, r.bound, INEQ_TOL, "STATED", r.quad_err))
            # alpha = -p reproduces the subcritical functional
            if p < N:
                name, u = fields[0]
                w = weighted_quotient(u, HardyFunctional("weighted", p, N, g, alpha=-p, h0=h0,
                                                         res=ctx.res))
                s = subcritical_quotient(u, HardyFunctional("subcritical", p, N, g, h0=h0,
                                                            res=ctx.res))
                rep.add(CheckRow.close(f"N={N}:p={_tag(p)}:{name}:alpha=-p_matches_subcritical",
                                       w.quotient, s.quotient, 1e-10, "DERIVED", rel=True))
    return [rep]


def suite_uncertainty(cfg, ctx):
    rep = ExperimentReport("uncertainty")
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        F = HardyFunctional("uncertainty", 2, N, g, h0=h0, res=ctx.res)
        for name, u in whole_corpus(h0, _corpus_names()):
            if not finite_energy(name, 2, N):
                continue
            r = uncertainty_product(u, F)
            rep.add(CheckRow.at_least(f"N={N}:{name}:product", r.quotient, r.bound, INEQ_TOL,
                                      "STATED", r.quad_err))
            if name == "gaussian":
                rep.add(CheckRow.close(f"N={N}:gaussian:ratio_to_constant", r.quotient / r.bound,
                                       1.0, UNCERTAINTY_TOL, "STATED", quad_err=r.quad_err / r.bound))
    return [rep]


# -- geometry ----------------------------------------------------------------------------

def _domain_fields(dom, R_ball):
    """Test fields supported inside `dom`, with per-axis breakpoints for box quadrature."""
    N = dom.dim
    if dom.kind == "wulff-ball":
        return [(n, u, None) for n, u in inner_corpus(dom.h0, R_ball)]
    if dom.kind == "half-space":
        lo, hi = np.full(N, -0.5), np.full(N, 0.5)
        lo[-1], hi[-1] = 0.2, 1.0
        c = np.zeros(N)
        c[0], c[-1] = 0.2, 0.6
        flo = lo.copy()
        flo[-1] = 0.0
        return [("box_bump", box_bump(lo, hi), None),
                ("offcenter_bump", euclidean_ball_bump(c, 0.4), None),
                ("face_linear", face_profile_field(flo, hi, 1.0, "face_linear"), None),
                ("face_power1.5", face_profile_field(flo, hi, 1.5, "face_power1.5"), None)]
    center, radius = _chebyshev_ball(dom.A, dom.b)
    lo = center - 0.6 * radius / np.sqrt(N)
    hi = center + 0.7 * radius / np.sqrt(N)
    c = center.copy()
    c[0] += 0.2 * radius
    return [("box_bump", box_bump(lo, hi), None),
            ("offcenter_bump", euclidean_ball_bump(c, 0.7 * radius), None)]


def _chebyshev_ball(A, b):
    """Largest Euclidean ball inside ``{A x < b}`` (centre, radius)."""
    norms = np.linalg.norm(A, axis=1)
    d = A.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                  bounds=[(None, None)] * d + [(0, None)])
    return res.x[:-1], float(res.x[-1])


def _interior_samples(dom, rng, n):
    N = dom.dim
    if dom.kind == "wulff-ball":
        x = rng.standard_normal((n, N))
        x *= (dom.R * rng.uniform(0.05, 0.95, n) / dom.h0.value(x))[:, None]
        return x
    if dom.kind == "half-space":
        x = rng.uniform(-2, 2, (n, N))
        x[:, -1] = rng.uniform(0.05, 2, n)
        return x
    center, radius = _chebyshev_ball(dom.A, dom.b)
    x = center + rng.uniform(-radius, radius, (4 * n, N))
    return x[dom.contains(x, closed=False)][:n]


def suite_geometric(cfg, ctx):
    rep = ExperimentReport("geometric")
    geo = ExperimentReport("geometric")
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        for i, rec in enumerate(cfg.domains):
            dom = domain_from_record(rec, g, h0)
            dtag = f"N={N}:{dom.kind}#{i}"
            rng = ctx.rng(200 + 10 * N + i)
            ps_all = [p for p in cfg.p if p > 1]
            if ps_all:
                F = HardyFunctional("geometric", ps_all[0], N, g, h0=h0, domain=dom, res=ctx.res)
            for name, u, bps in (_domain_fields(dom, dom.R) if ps_all else []):
                ps = [p for p in ps_all if finite_energy(name, p, N)]
                for p, r in zip(ps, geometric_quotients(u, F, ps, breakpoints=bps)):
                    rep.add(CheckRow.at_least(f"{dtag}:p={_tag(p)}:{name}:quotient", r.quotient,
                                              r.bound, INEQ_TOL, "STATED", r.quad_err))
            geo.extend(_geometry_rows(dom, dtag, rng, cfg, ctx))
    return [rep, geo]


def _geometry_rows(dom, dtag, rng, cfg, ctx):
    rows = []
    x = _interior_samples(dom, rng, 64)
    if dom.kind == "wulff-ball":
        pts = x[:12]
        num = dom.numeric_distance(pts, n_samples=4000, seed=cfg.seed)
        rows.append(CheckRow.close(f"{dtag}:distance_vs_R-H0", np.max(np.abs(num - (dom.R - dom.h0.value(pts)))),
                                   0.0, DISTANCE_TOL, "STATED"))
    if dom.kind == "half-space":
        rows.append(CheckRow.close(f"{dtag}:halfspace_constant", dom.halfspace_constant(),
                                   dom.halfspace_constant("closed"), 1e-10, "STATED"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RidgeProximityWarning)
        ek = eikonal_check(dom, x, tol=EIKONAL_TOL)
    rows.append(CheckRow.at_most(f"{dtag}:eikonal_residual", ek.rows[0].value, 0.0, EIKONAL_TOL,
                                 "STATED"))
    for p in sorted({2.0, *[q for q in cfg.p if q > 1]}):
        sh = superharmonicity_check(dom, p=p, tol=SUPERHARMONIC_TOL)
        rows.append(CheckRow.at_least(f"{dtag}:p={_tag(p)}:min_neg_p_laplacian_of_distance",
                                      sh.rows[0].value, 0.0, SUPERHARMONIC_TOL, "STATED"))
    if dom.bounded:
        trial = _domain_fields(dom, dom.R)[0][1]
        for p in sorted({2.0, *[q for q in cfg.p if q > 1]}):
            F = HardyFunctional("geometric", p, dom.dim, dom.gauge, h0=dom.h0, domain=dom,
                                res=ctx.res)
            eb = eigen_lower_bound(F, dom, trial)
            rows.append(CheckRow.at_most(f"{dtag}:p={_tag(p)}:eigen_bound_vs_rayleigh", eb.bound,
                                         eb.rayleigh, 0.0, "STATED", eb.rayleigh_err))
    return rows


# -- sharpness ---------------------------------------------------------------------------

def suite_sharpness(cfg, ctx):
    reports = []
    for t in TARGETS:
        sel = cfg.sharpness[t]
        N = sel["N"]
        probe = SharpnessProbe(t, ctx.gauge(N), cfg.alphas[t], p=sel["p"], N=N, R=cfg.R,
                               h0=ctx.h0(N), res=ctx.res)
        rep = sweep(probe, final_gap=cfg.final_gap[t], strict=False)
        out = _retag(rep, "sharpness", f"N={N}:p={_tag(probe.p)}:")
        out.notes.update(target=t, constant=probe.constant, critical_alpha=probe.critical_alpha)
        reports.append(out)
    return reports


# -- transformations ---------------------------------------------------------------------

PUSHFORWARD_CASES = ((1.0, 0.0), (2.0, 1.0), (0.5, -0.5))


def suite_transform(cfg, ctx):
    jac = ExperimentReport("transform")
    for N in cfg.N:
        h0 = ctx.h0(N)
        jr = jacobian_check(h0, n=100, seed=cfg.seed)
        jac.extend(_retag(jr, "transform", f"N={N}:jacobian:").rows)
        for k, (c, a) in enumerate(PUSHFORWARD_CASES):
            est, se, exact = pushforward_volume(c, a, h0, n=200_000, seed=cfg.seed + k)
            jac.add(CheckRow.close(f"N={N}:pushforward:c={_tag(c)}:a={_tag(a)}", est, exact,
                                   VOLUME_RTOL, "DERIVED", rel=True, quad_err=se))
    return [jac, _scaling_rows(cfg, ctx), _bridge_rows(cfg, ctx)]


def _scaling_rows(cfg, ctx):
    rep = ExperimentReport("transform")
    R = cfg.R
    for N in cfg.N:
        g, h0 = ctx.gauge(N), ctx.h0(N)
        p = next((q for q in cfg.p if 1 < q < N), None)
        if p is not None:
            F = HardyFunctional("subcritical", p, N, g, h0=h0, res=ctx.res)
            for name, u in whole_corpus(h0, RADIAL):
                q0 = subcritical_quotient(u, F).quotient
                for lam in cfg.lambdas:
                    q = subcritical_quotient(subcritical_scale(u, lam, p, N), F)
                    rep.add(CheckRow.close(f"N={N}:p={_tag(p)}:{name}:subcritical_scale={_tag(lam)}",
                                           q.quotient, q0, SCALING_TOL, "STATED", quad_err=q.quad_err))
        F = HardyFunctional("critical", N, N, g, R=R, h0=h0, res=ctx.res)
        for name, u in inner_corpus(h0, R):
            if name not in RADIAL:
                continue
            q0 = critical_quotient(u, F).quotient
            for lam in cfg.lambdas:
                q = critical_quotient(critical_scale(u, lam, N, R, h0), F)
                rep.add(CheckRow.close(f"N={N}:{name}:critical_scale={_tag(lam)}", q.quotient, q0,
                                       SCALING_TOL, "STATED", quad_err=q.quad_err))
    return rep


def bridge_profiles(R):
    return [bump_profile(0.9 * R), paraboloid_profile(R), plateau_profile(0.3 * R, 0.8 * R),
            truncated_log_power_profile(0.3, R)]


def _bridge_rows(cfg, ctx):
    rep = ExperimentReport("transform")
    R = cfg.R
    radii = np.geomspace(0.05, 20.0, 64)
    for m, N in cfg.bridge_pairs:
        P = BridgeParams(m, N, R)
        h0 = ctx.h0(N)
        for w in bridge_profiles(R):
            br = bridge_identity_check(w, P, h0, tol=BRIDGE_TOL, res=ctx.res)
            rep.extend(_retag(br, "transform", "bridge:").rows)
        u = bridge_map(bump_profile(0.9 * R), "critical->subcritical", P)
        for lam in cfg.lambdas:
            sc = scaling_correspondence_check(u, P, lam, radii, tol=BRIDGE_POINTWISE_TOL)
            rep.extend(_retag(sc, "transform", "bridge:").rows)
    return rep


# -- registry ------------------------------------------------------------------------------

SUITE_FUNCS = {
    "identities": suite_identities,
    "subcritical": suite_subcritical,
    "critical": suite_critical,
    "geometric": suite_geometric,
    "weighted": suite_weighted,
    "uncertainty": suite_uncertainty,
    "sharpness": suite_sharpness,
    "transform": suite_transform,
}

CATALOG = {
    "identities": {
        "verifies": "Euler, parity, Hessian-scaling and inverse-gradient identities of a gauge "
                    "and its polar; Schwarz inequality with its equality case",
        "params": ["gauge", "params.N"],
    },
    "subcritical": {
        "verifies": "anisotropic Hardy inequality with constant |(N-p)/p|^p, its attainment "
                    "at p = 1 and non-attainment for p > 1",
        "params": ["gauge", "params.N", "params.p"],
    },
    "critical": {
        "verifies": "critical logarithmic Hardy inequality on Wulff balls with constant "
                    "((N-1)/N)^N and its non-attainment",
        "params": ["gauge", "params.N", "params.R"],
    },
    "geometric": {
        "verifies": "distance-weighted Hardy inequality on convex domains with constant "
                    "((p-1)/p)^p, p-superharmonicity of the anisotropic distance, eikonal "
                    "equation, and the inradius lower bound for the first p-eigenvalue",
        "params": ["gauge", "domains", "params.N", "params.p"],
    },
    "weighted": {
        "verifies": "weighted Hardy inequality with a power weight of H0, constant ((N+alpha)/p)^p",
        "params": ["gauge", "params.N", "params.p", "params.weighted_alphas"],
    },
    "uncertainty": {
        "verifies": "anisotropic Heisenberg uncertainty principle with constant (N/2)^2, "
                    "equality for the H0-Gaussian",
        "params": ["gauge", "params.N"],
    },
    "sharpness": {
        "verifies": "optimality of the subcritical, critical and half-space constants via "
                    "families whose quotients converge to them",
        "params": ["gauge", "params.sharpness", "params.alphas", "params.final_gap", "params.R"],
    },
    "transform": {
        "verifies": "Jacobian of the radial power map, invariance of the quotients under "
                    "both scalings, and the identity bridging subcritical and critical "
                    "deficits across dimensions",
        "params": ["gauge", "params.N", "params.lambdas", "params.bridge_pairs", "params.R"],
    },
}


def run_suite(name, cfg, ctx=None):
    """Run one suite; every returned report carries the wall time and config hash."""
    ctx = ctx or SuiteContext(cfg)
    t0 = time.perf_counter()
    reports = SUITE_FUNCS[name](cfg, ctx)
    dt = time.perf_counter() - t0
    h = cfg.hash
    merged = ExperimentReport(name, wall_time=dt, config_hash=h)
    sweeps = []
    for r in reports:
        merged.extend(r.rows)
        if "quotients" in r.notes:
            sweeps.append(r.notes)
    merged.notes["sweeps"] = sweeps
    return merged


def run_all(cfg):
    ctx = SuiteContext(cfg)
    return [run_suite(s, cfg, ctx) for s in cfg.suites]
