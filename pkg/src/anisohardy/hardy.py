"""Rayleigh quotients of the anisotropic Hardy-type inequalities.

Every evaluator returns the two integrals of an inequality, their ratio,
the sharp constant it must dominate and a quadrature error estimate
(difference to a rule with half the nodes in every direction).

Integrals over Wulff balls use anisotropic polar coordinates.  On the
innermost ball where a field declares an exact `Core` form, the radial
integrals are done in closed form, which is what makes near-extremal fields
such as ``r^(-a)`` with ``a p`` close to ``N - p`` computable.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from ._parallel import pairwise_sum
from .errors import (AdmissibilityViolation, FinslerWarning, InvalidParameters,
                     NonintegrableSingularity, SupportViolation, UnboundedDomain,
                     ZeroDenominator)
from .fields import Core, LiftedField
from .gauge import polar as _polar
from .quadrature import (Resolution, composite_radial_rule, graded_radial_rule,
                         panel_rule, tensor_nodes)
from .report import CheckRow
from .wulff import polar_frame, polar_sums

KINDS = ("subcritical", "critical", "weighted", "uncertainty", "geometric")
MIN_DENOMINATOR = 1e-14


@dataclass(frozen=True)
class HardyFunctional:
    """Parameters of one Hardy-type functional.

    Parameters
    ----------
    kind : {"subcritical", "critical", "weighted", "uncertainty", "geometric"}
    p, N : float, int
        Integrability exponent and dimension.
    R : float, optional
        Outer Wulff radius (required for ``critical``).
    alpha, C : float
        Weight exponent and the constant in ``Delta_H rho >= C / rho``
        (``weighted`` and ``uncertainty``; C defaults to N - 1, the value
        for rho = H0).
    gauge, h0 : Gauge, PolarGauge
    domain : DomainShape, optional
        Required for ``geometric``.
    """

    kind: str
    p: float
    N: int
    gauge: object
    R: float | None = None
    alpha: float = 0.0
    C: float | None = None
    h0: object = None
    domain: object = None
    res: Resolution = field(default_factory=Resolution)
    tol: float = 1e-6

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameters(f"unknown functional kind {self.kind!r}")
        if self.gauge.dim != self.N:
            raise InvalidParameters(f"gauge dimension {self.gauge.dim} differs from N = {self.N}")
        if self.h0 is None:
            object.__setattr__(self, "h0", _polar(self.gauge))
        if self.C is None:
            object.__setattr__(self, "C", float(self.N - 1))
        p, N = self.p, self.N
        if self.kind == "subcritical":
            if p < 1 or p == N:
                raise AdmissibilityViolation("subcritical functional needs p >= 1 and p != N")
        elif self.kind == "critical":
            if p != N or N < 2:
                raise AdmissibilityViolation("critical functional needs p = N >= 2")
            if self.R is None or not np.isfinite(self.R) or self.R <= 0:
                raise AdmissibilityViolation("critical functional needs a bounded domain (finite R)")
        elif self.kind == "weighted":
            if p < 1:
                raise AdmissibilityViolation("weighted functional needs p >= 1")
            if self.C + self.alpha <= -1:
                raise AdmissibilityViolation(
                    f"weighted functional needs C + alpha > -1, got C={self.C:g}, alpha={self.alpha:g}")
        elif self.kind == "uncertainty":
            if p != 2:
                raise AdmissibilityViolation("uncertainty product is defined for p = 2")
            if self.C + 1 <= 0:
                raise AdmissibilityViolation("uncertainty product needs C > -1")
        elif self.kind == "geometric":
            if p <= 1:
                raise AdmissibilityViolation("geometric functional needs p > 1")
            if self.domain is None:
                raise AdmissibilityViolation("geometric functional needs a domain")

    @property
    def sharp_constant(self):
        p, N = self.p, self.N
        if self.kind == "subcritical":
            return abs((N - p) / p) ** p
        if self.kind == "critical":
            return ((N - 1) / N) ** N
        if self.kind == "weighted":
            return ((self.C + self.alpha + 1) / p) ** p
        if self.kind == "uncertainty":
            return ((self.C + 1) / 2) ** 2
        return ((p - 1) / p) ** p


@dataclass
class HardyResult:
    """Outcome of one evaluation: ``quotient = rhs / lhs`` versus `bound`."""

    kind: str
    lhs: float
    rhs: float
    quotient: float
    bound: float
    quad_err: float
    lhs_err: float = 0.0
    rhs_err: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def slack(self):
        return self.quotient - self.bound

    def passed(self, tol=1e-6):
        return self.quotient >= self.bound - tol

    def row(self, check_id, tol=1e-6):
        return CheckRow.at_least(check_id, self.quotient, self.bound, tol, "STATED", self.quad_err)


# -- polar engine -------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """Integrand ``r^r_power log(log_ref/r)^log_power |Q|^power`` in polar form.

    `radial_weight`, a callable of r, multiplies the integrand and is
    frozen at its value on the core radius inside the core ball.
    `quantity` is ``"u"``, ``"du"`` (derivative along the ray, equal to
    ``(x/H0) . grad u``), ``"hgrad"`` (``H(grad u)``), or a callable
    ``f(x, u, du, grad) -> values`` already raised to its power.
    """

    quantity: object
    power: float = 1.0
    r_power: float = 0.0
    log_power: float = 0.0
    log_ref: float = 1.0
    radial_weight: object = None


def _core_moment(rc, sigma, logs):
    """``int_0^rc r^(sigma-1) prod_i log(ref_i/r)^k_i dr`` (inf when divergent)."""
    merged = {}
    for ref, k in logs:
        if k != 0:
            merged[ref] = merged.get(ref, 0.0) + k
    logs = [(ref, k) for ref, k in merged.items() if k != 0]
    if not logs:
        return rc ** sigma / sigma if sigma > 0 else np.inf
    if any(ref <= rc for ref, _ in logs):
        raise NonintegrableSingularity("core radius must lie inside every log reference radius")
    if sigma < 0:
        return np.inf
    if len(logs) == 1:
        ref, k = logs[0]
        Lc = np.log(ref / rc)
        if abs(sigma) < 1e-14:
            return Lc ** (k + 1) / (-k - 1) if k < -1 else np.inf
        # ref^sigma * int_{Lc}^inf exp(-sigma L) L^k dL, scaled by exp(-sigma Lc)
        val, _ = quad(lambda L: np.exp(-sigma * (L - Lc)) * L ** k, Lc, np.inf,
                      epsabs=0, epsrel=1e-13, limit=200)
        return ref ** sigma * np.exp(-sigma * Lc) * val
    if abs(sigma) < 1e-14 and sum(k for _, k in logs) >= -1:
        return np.inf
    offs = [(np.log(ref / rc), k) for ref, k in logs]
    val, _ = quad(lambda t: np.exp(-sigma * t) * np.prod([(o + t) ** k for o, k in offs]),
                  0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    return rc ** sigma * val


def _core_terms(term, core, dim):
    """(coefficient, sigma, logs) of a term's integral over the core ball."""
    p = term.power
    wlog = [(term.log_ref, term.log_power)]
    base = term.r_power + dim
    if term.quantity == "u":
        if core.kind == "constant":
            return 1.0, base, wlog
        if core.kind == "power":
            return 1.0, base - core.exponent * p, wlog
        return 1.0, base, wlog + [(core.ref, core.exponent * p)]
    if term.quantity in ("du", "hgrad"):
        if core.kind == "constant" or core.exponent == 0:
            return 0.0, base, wlog
        a = abs(core.exponent) ** p
        if core.kind == "power":
            return a, base - core.exponent * p - p, wlog
        return a, base - p, wlog + [(core.ref, (core.exponent - 1) * p)]
    return 0.0, base, wlog


@dataclass
class PolarIntegrals:
    values: np.ndarray
    errors: np.ndarray
    core: np.ndarray
    info: dict


def polar_integrals(u, h0, terms, res=None, R_limit=None, gauge=None):
    """Evaluate several polar-form integrals of a field over its support.

    Returns a `PolarIntegrals` with one value and error estimate per term;
    `core` holds the closed-form contribution of the core ball.
    """
    res = res or Resolution()
    dim = h0.dim
    gauge = gauge if gauge is not None else h0.primal
    rmin, rmax = u.support.radial_extent(h0)
    if R_limit is not None and rmax > R_limit * (1 + 1e-12):
        raise SupportViolation(f"field support reaches H0 = {rmax:g} beyond R = {R_limit:g}")
    core = None
    if rmin > 0:
        a = rmin
    else:
        core = u.core if u.core is not None else Core("constant", 0.0, 0.0)
        rc = core.radius if core.radius > 0 else res.inner_cut * rmax
        core = replace(core, radius=rc)
        a = rc
    bps = [b for b in u.support.breakpoints if a < b < rmax]
    rule = composite_radial_rule(a, rmax, bps, res, graded_left=core is not None)
    frame = polar_frame(h0, res.angular_nodes(dim), res.angular_method)
    # H(grad H0) = 1 off the origin, so H(grad u) = |U'| for H0-radial fields
    lifted = isinstance(u, LiftedField)
    _check_edges(u, frame, a if core is None else None, rmax)
    need_grad = any(callable(t.quantity) or (t.quantity == "hgrad" and not lifted) for t in terms)

    def weights_of(t, r):
        w = r ** t.r_power if t.r_power else np.ones_like(r)
        if t.log_power:
            w = w * np.log(t.log_ref / r) ** t.log_power
        if t.radial_weight is not None:
            w = w * t.radial_weight(r)
        return w

    def integrand(rays, r):
        uu, du, gg = u.polar_eval(rays, r, need_grad)
        out = np.empty((len(terms), len(rays), len(r)))
        for i, t in enumerate(terms):
            if t.quantity == "u":
                q = np.abs(uu) ** t.power
            elif t.quantity == "du":
                q = np.abs(du) ** t.power
            elif t.quantity == "hgrad":
                q = (np.abs(du) if lifted else gauge.value(gg)) ** t.power
            else:
                x = r[None, :, None] * rays[:, None, :]
                q = t.quantity(x, uu, du, gg)
            out[i] = q * weights_of(t, r)
        return out

    vals = polar_sums(integrand, frame, rule.nodes, rule.weights, len(terms))
    coarse = polar_sums(integrand, frame.coarse, rule.coarse.nodes, rule.coarse.weights, len(terms))
    core_vals = np.zeros(len(terms))
    if core is not None:
        uc, _, _ = u.polar_eval(frame.rays, np.array([core.radius]))
        coef = uc[:, 0] / float(core.profile(np.array([core.radius]))[0])
        uc_c, _, _ = u.polar_eval(frame.coarse.rays, np.array([core.radius]))
        coef_c = uc_c[:, 0] / float(core.profile(np.array([core.radius]))[0])
        for i, t in enumerate(terms):
            scale, sigma, logs = _core_terms(t, core, dim)
            if scale == 0:
                continue
            mass = float(pairwise_sum(frame.weights * np.abs(coef) ** t.power))
            mass_c = float(pairwise_sum(frame.coarse.weights * np.abs(coef_c) ** t.power))
            if mass == 0:
                continue
            m = _core_moment(core.radius, sigma, logs)
            if not np.isfinite(m):
                raise NonintegrableSingularity(
                    f"term {i} diverges at the origin for the declared core {core.kind}")
            if t.radial_weight is not None:
                m = m * float(t.radial_weight(np.array([core.radius]))[0])
            core_vals[i] = scale * mass * m
            coarse[i] += scale * mass_c * m
    total = vals + core_vals
    coarse_total = coarse + 0.0
    errors = np.abs(total - coarse_total)
    info = {"rays": len(frame.weights), "radial_nodes": rule.size, "r_start": a, "r_end": rmax,
            "core": core}
    return PolarIntegrals(total, errors, core_vals, info)


def _check_edges(u, frame, r_in, r_out, rel=1e-10):
    # a field that jumps at the edge of its declared support is not a test function
    radii = np.array([r for r in (r_in, r_out) if r is not None])
    uu, _, _ = u.polar_eval(frame.rays, radii)
    inner, _, _ = u.polar_eval(frame.rays, np.linspace(r_in or 0.0, r_out, 9)[1:-1])
    scale = max(float(np.max(np.abs(inner))), 1e-300)
    edge = float(np.max(np.abs(uu)))
    if edge > rel * scale:
        raise SupportViolation(
            f"field does not vanish on the edge of its support (|u| = {edge:.3g} there)")


def _ratio(num, den, num_err, den_err):
    q = num / den
    err = abs(q) * (num_err / max(abs(num), 1e-300) + den_err / abs(den))
    return q, err


def _result(F, lhs_i, rhs_i, vals, errs, extras=None):
    lhs, rhs = float(vals[lhs_i]), float(vals[rhs_i])
    if abs(lhs) < MIN_DENOMINATOR:
        raise ZeroDenominator(f"left-hand integral {lhs:g} is below {MIN_DENOMINATOR:g}")
    q, qe = _ratio(rhs, lhs, float(errs[rhs_i]), float(errs[lhs_i]))
    return HardyResult(F.kind, lhs, rhs, q, F.sharp_constant, qe,
                       float(errs[lhs_i]), float(errs[rhs_i]), extras or {})


def _check_dim(u, F):
    if u.dim is not None and u.dim != F.N:
        raise InvalidParameters(f"field lives in dimension {u.dim}, functional in {F.N}")


def subcritical_quotient(u, F, majorization=False):
    """``int |(x/H0) . grad u|^p`` over ``int |u|^p / H0^p``.

    For p > N the field must vanish near the origin.  With
    `majorization`, ``int H(grad u)^p`` is returned in ``extras`` as well.
    """
    if F.kind != "subcritical":
        raise InvalidParameters("functional kind must be 'subcritical'")
    _check_dim(u, F)
    if F.p > F.N and u.support.contains_origin():
        raise SupportViolation("for p > N the field must be supported away from the origin")
    terms = [Term("u", F.p, r_power=-F.p), Term("du", F.p)]
    if majorization:
        terms.append(Term("hgrad", F.p))
    out = polar_integrals(u, F.h0, terms, F.res, F.R, F.gauge)
    extras = {"core_lhs": float(out.core[0]), "core_rhs": float(out.core[1])}
    if majorization:
        extras["energy"] = float(out.values[2])
        extras["energy_err"] = float(out.errors[2])
    return _result(F, 0, 1, out.values, out.errors, extras)


def critical_quotient(u, F, majorization=False):
    """``int |(x/H0) . grad u|^N`` over ``int |u|^N / (H0^N log(R/H0)^N)``."""
    if F.kind != "critical":
        raise InvalidParameters("functional kind must be 'critical'")
    _check_dim(u, F)
    _, rmax = u.support.radial_extent(F.h0)
    if rmax >= F.R:
        raise SupportViolation("support must stay inside the Wulff ball of radius R "
                               "(the logarithmic weight is singular on its boundary)")
    N = F.N
    terms = [Term("u", N, r_power=-N, log_power=-N, log_ref=F.R), Term("du", N)]
    if majorization:
        terms.append(Term("hgrad", N))
    out = polar_integrals(u, F.h0, terms, F.res, F.R, F.gauge)
    extras = {"core_lhs": float(out.core[0]), "core_rhs": float(out.core[1])}
    if majorization:
        extras["energy"] = float(out.values[2])
    return _result(F, 0, 1, out.values, out.errors, extras)


def _rho_terms(F, rho, lhs_power_weight, rhs_power_weight):
    g = F.gauge
    p = F.p

    def lhs(x, uu, du, gg):
        return rho.value(x) ** lhs_power_weight * np.abs(uu) ** p

    def rhs(x, uu, du, gg):
        t = g.grad(rho.grad(x))
        return rho.value(x) ** rhs_power_weight * np.abs(np.sum(gg * t, axis=-1)) ** p

    return lhs, rhs


def check_rho(F, rho, samples, tol=1e-6):
    """Spot-check ``H(grad rho) = 1``; warn (not fail) on violations."""
    resid = float(np.max(np.abs(F.gauge.value(rho.grad(samples)) - 1.0)))
    if resid > tol:
        warnings.warn(f"H(grad rho) deviates from 1 by {resid:.3g}", FinslerWarning, stacklevel=3)
    return resid


def weighted_quotient(u, F, rho=None):
    """``int rho^(alpha+p) |(grad H)(grad rho) . grad u|^p`` over ``int rho^alpha |u|^p``.

    ``rho=None`` means ``rho = H0``, for which the direction field
    ``(grad H)(grad H0)(x)`` equals ``x / H0(x)``.
    """
    if F.kind != "weighted":
        raise InvalidParameters("functional kind must be 'weighted'")
    _check_dim(u, F)
    if u.support.contains_origin() or u.support.radial_extent(F.h0)[0] <= 0:
        raise SupportViolation("weighted functional needs a field supported away from the origin")
    if rho is None:
        terms = [Term("u", F.p, r_power=F.alpha), Term("du", F.p, r_power=F.alpha + F.p)]
    else:
        lhs, rhs = _rho_terms(F, rho, F.alpha, F.alpha + F.p)
        terms = [Term(lhs, F.p), Term(rhs, F.p)]
    out = polar_integrals(u, F.h0, terms, F.res, F.R, F.gauge)
    return _result(F, 0, 1, out.values, out.errors)


def uncertainty_product(u, F, rho=None):
    """``int rho^2 u^2 * int |(grad H)(grad rho) . grad u|^2 / (int u^2)^2``.

    ``extras`` holds the squared mass, the moment and the energy.
    """
    if F.kind != "uncertainty":
        raise InvalidParameters("functional kind must be 'uncertainty'")
    _check_dim(u, F)
    if rho is None:
        terms = [Term("u", 2), Term("u", 2, r_power=2), Term("du", 2)]
    else:
        g = F.gauge

        def moment(x, uu, du, gg):
            return rho.value(x) ** 2 * uu ** 2

        def energy(x, uu, du, gg):
            return np.sum(gg * g.grad(rho.grad(x)), axis=-1) ** 2

        terms = [Term("u", 2), Term(moment, 2), Term(energy, 2)]
    out = polar_integrals(u, F.h0, terms, F.res, F.R, F.gauge)
    mass, moment_v, energy_v = (float(v) for v in out.values)
    if mass < MIN_DENOMINATOR:
        raise ZeroDenominator("field has (numerically) zero L^2 mass")
    num = moment_v * energy_v
    den = mass ** 2
    rel = (out.errors[1] / max(moment_v, 1e-300) + out.errors[2] / max(energy_v, 1e-300)
           + 2 * out.errors[0] / mass)
    ratio = num / den
    return HardyResult("uncertainty", den, num, ratio, F.sharp_constant, abs(ratio) * rel,
                       extras={"mass_sq": den, "moment": moment_v, "energy": energy_v})


# -- geometric functional -----------------------------------------------------------

def _box_axis_rule(lo, hi, n, panels, breakpoints=(), face_exponent=None, grading=0.6,
                   n_graded=24):
    edges = sorted({lo, hi, *[b for b in breakpoints if lo < b < hi]})
    if face_exponent is not None:
        # graded toward the face at lo, Gauss-Jacobi on the innermost panel
        first = graded_radial_rule(n_graded, n, edges[0], edges[1], grading, "left",
                                   "integrable-power", face_exponent)
        rest = [panel_rule(np.linspace(a, b, panels + 1), n)
                for a, b in zip(edges[1:-1], edges[2:])]
        x = np.concatenate([first.nodes] + [r.nodes for r in rest])
        w = np.concatenate([first.weights] + [r.weights for r in rest])
        return x, w
    full = np.concatenate([np.linspace(a, b, panels + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
                          + [[hi]])
    r = panel_rule(full, n, coarse=False)
    return r.nodes, r.weights


def box_integrals(u, domain, integrand_fns, res=None, breakpoints=None, face_exponent=None):
    """Tensor Gauss-Legendre integrals over the support box of `u`.

    `integrand_fns` are callables ``f(x, u, grad, d, t)`` where `d` is the
    distance, `t = (grad H)(grad d)`.  Returns values and error estimates.
    """
    res = res or Resolution()
    lo, hi = u.support.box(domain.h0)
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(len(lo), -1).T
    if not np.all(domain.contains(corners)):
        raise SupportViolation("field support box is not contained in the domain")
    bps = breakpoints or [()] * len(lo)
    g = domain.gauge

    def run(n):
        axes = []
        for i in range(len(lo)):
            fe = face_exponent if (i == len(lo) - 1) else None
            x, w = _box_axis_rule(float(lo[i]), float(hi[i]), n, res.segment_panels, bps[i], fe,
                                  res.grading)
            axes.append((x, w))
        nodes, weights = tensor_nodes([_Rule1D(x, w) for x, w in axes])
        inside = domain.contains(nodes, closed=False)
        nodes, weights = nodes[inside], weights[inside]
        uu = u.value(nodes)
        gg = u.grad(nodes)
        d = domain._distance(nodes)
        t = g.grad(domain.distance_grad(nodes))
        return np.array([float(np.sum(weights * f(nodes, uu, gg, d, t))) for f in integrand_fns])

    fine = run(res.n_per_panel)
    coarse = run(max(res.n_per_panel // 2, 2))
    return fine, np.abs(fine - coarse)


@dataclass
class _Rule1D:
    nodes: np.ndarray
    weights: np.ndarray


def geometric_quotient(u, F, majorization=False, breakpoints=None):
    """``int |grad u . (grad H)(grad d_H)|^p`` over ``int |u|^p / d_H^p``."""
    return geometric_quotients(u, F, [F.p], majorization, breakpoints)[0]


def geometric_quotients(u, F, ps, majorization=False, breakpoints=None):
    """`geometric_quotient` for several exponents, sharing field evaluations.

    Off Wulff balls the tensor-grid values of `u`, its gradient and the
    distance are computed once per distinct face grading and reused for
    every exponent in `ps`.
    """
    if F.kind != "geometric":
        raise InvalidParameters("functional kind must be 'geometric'")
    _check_dim(u, F)
    Fs = [F if p == F.p else replace(F, p=p) for p in ps]
    dom = F.domain
    g = F.gauge
    if dom.kind == "wulff-ball":
        R = dom.R
        _, rmax = u.support.radial_extent(F.h0)
        if rmax >= R:
            raise SupportViolation("field must be compactly supported inside the Wulff ball")
        out = []
        for Fp in Fs:
            p = Fp.p
            # d_H = R - H0 and (grad H)(grad d_H)(x) = -x / H0(x), so the
            # directional derivative is the radial one
            terms = [Term("u", p, radial_weight=lambda r: (R - r) ** (-p)), Term("du", p)]
            if majorization:
                terms.append(Term("hgrad", p))
            pi = polar_integrals(u, F.h0, terms, F.res, R, g)
            extras = {"energy": float(pi.values[2])} if majorization else {}
            out.append(_result(Fp, 0, 1, pi.values, pi.errors, extras))
        return out
    fp = getattr(u, "face_power", None)
    graded = fp is not None and dom.kind == "half-space" and u.support.box(F.h0)[0][-1] == 0
    groups = {}
    for i, Fp in enumerate(Fs):
        groups.setdefault(Fp.p * (fp - 1) if graded else None, []).append(i)
    out = [None] * len(Fs)
    for fe, idx in groups.items():
        fns = []
        for i in idx:
            p = Fs[i].p
            fns += [lambda x, uu, gg, d, t, p=p: np.abs(uu) ** p / d ** p,
                    lambda x, uu, gg, d, t, p=p: np.abs(np.sum(gg * t, axis=-1)) ** p]
            if majorization:
                fns.append(lambda x, uu, gg, d, t, p=p: g.value(gg) ** p)
        vals, errs = box_integrals(u, dom, fns, F.res, breakpoints, fe)
        k = 3 if majorization else 2
        for j, i in enumerate(idx):
            v, e = vals[k * j:k * j + k], errs[k * j:k * j + k]
            extras = {"energy": float(v[2])} if majorization else {}
            out[i] = _result(Fs[i], 0, 1, v, e, extras)
    return out


def geometric_majorization(u, domain, samples):
    """Max of ``|grad u . (grad H)(grad d_H)| - H(grad u)`` at samples (should be <= 0)."""
    x = np.asarray(samples, dtype=float)
    gg = u.grad(x)
    t = domain.gauge.grad(domain.distance_grad(x))
    return float(np.max(np.abs(np.sum(gg * t, axis=-1)) - domain.gauge.value(gg)))


@dataclass
class EigenBound:
    tau: float
    bound: float
    rayleigh: float | None = None
    rayleigh_err: float = 0.0

    @property
    def consistent(self):
        return self.rayleigh is None or self.rayleigh >= self.bound


def eigen_lower_bound(F, domain, trial=None):
    """Lower bound ``((p-1)/p)^p / tau_H^p`` for the first p-eigenvalue.

    With a `trial` field, its Rayleigh quotient ``int H(grad u)^p / int |u|^p``
    is returned as an upper estimate of the eigenvalue.
    """
    if not domain.bounded:
        raise UnboundedDomain("eigenvalue bound needs a bounded domain")
    p = F.p
    tau = domain.inradius()
    bound = ((p - 1) / p) ** p * tau ** (-p)
    if trial is None:
        return EigenBound(tau, bound)
    if domain.kind == "wulff-ball":
        out = polar_integrals(trial, F.h0, [Term("hgrad", p), Term("u", p)], F.res, domain.R, F.gauge)
        vals, errs = out.values, out.errors
    else:
        g = F.gauge
        vals, errs = box_integrals(trial, domain,
                                   [lambda x, uu, gg, d, t: g.value(gg) ** p,
                                    lambda x, uu, gg, d, t: np.abs(uu) ** p], F.res)
    q, qe = _ratio(float(vals[0]), float(vals[1]), float(errs[0]), float(errs[1]))
    return EigenBound(tau, bound, q, qe)


def evaluate(u, F, **kwargs):
    """Dispatch to the evaluator matching ``F.kind``."""
    fn = {"subcritical": subcritical_quotient, "critical": critical_quotient,
          "weighted": weighted_quotient, "uncertainty": uncertainty_product,
          "geometric": geometric_quotient}[F.kind]
    return fn(u, F, **kwargs)
