"""Near-extremal families and sweeps that drive Hardy quotients to their constants.

Each family depends on an exponent ``alpha`` approaching a critical value
from the admissible side; its quotient tends to the sharp constant while its
energy blows up.  Sweeps tabulate the quotients, check the approach is
monotone and fit the rate at which the gap closes.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import GeometryViolation, InadmissibleAlpha, InvalidParameters, SweepDivergence
from .fields import (ScalarField, Support, lift_radial, truncated_log_power_profile,
                     truncated_power_profile)
from .gauge import polar as _polar
from .hardy import (HardyFunctional, critical_quotient, geometric_quotient,
                    subcritical_quotient)
from .quadrature import Resolution
from .report import CheckRow, ExperimentReport, config_hash
from .wulff import wulff_geometry

TARGETS = ("subcritical", "critical", "halfspace")
NOISE_BAND = 1e-4


def critical_exponent(target, p, N):
    """Exponent the family parameter approaches."""
    if target == "subcritical":
        return (N - p) / p
    if target == "critical":
        return (N - 1) / N
    if target == "halfspace":
        return (p - 1) / p
    raise InvalidParameters(f"unknown sharpness target {target!r}")


def sharp_constant(target, p, N):
    return abs(critical_exponent(target, p, N)) ** p if target != "critical" else ((N - 1) / N) ** N


# -- families -------------------------------------------------------------------

def build_subcritical_family(g, p, N, delta=1.0, alpha=0.0, h0=None):
    """``H0^(-alpha)`` on the Wulff ball of radius delta, linear taper to 0 at 2 delta."""
    if g.dim != N:
        raise InvalidParameters("gauge dimension differs from N")
    if not alpha < (N - p) / p:
        raise InadmissibleAlpha(f"need alpha < (N-p)/p = {(N - p) / p:g}, got {alpha:g}")
    if delta <= 0:
        raise InvalidParameters("delta must be positive")
    h0 = h0 or _polar(g)
    return lift_radial(truncated_power_profile(alpha, delta), h0, f"subcritical_family(a={alpha:g})")


def build_critical_family(g, N, R=1.0, delta=None, alpha=0.0, h0=None):
    """``log(R/H0)^alpha`` on the Wulff ball of radius delta, linear taper to 0 at 2 delta.

    The taper starts from the inner value, so the field is continuous.
    """
    if g.dim != N:
        raise InvalidParameters("gauge dimension differs from N")
    delta = R / 4 if delta is None else delta
    if not alpha < (N - 1) / N:
        raise InadmissibleAlpha(f"need alpha < (N-1)/N = {(N - 1) / N:g}, got {alpha:g}")
    if not 0 < 2 * delta < R:
        raise GeometryViolation(f"need 0 < 2*delta < R, got delta={delta:g}, R={R:g}")
    h0 = h0 or _polar(g)
    return lift_radial(truncated_log_power_profile(alpha, R, delta), h0,
                       f"critical_family(a={alpha:g})")


def _cutoff(t, R):
    """C^1 cubic step in |t|: 1 for |t| <= R, 0 for |t| >= 2R; returns value and derivative."""
    s = np.clip((np.abs(t) - R) / R, 0.0, 1.0)
    val = 1 - 3 * s ** 2 + 2 * s ** 3
    dval = (-6 * s + 6 * s ** 2) / R * np.sign(t)
    return val, dval


def build_halfspace_family(domain, p, R_cube=1.0, alpha=1.0):
    """``eta * d_H^alpha`` on the upper half-space, `eta` a product cutoff.

    `eta` is 1 on the cube ``|x_i| < R, 0 < x_N < R`` and 0 outside the cube
    of twice the size.
    """
    if domain.kind != "half-space":
        raise InvalidParameters("half-space family needs a half-space domain")
    if not alpha > (p - 1) / p:
        raise InadmissibleAlpha(f"need alpha > (p-1)/p = {(p - 1) / p:g}, got {alpha:g}")
    R = float(R_cube)
    N = domain.gauge.dim

    def parts(x):
        vals, dvals = _cutoff(x, R)
        eta = np.prod(vals, axis=-1)
        d = domain._distance(x)
        return vals, dvals, eta, d

    def value(x):
        x = np.asarray(x, dtype=float)
        _, _, eta, d = parts(x)
        return eta * np.clip(d, 0.0, None) ** alpha

    def grad(x):
        x = np.asarray(x, dtype=float)
        vals, dvals, eta, d = parts(x)
        d = np.clip(d, 0.0, None)
        out = np.empty(x.shape)
        for i in range(N):
            out[..., i] = dvals[..., i] * np.prod(np.delete(vals, i, axis=-1), axis=-1)
        out *= (d ** alpha)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            dpow = np.where(d > 0, alpha * d ** (alpha - 1), 0.0)
        out += (eta * dpow)[..., None] * domain.distance_grad(x)
        return out

    sup = Support("box", lo=tuple([-2 * R] * (N - 1) + [0.0]), hi=tuple([2 * R] * N))
    f = ScalarField(value, grad, sup, None, f"halfspace_family(a={alpha:g})", N)
    f.face_power = float(alpha)
    f.cube = R
    return f


# -- oracles ------------------------------------------------------------------------

def leading_order(target, p, N, alpha, delta=1.0, R=1.0, omega=1.0):
    """Leading singular terms (nume, deno) of the family's two integrals.

    Both blow up like the inverse distance of alpha to the critical exponent;
    their ratio is ``alpha^p`` (``alpha^N`` for the critical family).
    """
    if target == "subcritical":
        gap = (N - p) / p - alpha
        deno = omega / p / gap * delta ** (N - alpha * p - p)
        return abs(alpha) ** p * deno, deno
    if target == "critical":
        gap = (N - 1) / N - alpha
        deno = omega / N / gap * np.log(R / delta) ** (alpha * N - N + 1)
        return abs(alpha) ** N * deno, deno
    raise InvalidParameters("leading-order terms exist for the subcritical and critical families")


def radial_family_quotient(target, p, N, alpha, delta=1.0, R=1.0):
    """Quotient of an H0-radial family from 1-D integrals.

    The inner-ball integrals are done in closed form, the taper annulus by
    adaptive quadrature.  The angular factor cancels, so the value holds for
    every gauge.
    """
    if target == "subcritical":
        sigma = N - alpha * p - p
        num_in = abs(alpha) ** p * delta ** sigma / sigma
        den_in = delta ** sigma / sigma
        c = delta ** (-alpha - 1)
        num_out = quad(lambda r: c ** p * r ** (N - 1), delta, 2 * delta, epsabs=0, epsrel=1e-13)[0]
        den_out = quad(lambda r: (c * (2 * delta - r)) ** p * r ** (N - 1 - p), delta, 2 * delta,
                       epsabs=0, epsrel=1e-13)[0]
    elif target == "critical":
        if p != N:
            raise InvalidParameters("critical family needs p = N")
        L = np.log(R / delta)
        k = alpha * N - N
        num_in = abs(alpha) ** N * L ** (k + 1) / (-k - 1)
        den_in = L ** (k + 1) / (-k - 1)
        c = L ** alpha / delta
        num_out = quad(lambda r: c ** N * r ** (N - 1), delta, 2 * delta, epsabs=0, epsrel=1e-13)[0]
        den_out = quad(lambda r: (c * (2 * delta - r)) ** N / (r * np.log(R / r) ** N),
                       delta, 2 * delta, epsabs=0, epsrel=1e-13)[0]
    else:
        raise InvalidParameters("radial oracle covers the subcritical and critical families")
    return (num_in + num_out) / (den_in + den_out)


def halfspace_oracle_quotient(p, alpha, R=1.0):
    """Euclidean half-space family quotient from one-variable integrals.

    For the Euclidean gauge the direction field is e_N, so the transverse
    cutoff factors out of both integrals and the quotient is that of
    ``t -> s(t) t^alpha`` on (0, 2R) with weight ``t^(-p)``.
    """
    def s(t):
        return _cutoff(np.asarray(t, float), R)

    beta = p * (alpha - 1)
    # on (0, R) both integrands are multiples of t^beta
    num_in = alpha ** p * R ** (beta + 1) / (beta + 1)
    den_in = R ** (beta + 1) / (beta + 1)

    def num(t):
        v, dv = s(t)
        return abs(alpha * v * t ** (alpha - 1) + dv * t ** alpha) ** p

    def den(t):
        v, _ = s(t)
        return (v * t ** alpha) ** p * t ** (-p)

    num_out = quad(num, R, 2 * R, epsabs=0, epsrel=1e-13)[0]
    den_out = quad(den, R, 2 * R, epsabs=0, epsrel=1e-13)[0]
    return (num_in + num_out) / (den_in + den_out)


# -- probes and sweeps ---------------------------------------------------------------

DEFAULT_ALPHAS = {
    "subcritical": (0.30, 0.40, 0.45, 0.49, 0.495, 0.499),
    "critical": (0.30, 0.40, 0.45, 0.49, 0.495, 0.499),
    "halfspace": (0.70, 0.60, 0.55, 0.51, 0.505, 0.501),
}


@dataclass
class SharpnessProbe:
    """A family and an exponent sequence approaching its critical value.

    Defaults: delta = R/4 for the critical family and 1 for the subcritical
    one; cube half-width 1 for the half-space family.
    """

    target: str
    gauge: object
    alphas: tuple
    p: float = 2.0
    N: int | None = None
    R: float = 1.0
    delta: float | None = None
    cube: float = 1.0
    h0: object = None
    res: Resolution = field(default_factory=Resolution)
    quotients: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise InvalidParameters(f"unknown sharpness target {self.target!r}")
        if self.N is None:
            self.N = self.gauge.dim
        if self.target == "critical":
            self.p = self.N
        if self.delta is None:
            self.delta = self.R / 4 if self.target == "critical" else 1.0
        if self.h0 is None:
            self.h0 = _polar(self.gauge)
        self.alphas = tuple(float(a) for a in np.atleast_1d(self.alphas))
        if not self.alphas:
            raise InvalidParameters("empty alpha sequence")
        ac = self.critical_alpha
        for a, b in zip(self.alphas[:-1], self.alphas[1:]):
            if abs(ac - b) >= abs(ac - a):
                raise InadmissibleAlpha("alpha sequence must move strictly toward the critical exponent")
        for a in self.alphas:
            self._check_alpha(a)

    @property
    def critical_alpha(self):
        return critical_exponent(self.target, self.p, self.N)

    @property
    def constant(self):
        return sharp_constant(self.target, self.p, self.N)

    def _check_alpha(self, a):
        ac = self.critical_alpha
        if self.target == "halfspace" and not a > ac:
            raise InadmissibleAlpha(f"need alpha > {ac:g}, got {a:g}")
        if self.target != "halfspace" and not a < ac:
            raise InadmissibleAlpha(f"need alpha < {ac:g}, got {a:g}")

    def family(self, alpha):
        if self.target == "subcritical":
            return build_subcritical_family(self.gauge, self.p, self.N, self.delta, alpha, self.h0)
        if self.target == "critical":
            return build_critical_family(self.gauge, self.N, self.R, self.delta, alpha, self.h0)
        from .distance import DomainShape
        dom = DomainShape("half-space", self.gauge, self.h0)
        return build_halfspace_family(dom, self.p, self.cube, alpha)

    def evaluate(self, alpha):
        u = self.family(alpha)
        if self.target == "subcritical":
            F = HardyFunctional("subcritical", self.p, self.N, self.gauge, h0=self.h0, res=self.res)
            return subcritical_quotient(u, F)
        if self.target == "critical":
            F = HardyFunctional("critical", self.N, self.N, self.gauge, R=self.R, h0=self.h0,
                                res=self.res)
            return critical_quotient(u, F)
        from .distance import DomainShape
        dom = DomainShape("half-space", self.gauge, self.h0)
        F = HardyFunctional("geometric", self.p, self.N, self.gauge, h0=self.h0, domain=dom,
                            res=self.res)
        R = self.cube
        bps = [(-R, R)] * (self.N - 1) + [(R,)]
        return geometric_quotient(u, F, breakpoints=bps)

    def config(self):
        return {"target": self.target, "gauge": self.gauge.record(), "alphas": list(self.alphas),
                "p": self.p, "N": self.N, "R": self.R, "delta": self.delta, "cube": self.cube}


@dataclass
class DecayFit:
    """``quotient - constant ~ prefactor * |alpha_c - alpha|^rate``."""

    rate: float
    prefactor: float
    points: int


def fit_decay(gaps, excess):
    gaps, excess = np.asarray(gaps, float), np.asarray(excess, float)
    ok = (gaps > 0) & (excess > 0)
    if ok.sum() < 2:
        return None
    k, b = np.polyfit(np.log(gaps[ok]), np.log(excess[ok]), 1)
    return DecayFit(float(k), float(np.exp(b)), int(ok.sum()))


def sweep(probe, final_gap=None, strict=True):
    """Evaluate the probe's family at every alpha and tabulate the approach.

    Rows: one ``quotient`` (>= constant) row per alpha, a monotonicity row
    (consecutive quotients never increase by more than the noise band plus
    the quadrature error), and a final-gap row when `final_gap` is given.
    With `strict`, a sequence that moves away from the constant raises
    `SweepDivergence`.
    """
    t0 = time.perf_counter()
    c = probe.constant
    results = [probe.evaluate(a) for a in probe.alphas]
    probe.quotients = [r.quotient for r in results]
    probe.errors = [r.quad_err for r in results]
    rep = ExperimentReport(f"sharpness-{probe.target}", config_hash=config_hash(probe.config()))
    for a, r in zip(probe.alphas, results):
        rep.add(CheckRow.at_least(f"{probe.target}:alpha={a:g}:quotient", r.quotient, c, 1e-6,
                                  "STATED", r.quad_err))
    worst = 0.0
    for i in range(1, len(results)):
        band = NOISE_BAND + results[i].quad_err + results[i - 1].quad_err
        rise = results[i].quotient - results[i - 1].quotient
        worst = max(worst, rise - band)
        if strict and rise > band:
            raise SweepDivergence(
                f"quotient rose from {results[i - 1].quotient:.8g} to {results[i].quotient:.8g} "
                f"at alpha={probe.alphas[i]:g}")
    if len(results) > 1:
        rep.add(CheckRow.at_most(f"{probe.target}:monotone_excess", max(worst, 0.0), 0.0, 0.0,
                                 "STATED"))
    last = results[-1]
    if final_gap is not None:
        rep.add(CheckRow.at_most(f"{probe.target}:final_gap", last.quotient - c, final_gap, 0.0,
                                 "STATED", last.quad_err))
    a_last = probe.alphas[-1]
    rep.notes["leading_ratio"] = last.quotient / abs(a_last) ** probe.p
    fit = fit_decay([abs(probe.critical_alpha - a) for a in probe.alphas],
                    [q - c for q in probe.quotients])
    if fit is not None:
        rep.notes["decay_rate"] = fit.rate
        rep.notes["decay_prefactor"] = fit.prefactor
    rep.notes["alphas"] = list(probe.alphas)
    rep.notes["quotients"] = list(probe.quotients)
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- non-attainability ------------------------------------------------------------------

def virtual_extremal_energy(target, p, N, cut, R=1.0, h0=None):
    """Energy of the would-be extremal on ``{cut < H0 < R}``.

    The profile is ``r^(-(N-p)/p)`` (subcritical) or ``log(R/r)^((N-1)/N)``
    (critical).  The radial energy grows like ``log(1/cut)`` and
    ``log log(R/cut)`` respectively, so it diverges as `cut` goes to 0.
    Multiplied by the anisotropic perimeter of the unit Wulff ball when
    `h0` is given.
    """
    omega = wulff_geometry(h0).omega if h0 is not None else 1.0
    if target == "subcritical":
        a = (N - p) / p
        # |U'|^p r^(N-1) = a^p / r
        return omega * abs(a) ** p * np.log(R / cut)
    if target == "critical":
        a = (N - 1) / N
        L0 = np.log(R / cut)
        # |U'|^N r^(N-1) = a^N / (r log(R/r)); integrate from cut to R/e
        return omega * a ** N * (np.log(L0) if L0 > 1 else 0.0)
    raise InvalidParameters("virtual extremal exists for subcritical and critical targets")


def non_attainment_report(target, gauge, p, N, corpus_quotients, cuts=(1e-2, 1e-4, 1e-8, 1e-16),
                          R=1.0, tol=1e-4):
    """Corpus fields stay above the constant by `tol`; the virtual extremal's energy grows."""
    h0 = _polar(gauge)
    c = sharp_constant(target, p, N)
    rep = ExperimentReport(f"non-attainment-{target}")
    gap = min(corpus_quotients) - c
    rep.add(CheckRow.at_least(f"{target}:min_corpus_gap", gap, tol, 0.0, "STATED"))
    energies = [virtual_extremal_energy(target, p, N, t, R, h0) for t in cuts]
    growth = min(np.diff(energies)) if len(energies) > 1 else 0.0
    rep.add(CheckRow.at_least(f"{target}:virtual_energy_growth", growth, 0.0, 0.0, "DERIVED"))
    rep.notes["virtual_energies"] = energies
    return rep
