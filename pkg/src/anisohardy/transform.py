"""Scalings that leave the Hardy quotients invariant, and the dimension bridge.

The subcritical quotient is invariant under ``u -> lam^((N-p)/p) u(lam x)``;
the critical quotient on a Wulff ball under the power map
``x -> (H0(x)/R)^(lam-1) x``, whose volume distortion is given by
`jacobian_factor`.  The bridge ``s = R exp(-r^(-alpha))`` carries radial
profiles on R^m to radial profiles on the Wulff ball in R^N and turns the
subcritical Hardy deficit (p = N) into a multiple of the critical one.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._parallel import pairwise_sum
from .errors import (BoundaryViolation, DegenerateMap, DivergentIntegral, InvalidParameters,
                     SingularPoint, SupportViolation)
from .fields import (Core, LiftedField, RadialProfile, ScalarField, Support, dilate, lift_radial,
                     scale_values)
from .hardy import Term, polar_integrals
from .quadrature import Resolution, _gl_panels, sphere_area
from .report import CheckRow, ExperimentReport
from .wulff import wulff_geometry


# -- the power map ---------------------------------------------------------------

def _check_map(c, a):
    if c <= 0:
        raise InvalidParameters(f"scale factor must be positive, got {c:g}")
    if 1 + a <= 0:
        raise DegenerateMap(f"the map y -> c H0(y)^a y is degenerate for a = {a:g} <= -1")


def power_map(c, a, h0, y):
    """``y -> c H0(y)^a y``."""
    _check_map(c, a)
    y = np.asarray(y, dtype=float)
    return c * h0.value(y)[..., None] ** a * y


def inverse_power_map(c, a, h0, x):
    x = np.asarray(x, dtype=float)
    rho = (h0.value(x) / c) ** (1.0 / (1 + a))
    return x / (c * rho[..., None] ** a)


def jacobian_factor(c, a, h0, y):
    """Determinant ``c^N (1+a) H0(y)^(aN)`` of the power map at `y`."""
    _check_map(c, a)
    hv = h0.value(np.asarray(y, dtype=float))
    if np.any(hv == 0):
        raise SingularPoint("the power map is not differentiable at the origin")
    return c ** h0.dim * (1 + a) * hv ** (a * h0.dim)


def jacobian_matrix(c, a, h0, y):
    """Analytic derivative ``c H0^a (I + a y (grad H0)^T / H0)``."""
    _check_map(c, a)
    y = np.asarray(y, dtype=float)
    hv = h0.value(y)
    g = h0.grad(y)
    eye = np.eye(h0.dim)
    outer = y[..., :, None] * g[..., None, :]
    return (c * hv ** a)[..., None, None] * (eye + (a / hv)[..., None, None] * outer)


def jacobian_numeric(c, a, h0, y, step=1e-6):
    """Central-difference derivative of the power map at a single point."""
    y = np.asarray(y, dtype=float)
    d = len(y)
    h = step * max(float(np.max(np.abs(y))), 1.0)
    cols = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        cols.append((power_map(c, a, h0, y + e) - power_map(c, a, h0, y - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def jacobian_check(h0, n=100, seed=0, a_range=(-0.9, 3.0), c_range=(0.2, 5.0), tol=1e-6):
    """Formula versus finite-difference determinant and the eigenvalue structure."""
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("jacobian")
    worst_det, worst_eig = 0.0, 0.0
    for _ in range(n):
        c = rng.uniform(*c_range)
        a = rng.uniform(*a_range)
        y = rng.normal(size=h0.dim)
        y *= rng.uniform(0.3, 3.0) / np.linalg.norm(y)
        jf = float(jacobian_factor(c, a, h0, y))
        jn = jacobian_numeric(c, a, h0, y)
        worst_det = max(worst_det, abs(np.linalg.det(jn) - jf) / jf)
        eig = np.sort(np.linalg.eigvals(jn).real)
        hv = float(h0.value(y))
        expect = np.sort([c * hv ** a] * (h0.dim - 1) + [c * (1 + a) * hv ** a])
        worst_eig = max(worst_eig, float(np.max(np.abs(eig - expect) / expect)))
    rep.add(CheckRow.close("det_rel_err", worst_det, 0.0, tol, "STATED"))
    rep.add(CheckRow.close("eig_rel_err", worst_eig, 0.0, tol, "STATED"))
    return rep


def pushforward_volume(c, a, h0, n=200_000, seed=0):
    """Monte Carlo volume of the image of the unit Wulff ball under the power map.

    Points are drawn uniformly in a box containing the image and kept when
    their preimage lies in the unit Wulff ball.  Returns (estimate, standard
    error, quadrature value of the integral of the Jacobian factor).
    """
    _check_map(c, a)
    rng = np.random.default_rng(seed)
    d = h0.dim
    g = h0.primal
    ext = 1.05 * c * g.value(np.eye(d))
    x = rng.uniform(-ext, ext, size=(n, d))
    y = inverse_power_map(c, a, h0, x)
    hit = h0.value(y) < 1
    box = float(np.prod(2 * ext))
    frac = hit.mean()
    est = box * frac
    se = box * np.sqrt(frac * (1 - frac) / n)
    # the Jacobian factor is H0-radial: its integral over the unit ball is
    # the anisotropic perimeter times a 1-D moment
    omega = wulff_geometry(h0).omega
    exact = omega * c ** d * (1 + a) / (a * d + d)
    return est, se, exact


# -- scalings ----------------------------------------------------------------

def subcritical_scale(u, lam, p, N):
    """``lam^((N-p)/p) u(lam x)``."""
    if lam <= 0:
        raise InvalidParameters("scale must be positive")
    k = lam ** ((N - p) / p)
    if isinstance(u, LiftedField):
        P = u.profile
        prof = RadialProfile(lambda r: k * P.value(lam * np.asarray(r)),
                             lambda r: k * lam * P.deriv(lam * np.asarray(r)),
                             R=P.R / lam, vanishes_at_R=P.vanishes_at_R, inner=P.inner / lam,
                             breakpoints=tuple(b / lam for b in P.breakpoints),
                             core=_scaled_core(P.core, lam), name=f"{P.name}@sub{lam:g}")
        return lift_radial(prof, u.h0, prof.name)
    return scale_values(dilate(u, lam), k, f"{u.name}@sub{lam:g}")


def _scaled_core(core, lam):
    if core is None:
        return None
    return replace(core, radius=core.radius / lam, ref=core.ref / lam)


def _critical_core(core, lam, R, r_out):
    if core is None:
        # make the default core of the original field explicit so it maps exactly
        core = Core("constant", 0.0, Resolution().inner_cut * r_out)
    rad = R * (core.radius / R) ** (1 / lam) if core.radius > 0 else 0.0
    if core.kind == "constant":
        return replace(core, radius=rad)
    if core.kind == "power":
        return replace(core, radius=rad, exponent=core.exponent * lam)
    if not np.isclose(core.ref, R):
        raise InvalidParameters("log-power cores transform exactly only when their reference is R")
    return replace(core, radius=rad)


def critical_scale(u, lam, N, R, h0=None):
    """``lam^(-(N-1)/N) u((H0(x)/R)^(lam-1) x)`` on the Wulff ball of radius R.

    Points at H0 = r map to H0 = R (r/R)^lam, so supports, breakpoints and
    the core radius move accordingly.
    """
    if lam <= 0:
        raise InvalidParameters("scale must be positive")
    h0 = h0 if h0 is not None else getattr(u, "h0", None)
    if h0 is None:
        raise InvalidParameters("critical scaling needs the polar gauge")
    lo, hi = u.support.radial_extent(h0)
    if hi > R * (1 + 1e-12):
        raise SupportViolation(f"field support reaches H0 = {hi:g} beyond R = {R:g}")
    k = lam ** (-(N - 1) / N)

    def back(r):
        return R * (r / R) ** (1 / lam)

    def fwd(r):
        return R * (np.asarray(r, float) / R) ** lam

    # images of evenly spaced original radii keep the radial rule as fine
    # where the map compresses the profile
    guide = tuple(back(t) for t in np.linspace(lo, hi, 9)[1:-1])

    if isinstance(u, LiftedField):
        P = u.profile

        def U(r):
            return k * P.value(fwd(r))

        def dU(r):
            r = np.asarray(r, float)
            with np.errstate(divide="ignore", invalid="ignore"):
                slope = np.where(r > 0, lam * (r / R) ** (lam - 1), 0.0)
            return k * P.deriv(fwd(r)) * slope

        prof = RadialProfile(U, dU, R=back(P.R), vanishes_at_R=P.vanishes_at_R,
                             inner=back(P.inner) if P.inner > 0 else 0.0,
                             breakpoints=tuple(sorted({back(b) for b in P.breakpoints} | set(guide))),
                             core=_critical_core(P.core, lam, R, hi), name=f"{P.name}@crit{lam:g}")
        return lift_radial(prof, u.h0, prof.name)

    def value(x):
        x = np.asarray(x, float)
        r = h0.value(x)
        y = ((r / R) ** (lam - 1))[..., None] * x
        return k * u.value(y)

    def grad(x):
        x = np.asarray(x, float)
        r = h0.value(x)
        f = (r / R) ** (lam - 1)
        gy = u.grad(f[..., None] * x)
        gh = h0.grad(x)
        proj = np.sum(gy * x, axis=-1) / r
        return k * f[..., None] * (gy + (lam - 1) * proj[..., None] * gh)

    def polar(rays, r, need_grad):
        rr = fwd(r)
        uu, du, gy = u.polar_eval(rays, rr, need_grad)
        slope = lam * (r / R) ** (lam - 1)
        g = None
        if need_grad:
            f = ((r / R) ** (lam - 1))[None, :, None]
            proj = np.einsum("mkn,mn->mk", gy, rays)
            g = k * f * (gy + (lam - 1) * proj[..., None] * h0.grad(rays)[:, None, :])
        return k * uu, k * du * slope[None, :], g

    s = u.support
    sup = Support("wulff", back(lo) if lo > 0 else 0.0, back(hi),
                  tuple(sorted({back(b) for b in s.breakpoints} | set(guide))))
    return ScalarField(value, grad, sup, _critical_core(u.core, lam, R, hi) if lo == 0 else None, f"{u.name}@crit{lam:g}",
                       u.dim, polar=polar)


# -- the bridge ------------------------------------------------------------------------

@dataclass(frozen=True)
class BridgeParams:
    """Subcritical dimension m, critical dimension N and Wulff radius R."""

    m: int
    N: int
    R: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or int(self.N) != self.N:
            raise InvalidParameters("dimensions must be integers")
        if not (self.N >= 2 and self.m > self.N):
            raise InvalidParameters(f"need m > N >= 2, got m={self.m}, N={self.N}")
        if self.R <= 0:
            raise InvalidParameters("R must be positive")

    @property
    def alpha(self):
        return (self.m - self.N) / (self.N - 1)

    def s_of_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(r > 0, self.R * np.exp(-np.where(r > 0, r, 1.0) ** (-self.alpha)), 0.0)

    def r_of_s(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            L = np.log(self.R / s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(L > 0, np.where(L > 0, L, 1.0) ** (-1 / self.alpha), np.inf)

    def ds_dr(self, r):
        r = np.asarray(r, dtype=float)
        return self.alpha * self.s_of_r(r) * r ** (-self.alpha - 1)


def bridge_map(profile, direction, params):
    """Carry a radial profile across the bridge.

    ``"critical->subcritical"`` turns w on (0, R) into ``u(r) = w(s(r))``;
    ``"subcritical->critical"`` turns u on (0, inf) into ``w(s) = u(r(s))``.
    The input must vanish at its outer end (R, resp. infinity).
    """
    P = params
    if not profile.vanishes_at_R:
        raise BoundaryViolation("bridge needs a profile that vanishes at its outer end")
    if direction == "critical->subcritical":
        if profile.R > P.R * (1 + 1e-12):
            raise SupportViolation(f"profile extends to {profile.R:g} beyond R = {P.R:g}")

        def U(r):
            return profile.value(P.s_of_r(r))

        def dU(r):
            r = np.asarray(r, float)
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                d = profile.deriv(P.s_of_r(r)) * P.ds_dr(r)
            return np.where(np.isfinite(d), d, 0.0)

        outer = float(P.r_of_s(profile.R)) if profile.R < P.R else np.inf
        core = None
        pc = profile.core
        if pc is not None and pc.radius > 0:
            rad = float(P.r_of_s(pc.radius))
            if pc.kind == "constant":
                core = replace(pc, radius=rad)
            elif pc.kind == "logpower" and np.isclose(pc.ref, P.R):
                # log(R/s)^a = r^(-alpha a)
                core = Core("power", P.alpha * pc.exponent, rad)
        return RadialProfile(U, dU, R=outer, vanishes_at_R=True,
                             inner=float(P.r_of_s(profile.inner)) if profile.inner > 0 else 0.0,
                             breakpoints=tuple(float(P.r_of_s(b)) for b in profile.breakpoints),
                             core=core, name=f"bridge({profile.name})")
    if direction == "subcritical->critical":
        def U(s):
            return profile.value(P.r_of_s(s))

        def dU(s):
            s = np.asarray(s, float)
            r = P.r_of_s(s)
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                d = profile.deriv(r) / P.ds_dr(r)
            return np.where(np.isfinite(d), d, 0.0)

        outer = float(P.s_of_r(profile.R)) if np.isfinite(profile.R) else P.R
        return RadialProfile(U, dU, R=outer, vanishes_at_R=True,
                             inner=float(P.s_of_r(profile.inner)) if profile.inner > 0 else 0.0,
                             breakpoints=tuple(float(P.s_of_r(b)) for b in profile.breakpoints),
                             core=None, name=f"bridge^-1({profile.name})")
    raise InvalidParameters(f"unknown bridge direction {direction!r}")


def _omega(dim, h0=None):
    return wulff_geometry(h0).omega if h0 is not None else sphere_area(dim)


def subcritical_deficit(u, params, omega=1.0, n_panels=160, n=16, tail=1e-14):
    """``I(u)`` for an H0-radial profile on R^m with p = N, by 1-D quadrature in log r.

    Returns (deficit, energy, mass).  Below the radius where s(r) underflows
    the profile follows its declared power core (constant when none is
    declared), and that piece is integrated in closed form.
    """
    P = params
    m, N = P.m, P.N
    r_lo = float(np.log(1e300) ** (-1 / P.alpha)) * 1.0
    r_hi = u.R if np.isfinite(u.R) else tail ** (-1 / P.alpha)
    if not r_hi > r_lo:
        raise DivergentIntegral("profile support does not reach beyond the underflow radius")
    edges = np.linspace(np.log(r_lo), np.log(r_hi), n_panels + 1)
    bps = [np.log(b) for b in u.breakpoints if r_lo < b < r_hi]
    edges = np.unique(np.concatenate([edges, bps]))
    t, w = _gl_panels(edges, n)
    r = np.exp(t)
    jac = w * r
    uu = u.value(r)
    du = u.deriv(r)
    if not (np.all(np.isfinite(uu)) and np.all(np.isfinite(du))):
        raise DivergentIntegral("profile is not finite on the integration range")
    energy = float(pairwise_sum(np.abs(du) ** N * r ** (m - 1) * jac))
    mass = float(pairwise_sum(np.abs(uu) ** N * r ** (m - N - 1) * jac))
    b = 0.0
    if u.core is not None and u.core.kind == "power" and u.core.radius >= r_lo:
        b = u.core.exponent
    sigma = m - N - b * N
    if sigma <= 0:
        raise DivergentIntegral("the mass term diverges at the origin")
    coef = abs(float(u.value(np.array([r_lo]))[0])) ** N * r_lo ** (m - N) / sigma
    mass += coef
    energy += abs(b) ** N * coef
    c = ((m - N) / N) ** N
    return omega * (energy - c * mass), omega * energy, omega * mass


def critical_deficit(w, params, h0, res=None):
    """``J(w)`` for the lift of `w` to the Wulff ball in R^N, with the polar engine."""
    P = params
    N = P.N
    f = lift_radial(w, h0)
    terms = [Term("du", N), Term("u", N, r_power=-N, log_power=-N, log_ref=P.R)]
    out = polar_integrals(f, h0, terms, res or Resolution(), P.R)
    energy, mass = (float(v) for v in out.values)
    c = ((N - 1) / N) ** N
    return energy - c * mass, energy, mass


def bridge_identity_check(w, params, h0, omega_m=None, tol=1e-6, res=None, u=None):
    """Check ``I(u) = (omega_m / omega_N) alpha^(N-1) J(w)`` for ``u = bridge(w)``.

    `omega_m` is the perimeter of the unit Wulff ball in R^m (Euclidean by
    default); `omega_N` is taken from `h0`.
    """
    P = params
    if u is None:
        u = bridge_map(w, "critical->subcritical", P)
    om_m = omega_m if omega_m is not None else sphere_area(P.m)
    om_n = wulff_geometry(h0).omega
    I, Ie, Im = subcritical_deficit(u, P, om_m)
    J, Je, Jm = critical_deficit(w, P, h0, res)
    factor = om_m / om_n * P.alpha ** (P.N - 1)
    rep = ExperimentReport(f"bridge(m={P.m},N={P.N})")
    tag = f"m={P.m}:N={P.N}:{w.name}"
    if J == 0 and I == 0:
        rep.add(CheckRow.close(f"{tag}:identity", 0.0, 0.0, tol, "STATED"))
        return rep
    rep.add(CheckRow.close(f"{tag}:identity", I, factor * J, tol, "STATED", rel=True))
    rep.add(CheckRow.close(f"{tag}:energy", Ie, factor * Je, tol, "DERIVED", rel=True))
    rep.add(CheckRow.close(f"{tag}:mass", Im, factor * Jm / P.alpha ** P.N, tol, "DERIVED", rel=True))
    rep.notes.update({"I": I, "J": J, "factor": factor})
    return rep


def scaling_correspondence_check(u, params, lam, samples, tol=1e-10):
    """Check ``w^lam(s(r)) = u_mu(r)`` with ``mu = lam^(-1/alpha)`` at radii `samples`.

    ``u_mu(r) = mu^((m-N)/N) u(mu r)``, ``w^lam(s) = lam^(-(N-1)/N) w(R^(1-lam) s^lam)``
    and ``w`` is the bridge image of ``u``.
    """
    P = params
    m, N, R = P.m, P.N, P.R
    w = bridge_map(u, "subcritical->critical", P)
    mu = lam ** (-1 / P.alpha)
    r = np.asarray(samples, dtype=float)
    lhs = lam ** (-(N - 1) / N) * w.value(R ** (1 - lam) * P.s_of_r(r) ** lam)
    rhs = mu ** ((m - N) / N) * u.value(mu * r)
    resid = float(np.max(np.abs(lhs - rhs)))
    rep = ExperimentReport(f"bridge-scaling(m={m},N={N})")
    rep.add(CheckRow.close(f"m={m}:N={N}:lam={lam:g}:residual", resid, 0.0, tol, "STATED"))
    return rep
