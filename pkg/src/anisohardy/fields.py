"""Test functions: general fields, H0-radial profiles and a named corpus.

A `ScalarField` is a vectorized value/gradient pair with a support
descriptor.  Fields that are singular at the origin declare a `Core`: the
exact form ``u(r w) = c(w) g(r)`` they take on the Wulff ball of radius
``core.radius``, so integrals over that ball can be done in closed form.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._parallel import pairwise_sum
from .errors import (BoundaryViolation, InvalidParameters, SingularPoint,
                     SupportViolation)
from .report import CheckRow, ExperimentReport
from .wulff import polar_frame

FD_STEP = 1e-6


# -- support and core descriptors ---------------------------------------------

@dataclass(frozen=True)
class Support:
    """Where a field may be nonzero.

    ``kind="wulff"``: the Wulff annulus ``inner <= H0 <= outer`` (inner 0
    means the support reaches the origin).  ``kind="box"``: the box
    ``lo <= x <= hi``; ``kind="ball"``: a Euclidean ball.  `breakpoints`
    lists H0 radii where the field is only Lipschitz.
    """

    kind: str = "wulff"
    inner: float = 0.0
    outer: float = 1.0
    breakpoints: tuple = ()
    lo: tuple = ()
    hi: tuple = ()
    center: tuple = ()
    radius: float = 0.0

    def radial_extent(self, h0):
        """Bounds (rmin, rmax) of H0 over the support."""
        if self.kind == "wulff":
            return float(self.inner), float(self.outer)
        g = h0.primal if hasattr(h0, "primal") else None
        alpha = g.alpha if g is not None else 1.0 / h0.beta
        beta = g.beta if g is not None else 1.0 / h0.alpha
        if self.kind == "box":
            lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
            corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(len(lo), -1).T
            rmax = float(np.max(h0.value(corners)))
            nearest = np.clip(0.0, lo, hi)
            rmin = float(np.linalg.norm(nearest)) / beta
            return rmin, rmax
        if self.kind == "ball":
            c = float(np.linalg.norm(self.center))
            return max(c - self.radius, 0.0) / beta, (c + self.radius) / alpha
        raise InvalidParameters(f"unknown support kind {self.kind!r}")

    def contains_origin(self):
        if self.kind == "wulff":
            return self.inner == 0
        if self.kind == "box":
            return bool(np.all(np.asarray(self.lo) < 0) and np.all(np.asarray(self.hi) > 0))
        return float(np.linalg.norm(self.center)) < self.radius

    def box(self, h0=None):
        """Axis-aligned bounding box (lo, hi) of the support."""
        if self.kind == "box":
            return np.asarray(self.lo, float), np.asarray(self.hi, float)
        if self.kind == "ball":
            c = np.asarray(self.center, float)
            return c - self.radius, c + self.radius
        # Wulff ball of radius outer: |x_i| <= outer * H(e_i)
        g = h0.primal
        d = g.dim
        ext = self.outer * g.value(np.eye(d))
        return -ext, ext


@dataclass(frozen=True)
class Core:
    """Exact form of a field on the Wulff ball of radius `radius`.

    ``kind="constant"``: u is constant along each ray; ``"power"``:
    ``u = c * r^(-exponent)``; ``"logpower"``: ``u = c * log(ref/r)^exponent``.
    """

    kind: str = "constant"
    exponent: float = 0.0
    radius: float = 0.0
    ref: float = 1.0

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.ones_like(r)
        if self.kind == "power":
            return r ** (-self.exponent)
        if self.kind == "logpower":
            return np.log(self.ref / r) ** self.exponent
        raise InvalidParameters(f"unknown core kind {self.kind!r}")


# -- fields -------------------------------------------------------------------

def _fd_gradient(f, x, step=FD_STEP):
    x = np.asarray(x, dtype=float)
    h = step * np.maximum(np.linalg.norm(x, axis=-1), 1.0)
    out = np.empty(x.shape)
    for i in range(x.shape[-1]):
        e = np.zeros(x.shape[-1])
        e[i] = 1.0
        dx = h[..., None] * e
        out[..., i] = (f(x + dx) - f(x - dx)) / (2 * h)
    return out


class ScalarField:
    """A test function u with gradient.

    Parameters
    ----------
    value : callable
        Vectorized ``u(x)`` for points of shape (..., N).
    grad : callable, optional
        Vectorized gradient; central differences are used when omitted.
    support : Support
    core : Core, optional
        Exact behaviour near the origin for fields singular there.
    dim : int, optional
        Dimension the field is defined in (None: any).
    polar : callable, optional
        Fast ``polar(rays, r, need_grad)`` with the contract of `polar_eval`.
    """

    def __init__(self, value, grad=None, support=Support(), core=None, name="field",
                 dim=None, radial=None, polar=None):
        self._value = value
        self._grad = grad
        self._polar = polar
        self.support = support
        self.core = core
        self.name = name
        self.dim = dim
        self.radial = radial

    def __repr__(self):
        return f"ScalarField({self.name!r})"

    def value(self, x):
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    __call__ = value

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self._grad is None:
            return _fd_gradient(self._value, x)
        return np.asarray(self._grad(x), dtype=float)

    @property
    def has_analytic_grad(self):
        return self._grad is not None

    def polar_eval(self, rays, r, need_grad=False):
        """Values, radial derivatives and optionally gradients at ``r * rays``.

        Returns arrays of shape (m, k) (and (m, k, N) for the gradient)
        for rays (m, N) on the unit Wulff sphere and radii (k,).
        """
        if self._polar is not None:
            return self._polar(rays, r, need_grad)
        x = r[None, :, None] * rays[:, None, :]
        u = self.value(x)
        g = self.grad(x)
        du = np.einsum("mkn,mn->mk", g, rays)
        return u, du, (g if need_grad else None)

    def check_gradient(self, samples, rel_tol=1e-5):
        """Max relative mismatch between `grad` and central differences."""
        x = np.asarray(samples, dtype=float)
        ga = self.grad(x)
        gf = _fd_gradient(self._value, x)
        scale = np.maximum(np.linalg.norm(gf, axis=-1), 1e-8)
        err = float(np.max(np.linalg.norm(ga - gf, axis=-1) / scale))
        return err, err <= rel_tol


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A one-variable profile U(r) on (0, R) with derivative U'(r).

    `vanishes_at_R` records that U(R) = 0; `breakpoints` lists kinks.
    """

    U: object
    dU: object = None
    R: float = 1.0
    vanishes_at_R: bool = True
    inner: float = 0.0
    breakpoints: tuple = ()
    core: Core | None = None
    name: str = "profile"

    def __call__(self, r):
        return self.value(r)

    def value(self, r):
        return np.asarray(self.U(np.asarray(r, dtype=float)), dtype=float)

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        if self.dU is None:
            h = FD_STEP * np.maximum(np.abs(r), 1.0)
            return (self.value(r + h) - self.value(r - h)) / (2 * h)
        return np.asarray(self.dU(r), dtype=float)

    def check_derivative(self, samples, rel_tol=1e-5):
        r = np.asarray(samples, dtype=float)
        h = FD_STEP * np.maximum(np.abs(r), 1.0)
        fd = (self.value(r + h) - self.value(r - h)) / (2 * h)
        scale = np.maximum(np.abs(fd), 1e-8)
        err = float(np.max(np.abs(self.deriv(r) - fd) / scale))
        return err, err <= rel_tol


class LiftedField(ScalarField):
    """``u(x) = U(H0(x))`` with ``grad u = U'(H0) grad H0``."""

    def __init__(self, profile, h0, name=None):
        self.profile = profile
        self.h0 = h0
        support = Support("wulff", profile.inner, profile.R, tuple(profile.breakpoints))
        super().__init__(self._lift_value, self._lift_grad, support, profile.core,
                         name or profile.name, dim=h0.dim, radial=profile)

    def _lift_value(self, x):
        return self.profile.value(self.h0.value(x))

    def _lift_grad(self, x):
        r = self.h0.value(x)
        if np.any(r == 0):
            raise SingularPoint("gradient of an H0-radial field is undefined at the origin")
        return self.profile.deriv(r)[..., None] * self.h0.grad(x)

    def polar_eval(self, rays, r, need_grad=False):
        # H0(r * ray) = r for rays on the unit Wulff sphere, and the radial
        # derivative ray . grad H0(ray) equals 1.
        m = len(rays)
        u = np.broadcast_to(self.profile.value(r), (m, len(r)))
        du = np.broadcast_to(self.profile.deriv(r), (m, len(r)))
        g = None
        if need_grad:
            g = du[:, :, None] * self.h0.grad(rays)[:, None, :]
        return u, du, g


def lift_radial(profile, h0, name=None):
    """H0-radial field ``u(x) = U(H0(x))``."""
    return LiftedField(profile, h0, name)


# -- symmetrization and pointwise radial bounds ----------------------------------

class SymmetrizedProfile(RadialProfile):
    pass


def symmetrize(u, h0, R, p, rule=None, angular=None):
    """Spherical L^p mean of `u` over Wulff spheres.

    Returns the profile ``Ubar(r) = (mean over the Wulff sphere of
    |u(r w)|^p)^(1/p)``, the mean taken against the anisotropic surface
    measure.  The derivative is computed under the integral sign from
    ``|u|^(p-2) u du/dr``; for p < 2 it falls back to finite differences.
    """
    if p < 1:
        raise InvalidParameters("symmetrization needs p >= 1")
    lo, hi = u.support.radial_extent(h0)
    if hi > R * (1 + 1e-12):
        raise SupportViolation(f"field support reaches H0 = {hi:g} beyond R = {R:g}")
    frame = polar_frame(h0, angular)
    total = float(pairwise_sum(frame.weights))

    def _means(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        uu, du, _ = u.polar_eval(frame.rays, r)
        a = np.abs(uu)
        m_val = pairwise_sum(frame.weights[:, None] * a ** p) / total
        if p >= 2:
            m_der = pairwise_sum(frame.weights[:, None] * a ** (p - 2) * uu * du) / total
        else:
            m_der = None
        return m_val, m_der

    def U(r):
        shape = np.shape(r)
        m_val, _ = _means(r)
        return (m_val ** (1.0 / p)).reshape(shape)

    def dU(r):
        shape = np.shape(r)
        m_val, m_der = _means(r)
        if m_der is None:
            rr = np.atleast_1d(np.asarray(r, dtype=float))
            h = 1e-6 * np.maximum(rr, 1.0)
            return ((U(rr + h) - U(rr - h)) / (2 * h)).reshape(shape)
        ubar = m_val ** (1.0 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(ubar > 0, ubar ** (1 - p) * m_der, 0.0)
        return d.reshape(shape)

    return SymmetrizedProfile(U, dU, R=R, vanishes_at_R=True, inner=lo,
                              breakpoints=tuple(u.support.breakpoints), core=u.core,
                              name=f"sym({u.name})")


def radial_bound_constant(p, N):
    """Hoelder constant of the subcritical pointwise bound, 1 < p < N."""
    return ((p - 1) / (N - p)) ** ((p - 1) / p)


def radial_pointwise_bounds(U, p, N, R, r_samples, n_nodes=48, n_panels=24, tol=1e-8):
    """Check the pointwise decay bounds of a profile vanishing at R.

    Subcritical (1 < p < N)::

        |U(r)| <= ((p-1)/(N-p))^((p-1)/p) (int_r^R |U'|^p s^(N-1) ds)^(1/p) r^(-(N-p)/p)

    Critical (p = N)::

        |U(r)| <= (int_r^R |U'|^N s^(N-1) ds)^(1/N) log(R/r)^((N-1)/N)

    Each row's value is the slack (right side minus |U(r)|); the report
    passes when every slack is >= -tol.
    """
    if not (1 < p < N or p == N):
        raise InvalidParameters("pointwise bounds need 1 < p < N or p = N")
    u_end = float(np.abs(U.value(np.array([R * (1 - 1e-12)]))[0]))
    if U.vanishes_at_R is False or u_end > 1e-8:
        raise BoundaryViolation(f"profile does not vanish at R (|U(R)| = {u_end:g})")
    from .quadrature import panel_rule

    report = ExperimentReport("radial_bounds")
    bps = [b for b in U.breakpoints]
    for r in np.atleast_1d(r_samples):
        r = float(r)
        edges = sorted({r, R, *[b for b in bps if r < b < R]})
        # geometric panels toward R keep log-type behaviour there resolved
        fine = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            t = 1 - 0.5 ** np.arange(n_panels + 1)
            t[-1] = 1.0
            fine.extend(lo + (hi - lo) * t[:-1])
        fine.append(R)
        rule = panel_rule(np.array(fine), n_nodes, coarse=False)
        energy = rule.integrate(lambda s: np.abs(U.deriv(s)) ** p * s ** (N - 1))
        if p < N:
            rhs = radial_bound_constant(p, N) * energy ** (1 / p) * r ** (-(N - p) / p)
        else:
            rhs = energy ** (1 / N) * np.log(R / r) ** ((N - 1) / N)
        lhs = float(np.abs(U.value(np.array([r]))[0]))
        report.add(CheckRow.at_least(f"slack@r={r:g}", rhs - lhs, 0.0, tol, provenance="DERIVED"))
        report.notes[f"lhs@r={r:g}"] = lhs
        report.notes[f"rhs@r={r:g}"] = rhs
    return report


# -- wrappers -------------------------------------------------------------------

def scale_values(u, c, name=None):
    def polar(rays, r, need_grad):
        uu, du, gg = u.polar_eval(rays, r, need_grad)
        return c * uu, c * du, (c * gg if need_grad else None)

    return ScalarField(lambda x: c * u.value(x), lambda x: c * u.grad(x), u.support, u.core,
                       name or f"{c:g}*{u.name}", u.dim, u.radial, polar=polar)


def dilate(u, lam, name=None):
    """``x -> u(lam x)`` with the support and core rescaled."""
    lam = float(lam)
    s = u.support
    sup = replace(s, inner=s.inner / lam, outer=s.outer / lam,
                  breakpoints=tuple(b / lam for b in s.breakpoints),
                  lo=tuple(np.asarray(s.lo, float) / lam) if s.lo else (),
                  hi=tuple(np.asarray(s.hi, float) / lam) if s.hi else (),
                  center=tuple(np.asarray(s.center, float) / lam) if s.center else (),
                  radius=s.radius / lam)
    core = None
    if u.core is not None:
        core = replace(u.core, radius=u.core.radius / lam, ref=u.core.ref / lam)

    def polar(rays, r, need_grad):
        uu, du, gg = u.polar_eval(rays, lam * r, need_grad)
        return uu, lam * du, (lam * gg if need_grad else None)

    return ScalarField(lambda x: u.value(lam * x), lambda x: lam * u.grad(lam * x), sup, core,
                       name or f"{u.name}(x*{lam:g})", u.dim, polar=polar)


# -- corpus -------------------------------------------------------------------

def _bump(t):
    # exp(1 - 1/(1 - t^2)) on |t| < 1, smooth and equal to 1 at t = 0
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    s = np.where(inside, 1 - t * t, 1.0)
    return np.where(inside, np.exp(1 - 1 / s), 0.0)


def _dbump(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    s = np.where(inside, 1 - t * t, 1.0)
    return np.where(inside, np.exp(1 - 1 / s) * (-2 * t) / s ** 2, 0.0)


def bump_profile(radius=1.0):
    return RadialProfile(lambda r: _bump(r / radius), lambda r: _dbump(r / radius) / radius,
                         R=radius, name="bump")


def annulus_bump_profile(r1=1.0, r2=2.0):
    mid, half = 0.5 * (r1 + r2), 0.5 * (r2 - r1)
    # both flanks rise steeply; panel edges there keep equal-panel rules accurate
    bps = tuple(mid + half * np.array([-0.85, -0.5, 0.5, 0.85]))
    return RadialProfile(lambda r: _bump((r - mid) / half), lambda r: _dbump((r - mid) / half) / half,
                         R=r2, inner=r1, breakpoints=bps, name="annulus_bump")


def truncated_power_profile(a, delta=1.0):
    """``r^(-a)`` on (0, delta), linear taper to 0 at 2 delta."""
    def U(r):
        r = np.asarray(r, dtype=float)
        inner = np.where(r > 0, r, 1.0) ** (-a)
        return np.where(r <= delta, inner, np.where(r < 2 * delta, delta ** (-a - 1) * (2 * delta - r), 0.0))

    def dU(r):
        r = np.asarray(r, dtype=float)
        inner = -a * np.where(r > 0, r, 1.0) ** (-a - 1)
        return np.where(r <= delta, inner, np.where(r < 2 * delta, -delta ** (-a - 1), 0.0))

    return RadialProfile(U, dU, R=2 * delta, breakpoints=(delta,),
                         core=Core("power", a, delta), name=f"truncated_power(a={a:g})")


def truncated_log_power_profile(a, R=1.0, delta=None):
    """``log(R/r)^a`` on (0, delta), linear taper to 0 at 2 delta."""
    delta = R / 4 if delta is None else delta
    L = np.log(R / delta)

    def U(r):
        r = np.asarray(r, dtype=float)
        rr = np.clip(r, 1e-300, delta)
        inner = np.log(R / rr) ** a
        return np.where(r <= delta, inner,
                        np.where(r < 2 * delta, L ** a * (2 * delta - r) / delta, 0.0))

    def dU(r):
        r = np.asarray(r, dtype=float)
        rr = np.clip(r, 1e-300, delta)
        inner = -a * np.log(R / rr) ** (a - 1) / rr
        return np.where(r <= delta, inner, np.where(r < 2 * delta, -L ** a / delta, 0.0))

    return RadialProfile(U, dU, R=2 * delta, breakpoints=(delta,),
                         core=Core("logpower", a, delta, R), name=f"truncated_log_power(a={a:g})")


def plateau_profile(r0=0.5, r1=1.0):
    """1 on (0, r0), smooth decay to 0 at r1."""
    def step(t):
        t = np.clip(t, 0.0, 1.0)
        a = _bump_half(t)
        b = _bump_half(1 - t)
        return b / (a + b)

    def U(r):
        return step((np.asarray(r, float) - r0) / (r1 - r0))

    def dU(r):
        r = np.asarray(r, float)
        t = (r - r0) / (r1 - r0)
        inside = (t > 0) & (t < 1)
        tt = np.where(inside, t, 0.5)
        a, b = _bump_half(tt), _bump_half(1 - tt)
        da, db = _dbump_half(tt), -_dbump_half(1 - tt)
        d = (db * (a + b) - b * (da + db)) / (a + b) ** 2
        return np.where(inside, d / (r1 - r0), 0.0)

    return RadialProfile(U, dU, R=r1, breakpoints=(r0,), core=Core("constant", 0.0, r0),
                         name="plateau")


def _bump_half(t):
    t = np.asarray(t, float)
    pos = t > 0
    return np.where(pos, np.exp(-1 / np.where(pos, t, 1.0)), 0.0)


def _dbump_half(t):
    t = np.asarray(t, float)
    pos = t > 0
    tt = np.where(pos, t, 1.0)
    return np.where(pos, np.exp(-1 / tt) / tt ** 2, 0.0)


def decreasing_linear_profile(R=1.0):
    return RadialProfile(lambda r: np.clip(1 - np.asarray(r, float) / R, 0.0, None),
                         lambda r: np.where(np.asarray(r, float) < R, -1.0 / R, 0.0),
                         R=R, name="decreasing_linear")


def paraboloid_profile(R=1.0):
    return RadialProfile(lambda r: np.clip(1 - (np.asarray(r, float) / R) ** 2, 0.0, None),
                         lambda r: np.where(np.asarray(r, float) < R, -2 * np.asarray(r, float) / R ** 2, 0.0),
                         R=R, name="paraboloid")


def gaussian_profile(cutoff=6.0):
    return RadialProfile(lambda r: np.where(np.asarray(r, float) < cutoff, np.exp(-np.asarray(r, float) ** 2), 0.0),
                         lambda r: np.where(np.asarray(r, float) < cutoff,
                                            -2 * np.asarray(r, float) * np.exp(-np.asarray(r, float) ** 2), 0.0),
                         R=cutoff, vanishes_at_R=False, name="gaussian")


def tilted(u, coeffs, name=None):
    """``(1 + c . x) u(x)``: breaks H0-radial symmetry while keeping the support."""
    c = np.asarray(coeffs, dtype=float)

    def value(x):
        return (1 + x[..., : len(c)] @ c) * u.value(x)

    def grad(x):
        g = (1 + x[..., : len(c)] @ c)[..., None] * u.grad(x)
        g[..., : len(c)] += u.value(x)[..., None] * c
        return g

    def polar(rays, r, need_grad):
        uu, du, gg = u.polar_eval(rays, r, need_grad)
        cr = rays[:, : len(c)] @ c
        factor = 1 + cr[:, None] * r[None, :]
        out_g = None
        if need_grad:
            out_g = factor[..., None] * gg
            out_g[..., : len(c)] += uu[..., None] * c
        return factor * uu, cr[:, None] * uu + factor * du, out_g

    return ScalarField(value, grad, u.support, u.core, name or f"tilted({u.name})", u.dim,
                       polar=polar)


def x1_weighted(h0, power=2, R=1.0):
    """``x_1 (1 - H0/R)_+^power``, odd in x_1 and non-radial."""
    def value(x):
        return x[..., 0] * np.clip(1 - h0.value(x) / R, 0.0, None) ** power

    def grad(x):
        r = h0.value(x)
        t = np.clip(1 - r / R, 0.0, None)
        g = -(power / R) * (x[..., 0] * t ** (power - 1))[..., None] * h0.grad(x)
        g[..., 0] += t ** power
        return g

    def polar(rays, r, need_grad):
        t = np.clip(1 - r / R, 0.0, None)
        x1 = rays[:, :1] * r[None, :]
        uu = x1 * t ** power
        du = rays[:, :1] * (t ** power - r * (power / R) * t ** (power - 1))
        gg = None
        if need_grad:
            gg = -(power / R) * (x1 * t ** (power - 1))[..., None] * h0.grad(rays)[:, None, :]
            gg[..., 0] += t ** power
        return uu, du, gg

    return ScalarField(value, grad, Support("wulff", 0.0, R), Core("constant", 0.0, 0.0),
                       "x1_bump", h0.dim, polar=polar)


def euclidean_ball_bump(center, radius, name="offcenter_bump"):
    c = np.asarray(center, dtype=float)

    def value(x):
        return _bump(np.linalg.norm(x - c, axis=-1) / radius)

    def grad(x):
        d = x - c
        n = np.linalg.norm(d, axis=-1)
        nn = np.where(n > 0, n, 1.0)
        return (_dbump(n / radius) / radius / nn)[..., None] * d

    return ScalarField(value, grad, Support("ball", center=tuple(c), radius=float(radius)),
                       None, name, len(c))


def box_bump(lo, hi, name="box_bump"):
    """Product of 1-D bumps filling the box ``lo < x < hi``."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def value(x):
        return np.prod(_bump((x - mid) / half), axis=-1)

    def grad(x):
        t = (x - mid) / half
        b = _bump(t)
        db = _dbump(t) / half
        out = np.empty(np.shape(x))
        for i in range(len(lo)):
            others = np.prod(np.delete(b, i, axis=-1), axis=-1)
            out[..., i] = db[..., i] * others
        return out

    return ScalarField(value, grad, Support("box", lo=tuple(lo), hi=tuple(hi)), None, name, len(lo))


def face_profile_field(lo, hi, power, name="face_power"):
    """``x_N^power`` times bumps in the other coordinates, cut off smoothly at hi_N.

    Vanishes like ``x_N^power`` at the face x_N = 0.
    """
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    top = hi[-1]

    def cut(t):
        # 1 - smoothstep on (top/2, top)
        s = np.clip((t - top / 2) / (top / 2), 0.0, 1.0)
        return 1 - s * s * (3 - 2 * s), -6 * s * (1 - s) / (top / 2)

    def value(x):
        xn = np.clip(x[..., -1], 0.0, None)
        c, _ = cut(xn)
        return np.prod(_bump((x[..., :-1] - mid[:-1]) / half[:-1]), axis=-1) * xn ** power * c

    def grad(x):
        xn = np.clip(x[..., -1], 0.0, None)
        c, dc = cut(xn)
        t = (x[..., :-1] - mid[:-1]) / half[:-1]
        b = _bump(t)
        db = _dbump(t) / half[:-1]
        prod = np.prod(b, axis=-1)
        out = np.empty(np.shape(x))
        for i in range(len(lo) - 1):
            out[..., i] = db[..., i] * np.prod(np.delete(b, i, axis=-1), axis=-1) * xn ** power * c
        with np.errstate(divide="ignore", invalid="ignore"):
            dpow = np.where(xn > 0, power * xn ** (power - 1), 0.0)
        out[..., -1] = prod * (dpow * c + xn ** power * dc)
        return out

    sup = Support("box", lo=tuple(np.r_[lo[:-1], 0.0]), hi=tuple(hi))
    f = ScalarField(value, grad, sup, None, name, len(lo))
    f.face_power = float(power)
    return f


CORPUS_NAMES = (
    "bump", "tilted_bump", "x1_bump", "truncated_power", "truncated_log_power",
    "annulus_bump", "tilted_annulus", "offcenter_bump", "decreasing_linear",
    "plateau", "gaussian", "paraboloid",
)


def corpus_field(name, h0, **params):
    """Build a named corpus field for the polar gauge `h0`."""
    d = h0.dim
    if name == "bump":
        return lift_radial(bump_profile(params.get("radius", 1.0)), h0)
    if name == "tilted_bump":
        return tilted(lift_radial(bump_profile(params.get("radius", 1.0)), h0),
                      params.get("coeffs", [0.5, 0.3]), "tilted_bump")
    if name == "x1_bump":
        return x1_weighted(h0, params.get("power", 2), params.get("radius", 1.0))
    if name == "truncated_power":
        return lift_radial(truncated_power_profile(params.get("a", 0.2), params.get("delta", 0.5)), h0,
                           "truncated_power")
    if name == "truncated_log_power":
        return lift_radial(truncated_log_power_profile(params.get("a", 0.25), params.get("R", 1.0),
                                                       params.get("delta")), h0, "truncated_log_power")
    if name == "annulus_bump":
        return lift_radial(annulus_bump_profile(params.get("r1", 1.0), params.get("r2", 2.0)), h0)
    if name == "tilted_annulus":
        return tilted(lift_radial(annulus_bump_profile(params.get("r1", 1.0), params.get("r2", 2.0)), h0),
                      params.get("coeffs", [0.2, -0.15]), "tilted_annulus")
    if name == "offcenter_bump":
        c = np.zeros(d)
        c[0], c[1] = 0.6, 0.25
        return euclidean_ball_bump(params.get("center", c), params.get("radius", 0.35))
    if name == "decreasing_linear":
        return lift_radial(decreasing_linear_profile(params.get("radius", 1.0)), h0)
    if name == "plateau":
        return lift_radial(plateau_profile(params.get("r0", 0.5), params.get("r1", 1.0)), h0)
    if name == "gaussian":
        return lift_radial(gaussian_profile(params.get("cutoff", 6.0)), h0)
    if name == "paraboloid":
        return lift_radial(paraboloid_profile(params.get("radius", 1.0)), h0)
    raise InvalidParameters(f"unknown corpus field {name!r}; known: {', '.join(CORPUS_NAMES)}")


def corpus(h0, names=CORPUS_NAMES):
    return [corpus_field(n, h0) for n in names]
