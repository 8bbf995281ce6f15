"""Convex model domains, the anisotropic boundary distance and its PDE checks."""

import warnings

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import (DegenerateGradient, InvalidParameters, OutsideDomain,
                     RidgeProximityWarning, UnboundedDomain)
from .fields import ScalarField, Support
from .gauge import polar as _polar
from .report import CheckRow, ExperimentReport

KINDS = ("wulff-ball", "half-space", "cube", "polytope")


class DomainShape:
    """A convex domain together with the gauge that measures distances.

    Parameters
    ----------
    kind : {"wulff-ball", "half-space", "cube", "polytope"}
        ``wulff-ball`` is {H0 < R}; ``half-space`` is {x_N > 0}; ``cube``
        is the open cube of edge `side` centred at the origin; ``polytope``
        is {x : A x < b}.
    gauge : Gauge
    h0 : PolarGauge, optional
        Polar of `gauge` (computed analytically when omitted).
    """

    def __init__(self, kind, gauge, h0=None, R=1.0, side=2.0, A=None, b=None):
        if kind not in KINDS:
            raise InvalidParameters(f"unknown domain kind {kind!r}")
        self.kind = kind
        self.gauge = gauge
        self.h0 = h0 if h0 is not None else _polar(gauge)
        self.dim = gauge.dim
        self.R = float(R)
        self.side = float(side)
        if kind == "wulff-ball" and not self.R > 0:
            raise InvalidParameters("Wulff ball radius must be positive")
        if kind == "cube":
            if not self.side > 0:
                raise InvalidParameters("cube side must be positive")
            eye = np.eye(self.dim)
            A, b = np.concatenate([eye, -eye]), np.full(2 * self.dim, self.side / 2)
        elif kind == "half-space":
            A = np.zeros((1, self.dim))
            A[0, -1] = -1.0
            b = np.zeros(1)
        if kind in ("cube", "half-space", "polytope"):
            A = np.asarray(A, dtype=float)
            b = np.asarray(b, dtype=float)
            if A.ndim != 2 or A.shape[1] != self.dim or b.shape != (A.shape[0],):
                raise InvalidParameters("polytope needs A of shape (m, N) and b of shape (m,)")
            self.A, self.b = A, b
            self._face_norm = gauge.value(A)
        self._tau = None

    def __repr__(self):
        extra = {"wulff-ball": f"R={self.R:g}", "cube": f"side={self.side:g}"}.get(self.kind, "")
        return f"DomainShape({self.kind!r}, {extra})"

    @property
    def bounded(self):
        if self.kind in ("wulff-ball", "cube"):
            return True
        if self.kind == "half-space":
            return False
        res = linprog(np.zeros(self.dim), A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dim)
        if res.status != 0:
            return False
        for i in range(self.dim):
            for s in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = -s
                r = linprog(c, A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dim)
                if r.status == 3:
                    return False
        return True

    # -- membership and distance ----------------------------------------------

    def _face_distances(self, x):
        return (self.b - x @ self.A.T) / self._face_norm

    def contains(self, x, closed=True, tol=1e-12):
        x = np.asarray(x, dtype=float)
        if self.kind == "wulff-ball":
            r = self.h0.value(x)
            return r <= self.R * (1 + tol) if closed else r < self.R
        d = np.min(self._face_distances(x), axis=-1)
        return d >= -tol if closed else d > 0

    def distance(self, x):
        """Anisotropic distance to the boundary, ``inf_y H0(x - y)``."""
        x = np.asarray(x, dtype=float)
        if not np.all(self.contains(x)):
            raise OutsideDomain("distance is only defined on the closed domain")
        return self._distance(x)

    def _distance(self, x):
        if self.kind == "wulff-ball":
            return np.clip(self.R - self.h0.value(x), 0.0, None)
        return np.clip(np.min(self._face_distances(x), axis=-1), 0.0, None)

    def distance_grad(self, x):
        """Gradient of the distance (a.e.); at ridges the lowest face index wins."""
        x = np.asarray(x, dtype=float)
        if self.kind == "wulff-ball":
            return -self.h0.grad(x)
        j = np.argmin(self._face_distances(x), axis=-1)
        return -self.A[j] / self._face_norm[j][..., None]

    def ridge_margin(self, x):
        """Gap between the nearest and the second nearest boundary piece.

        For polyhedral kinds this is the difference of the two smallest face
        distances; for Wulff balls it is H0(x), as the centre is the only
        ridge point.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "wulff-ball":
            return self.h0.value(x)
        if self.A.shape[0] == 1:
            return np.full(x.shape[:-1], np.inf)
        d = np.sort(self._face_distances(x), axis=-1)
        return d[..., 1] - d[..., 0]

    def as_field(self):
        """The distance function as a `ScalarField` (defined on the domain)."""
        return ScalarField(self._distance, self.distance_grad, Support("wulff", 0.0, np.inf),
                           None, f"d_H[{self.kind}]", self.dim)

    # -- constants ------------------------------------------------------------

    def inradius(self):
        """Anisotropic inradius ``sup_x d_H(x)``."""
        if self._tau is None:
            self._tau = self._compute_inradius()
        return self._tau

    tau = property(inradius)

    def _compute_inradius(self):
        if self.kind == "wulff-ball":
            return self.R
        if self.kind == "half-space":
            raise UnboundedDomain("the half-space has infinite inradius")
        if self.kind == "cube":
            return (self.side / 2) / float(np.max(self.gauge.value(np.eye(self.dim))))
        # maximize t subject to A x + t H(a_j) <= b
        n = self.dim
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A_ub = np.concatenate([self.A, self._face_norm[:, None]], axis=1)
        res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=[(None, None)] * n + [(0, None)])
        if res.status == 3:
            raise UnboundedDomain("polytope is unbounded")
        if res.status != 0:
            raise InvalidParameters(f"inradius linear program failed: {res.message}")
        return float(res.x[-1])

    def halfspace_constant(self, method="newton"):
        """``min_{w'} H0((w', 1))``; equals ``1 / H(e_N)``."""
        if method == "closed":
            e = np.zeros(self.dim)
            e[-1] = 1.0
            return 1.0 / float(self.gauge.value(e))
        if method != "newton":
            raise InvalidParameters(f"unknown method {method!r}")
        return halfspace_constant_newton(self.h0)

    def numeric_distance(self, x, n_samples=10_000, seed=0):
        """Distance by minimizing H0(x - y) over sampled boundary points, then refining."""
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        out = np.array([self._numeric_distance_one(p, n_samples, seed) for p in pts])
        return out.reshape(x.shape[:-1])

    def _numeric_distance_one(self, x, n_samples, seed):
        rng = np.random.default_rng(seed)
        if self.kind == "wulff-ball":
            th = rng.standard_normal((n_samples, self.dim))
            th /= np.linalg.norm(th, axis=1, keepdims=True)

            def boundary(v):
                v = np.atleast_2d(v)
                t = v / np.linalg.norm(v, axis=-1, keepdims=True)
                return self.R * t / self.h0.value(t)[..., None]

            vals = self.h0.value(x - boundary(th))
            v0 = th[np.argmin(vals)]
            res = minimize(lambda v: float(self.h0.value(x - boundary(v))[0]), v0,
                           method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15,
                                                          "maxiter": 20_000})
            return min(float(res.fun), float(vals.min()))
        best = np.inf
        for a, b in zip(self.A, self.b):
            # points of the plane a . y = b: y = y0 + B w
            y0 = a * b / np.dot(a, a)
            B = np.linalg.svd(a[None, :])[2][1:].T
            w = rng.standard_normal((n_samples, self.dim - 1)) * 4.0
            ys = y0 + w @ B.T
            vals = self.h0.value(x - ys)
            w0 = w[np.argmin(vals)]
            res = minimize(lambda ww: float(self.h0.value(x - (y0 + B @ ww))), w0,
                           method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15,
                                                          "maxiter": 20_000})
            best = min(best, float(res.fun), float(vals.min()))
        return best

    def characteristic_length(self):
        try:
            return self.inradius()
        except UnboundedDomain:
            return 1.0


def halfspace_constant_newton(h0, max_iter=50, tol=1e-14):
    """Minimize ``H0((w', 1))`` over w' by damped Newton from w' = 0."""
    n = h0.dim
    w = np.zeros(n - 1)

    def pt(w):
        return np.concatenate([w, [1.0]])

    f = float(h0.value(pt(w)))
    for _ in range(max_iter):
        z = pt(w)
        g = h0.grad(z)[:-1]
        if np.max(np.abs(g)) < tol:
            break
        Hm = h0.hess(z)[:-1, :-1]
        try:
            step = np.linalg.solve(Hm, g)
        except np.linalg.LinAlgError:
            step = g
        t = 1.0
        while t > 1e-12:
            w_new = w - t * step
            f_new = float(h0.value(pt(w_new)))
            if f_new <= f:
                break
            t *= 0.5
        if f - f_new < tol * max(1.0, abs(f)) and np.max(np.abs(t * step)) < 1e-12:
            w, f = w_new, f_new
            break
        w, f = w_new, f_new
    return f


def anisotropic_distance(domain, x):
    return domain.distance(x)


def domain_from_record(record, gauge, h0=None):
    """Build a domain from ``{kind, R?, side?, halfspaces?}``.

    ``halfspaces`` is a list of ``[a_1, ..., a_N, b]`` rows meaning
    ``a . x < b``.
    """
    rec = dict(record)
    kind = rec.pop("kind", "wulff-ball")
    if kind == "polytope":
        hs = np.asarray(rec.pop("halfspaces"), dtype=float)
        return DomainShape(kind, gauge, h0, A=hs[:, :-1], b=hs[:, -1])
    return DomainShape(kind, gauge, h0, R=rec.pop("R", 1.0), side=rec.pop("side", 2.0))


# -- derivative checks ---------------------------------------------------------------

def eikonal_check(domain, samples, step=None, asym_tol=0.1, tol=1e-6):
    """Finite-difference eikonal residual ``|H(grad d_H) - 1|`` at samples.

    Samples whose one-sided difference quotients disagree by more than
    `asym_tol` (relative) straddle a ridge; they are flagged with a
    `RidgeProximityWarning` and left out of the residual.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    h = step if step is not None else 1e-5 * domain.characteristic_length()
    g = domain.gauge
    n = domain.dim
    d0 = domain.distance(x)
    fwd = np.empty(x.shape)
    bwd = np.empty(x.shape)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fwd[:, i] = (domain._distance(x + e) - d0) / h
        bwd[:, i] = (d0 - domain._distance(x - e)) / h
    central = 0.5 * (fwd + bwd)
    scale = np.maximum(np.linalg.norm(central, axis=1), 1e-12)
    asym = np.linalg.norm(fwd - bwd, axis=1) / scale
    ridge = asym > asym_tol
    resid = np.abs(g.value(central) - 1.0)
    report = ExperimentReport("eikonal")
    off = resid[~ridge]
    worst = float(off.max()) if off.size else 0.0
    report.add(CheckRow.at_most(f"{domain.kind}:eikonal_residual", worst, 0.0, tol))
    report.notes["ridge_flagged"] = int(ridge.sum())
    report.notes["ridge_mask"] = ridge
    if ridge.any():
        warnings.warn(f"{int(ridge.sum())} eikonal sample(s) straddle a ridge and were excluded",
                      RidgeProximityWarning, stacklevel=2)
    return report


def finsler_flux(g, grad, p):
    """``H(grad)^(p-1) (grad_xi H)(grad)``."""
    return (g.value(grad) ** (p - 1))[..., None] * g.grad(grad)


def finsler_p_laplacian(g, field, p, x, h=None, richardson=True):
    """``div(H^(p-1)(grad u) (grad_xi H)(grad u))`` by central differences of the flux.

    With `richardson`, steps h and h/2 are combined to cancel the leading
    O(h^2) error.  `h` defaults to 1e-4 times max(|x|, 1).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xs = np.atleast_2d(x)
    gx = field.grad(xs)
    if np.any(np.linalg.norm(gx, axis=-1) < 1e-10):
        raise DegenerateGradient("Finsler p-Laplacian needs a nonvanishing gradient")
    if h is None:
        h = 1e-4 * np.maximum(np.linalg.norm(xs, axis=-1), 1.0)
    h = np.broadcast_to(np.asarray(h, dtype=float), xs.shape[:-1])

    def div(step):
        total = np.zeros(xs.shape[:-1])
        for i in range(xs.shape[-1]):
            e = np.zeros(xs.shape[-1])
            e[i] = 1.0
            dx = step[:, None] * e
            fp = finsler_flux(g, field.grad(xs + dx), p)[..., i]
            fm = finsler_flux(g, field.grad(xs - dx), p)[..., i]
            total += (fp - fm) / (2 * step)
        return total

    val = div(h)
    if richardson:
        val = (4 * div(h / 2) - val) / 3
    return float(val[0]) if single else val


def _interior_grid(domain, n):
    d = domain.dim
    if domain.kind == "wulff-ball":
        ext = domain.R * domain.gauge.value(np.eye(d))
        lo, hi = -ext, ext
    elif domain.kind == "half-space":
        lo, hi = np.r_[-np.ones(d - 1), 0.0], np.r_[np.ones(d - 1), 2.0]
    else:
        # bounding box of the polytope by linear programming
        lo, hi = np.empty(d), np.empty(d)
        for i in range(d):
            c = np.zeros(d)
            c[i] = 1.0
            lo[i] = linprog(c, A_ub=domain.A, b_ub=domain.b, bounds=[(None, None)] * d).fun
            hi[i] = -linprog(-c, A_ub=domain.A, b_ub=domain.b, bounds=[(None, None)] * d).fun
    axes = [lo[i] + (hi[i] - lo[i]) * (np.arange(n) + 0.5) / n for i in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return grid


def superharmonicity_check(domain, p=2.0, grid_resolution=24, margin=1e-3, tol=1e-4):
    """Sign check of ``-Delta_{H,p} d_H`` on an interior grid.

    Grid points within ``margin * tau`` of a ridge, or closer than a few
    stencil widths to the boundary, are excluded and counted.  The check
    is a pointwise necessary condition for the distributional statement.
    """
    tau = domain.characteristic_length()
    pts = _interior_grid(domain, grid_resolution)
    pts = pts[domain.contains(pts, closed=False)]
    h = 1e-4 * tau
    d = domain._distance(pts)
    near_ridge = domain.ridge_margin(pts) <= max(margin * tau, 8 * h)
    near_bdry = d <= 8 * h
    keep = ~(near_ridge | near_bdry)
    field = domain.as_field()
    vals = -finsler_p_laplacian(domain.gauge, field, p, pts[keep], h=h)
    report = ExperimentReport("superharmonicity")
    vmin = float(vals.min()) if vals.size else 0.0
    report.add(CheckRow.at_least(f"{domain.kind}:min(-Delta_H,p d)", vmin, 0.0, tol))
    report.notes.update(evaluated=int(keep.sum()), ridge_excluded=int(near_ridge.sum()),
                        boundary_excluded=int((near_bdry & ~near_ridge).sum()),
                        negative=int((vals < 0).sum()), nonnegative=int((vals >= 0).sum()),
                        values=vals, points=pts[keep])
    if domain.kind == "wulff-ball":
        oracle = (domain.dim - 1) / domain.h0.value(pts[keep])
        err = float(np.max(np.abs(vals - oracle) / oracle)) if vals.size else 0.0
        report.notes["max_rel_dev_from_(N-1)/H0"] = err
    return report
