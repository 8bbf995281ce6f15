"""Finsler gauges, their polar functions and the basic gauge identities.

All evaluations are vectorized over leading axes: a point array of shape
``(..., N)`` gives values of shape ``(...)`` and gradients of shape
``(..., N)``.  Inputs are rescaled by their largest component before
evaluation, which is exact by homogeneity and keeps tiny or huge arguments
away from underflow and overflow.
"""

import warnings

import numpy as np

from .errors import (FinslerWarning, InvalidParameters, NoAnalyticDual,
                     SingularPoint)
from .report import CheckRow, ExperimentReport

FAMILIES = ("euclidean", "weighted-lq", "ellipsoidal", "custom")

FD_REL_STEP = 1e-6
HESS_FD_STEP = 1e-4
POLAR_MAX_ITER = 200
POLAR_TOL = 1e-12


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Gauge:
    """A Finsler norm H on R^N.

    Parameters
    ----------
    family : {"euclidean", "weighted-lq", "ellipsoidal", "custom"}
        ``weighted-lq`` is ``H(xi) = (sum_i a_i |xi_i|^q)^(1/q)``;
        ``ellipsoidal`` is ``H(xi) = sqrt(xi . A xi)``.
    dim : int
        Dimension N >= 2.
    q, weights : float, array_like
        Exponent q > 1 and positive weights (weighted-lq only).
    matrix : array_like
        Symmetric positive definite matrix A (ellipsoidal only).
    func, grad, hess : callable
        Vectorized H, gradient and Hessian for ``custom`` gauges.  Missing
        derivatives fall back to central differences.
    """

    def __init__(self, family, dim, *, q=None, weights=None, matrix=None,
                 func=None, grad=None, hess=None, name=None):
        if family not in FAMILIES:
            raise InvalidParameters(f"unknown gauge family {family!r}")
        dim = int(dim)
        if dim < 2:
            raise InvalidParameters("dimension must be >= 2")
        self.family = family
        self.dim = dim
        self.q = None
        self.weights = None
        self.matrix = None
        self._func = self._grad = self._hess = None
        if family == "weighted-lq":
            q = 2.0 if q is None else float(q)
            if not q > 1:
                raise InvalidParameters(f"weighted-lq needs q > 1, got {q}")
            w = np.ones(dim) if weights is None else np.broadcast_to(
                np.asarray(weights, dtype=float), (dim,))
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise InvalidParameters("weighted-lq weights must be positive")
            self.q = q
            self.weights = _readonly(w)
        elif family == "ellipsoidal":
            if matrix is None:
                raise InvalidParameters("ellipsoidal gauge needs a matrix")
            A = np.asarray(matrix, dtype=float)
            if A.shape != (dim, dim):
                raise InvalidParameters(f"matrix must be {dim}x{dim}")
            if not np.allclose(A, A.T, rtol=0, atol=1e-12 * np.abs(A).max()):
                raise InvalidParameters("matrix must be symmetric")
            if np.linalg.eigvalsh(A).min() <= 0:
                raise InvalidParameters("matrix must be positive definite")
            self.matrix = _readonly(A)
            self._inv = _readonly(np.linalg.inv(A))
        elif family == "custom":
            if func is None:
                raise InvalidParameters("custom gauge needs func")
            self._func, self._grad, self._hess = func, grad, hess
        self.name = name or family
        self._bounds = None
        if family == "custom" and not isinstance(self, PolarGauge):
            self._spot_check_convexity()

    def __repr__(self):
        extra = ""
        if self.family == "weighted-lq":
            extra = f", q={self.q:g}, weights={list(self.weights)}"
        elif self.family == "ellipsoidal":
            extra = f", matrix={self.matrix.tolist()}"
        return f"{type(self).__name__}({self.family!r}, dim={self.dim}{extra})"

    def record(self):
        """Configuration record that rebuilds this gauge (analytic families)."""
        rec = {"family": self.family, "dimension": self.dim}
        if self.family == "weighted-lq":
            rec.update(q=self.q, weights=self.weights.tolist())
        elif self.family == "ellipsoidal":
            rec["matrix"] = self.matrix.tolist()
        return rec

    # -- evaluation ---------------------------------------------------------

    def _points(self, xi):
        a = np.asarray(xi, dtype=float)
        if a.shape[-1] != self.dim:
            raise InvalidParameters(f"expected points of dimension {self.dim}, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidParameters("points must be finite")
        return a

    def __call__(self, xi):
        return self.value(xi)

    def value(self, xi):
        a = self._points(xi)
        s = np.max(np.abs(a), axis=-1)
        zero = s == 0
        if np.any(zero):
            a = np.where(zero[..., None], 1.0, a)
            s1 = np.where(zero, 1.0, s)
            return np.where(zero, 0.0, self._value_unit(a / s1[..., None]) * s1)
        return self._value_unit(a / s[..., None]) * s

    def grad(self, xi):
        a = self._points(xi)
        s = np.max(np.abs(a), axis=-1)
        if np.any(s == 0):
            raise SingularPoint("gradient of a gauge is undefined at the origin")
        return self._grad_unit(a / s[..., None])

    def hess(self, xi):
        a = self._points(xi)
        s = np.max(np.abs(a), axis=-1)
        if np.any(s == 0):
            raise SingularPoint("Hessian of a gauge is undefined at the origin")
        return self._hess_unit(a / s[..., None]) / s[..., None, None]

    def _value_unit(self, a):
        if self.family == "euclidean":
            return np.sqrt(np.sum(a * a, axis=-1))
        if self.family == "weighted-lq":
            return np.sum(self.weights * np.abs(a) ** self.q, axis=-1) ** (1.0 / self.q)
        if self.family == "ellipsoidal":
            return np.sqrt(np.einsum("...i,ij,...j->...", a, self.matrix, a))
        return np.asarray(self._func(a), dtype=float)

    def _grad_unit(self, a):
        if self.family == "euclidean":
            return a / self._value_unit(a)[..., None]
        if self.family == "weighted-lq":
            v = self._value_unit(a)
            q = self.q
            return (self.weights * np.abs(a) ** (q - 1) * np.sign(a)) / v[..., None] ** (q - 1)
        if self.family == "ellipsoidal":
            return (a @ self.matrix) / self._value_unit(a)[..., None]
        if self._grad is not None:
            return np.asarray(self._grad(a), dtype=float)
        return _fd_grad(self._value_unit, a)

    def _hess_unit(self, a):
        eye = np.eye(self.dim)
        if self.family in ("euclidean", "ellipsoidal"):
            v = self._value_unit(a)[..., None, None]
            g = self._grad_unit(a)
            base = eye if self.family == "euclidean" else self.matrix
            return (base - g[..., :, None] * g[..., None, :]) / v
        if self.family == "weighted-lq":
            q = self.q
            v = self._value_unit(a)
            g = self._grad_unit(a)
            with np.errstate(divide="ignore"):
                diag = self.weights * np.abs(a) ** (q - 2) / v[..., None] ** (q - 2)
            h = diag[..., :, None] * eye - g[..., :, None] * g[..., None, :]
            return (q - 1) * h / v[..., None, None]
        if self._hess is not None:
            return np.asarray(self._hess(a), dtype=float)
        return _fd_jacobian(self._grad_unit, a, HESS_FD_STEP)

    # -- norm equivalence constants -----------------------------------------

    @property
    def alpha(self):
        """Largest alpha with alpha |xi| <= H(xi)."""
        return self._norm_bounds()[0]

    @property
    def beta(self):
        """Smallest beta with H(xi) <= beta |xi|."""
        return self._norm_bounds()[1]

    def _norm_bounds(self):
        if self._bounds is None:
            self._bounds = self._compute_bounds()
        return self._bounds

    def _compute_bounds(self):
        if self.family == "euclidean":
            return 1.0, 1.0
        if self.family == "ellipsoidal":
            ev = np.linalg.eigvalsh(self.matrix)
            return float(np.sqrt(ev[0])), float(np.sqrt(ev[-1]))
        if self.family == "weighted-lq":
            return _weighted_lq_bounds(self.q, self.weights)
        # sampled: directions on the unit sphere
        rng = np.random.default_rng(12345)
        d = rng.standard_normal((8192, self.dim))
        d /= np.linalg.norm(d, axis=-1, keepdims=True)
        v = self.value(d)
        return float(v.min()), float(v.max())

    def _spot_check_convexity(self, n=100):
        rng = np.random.default_rng(2024)
        xi = rng.standard_normal((n, self.dim))
        g = self.grad(xi)
        h = self.hess(xi)
        v = self.value(xi)
        hess_sq = 2 * (g[:, :, None] * g[:, None, :] + v[:, None, None] * h)
        hess_sq = 0.5 * (hess_sq + np.swapaxes(hess_sq, 1, 2))
        lam = np.linalg.eigvalsh(hess_sq)[:, 0]
        bad = int(np.sum(lam <= 0))
        if bad:
            warnings.warn(f"custom gauge {self.name!r}: Hess(H^2) not positive definite "
                          f"at {bad}/{n} spot-check points", FinslerWarning, stacklevel=3)
        return bad


class PolarGauge(Gauge):
    """The polar function H0 of a gauge, itself usable as a gauge.

    `provenance` is ``"analytic-dual"`` or ``"numeric-dual"`` and `primal`
    refers back to the gauge it was computed from.
    """

    def __init__(self, family, dim, *, primal, provenance, **kwargs):
        super().__init__(family, dim, **kwargs)
        self.primal = primal
        self.provenance = provenance

    def _compute_bounds(self):
        if self.provenance == "numeric-dual":
            return 1.0 / self.primal.beta, 1.0 / self.primal.alpha
        return super()._compute_bounds()


def _weighted_lq_bounds(q, w):
    # extremes of sum w_i t_i^(q/2) over the simplex sum t_i = 1
    if q == 2:
        return float(np.sqrt(w.min())), float(np.sqrt(w.max()))
    s = q / 2.0
    stationary = np.sum(w ** (-1.0 / (s - 1))) ** (-(s - 1))
    if q > 2:
        lo, hi = stationary, w.max()
    else:
        lo, hi = w.min(), stationary
    return float(lo ** (1 / q)), float(hi ** (1 / q))


def _fd_grad(f, a):
    h = FD_REL_STEP * np.maximum(np.linalg.norm(a, axis=-1), 1.0)
    out = np.empty(a.shape)
    for i in range(a.shape[-1]):
        e = np.zeros(a.shape[-1])
        e[i] = 1.0
        step = h[..., None] * e
        out[..., i] = (f(a + step) - f(a - step)) / (2 * h)
    return out


def _fd_jacobian(g, a, rel):
    h = rel * np.maximum(np.linalg.norm(a, axis=-1), 1.0)
    n = a.shape[-1]
    out = np.empty(a.shape + (n,))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        step = h[..., None] * e
        out[..., :, j] = (g(a + step) - g(a - step)) / (2 * h[..., None])
    return 0.5 * (out + np.swapaxes(out, -1, -2))


# -- public operations --------------------------------------------------------

def make_gauge(family, dim, **params):
    return Gauge(family, dim, **params)


def gauge_from_record(record, dim=None):
    """Build a gauge from ``{family, dimension, q?, weights?, matrix?}``.

    `dim` overrides a missing dimension; a conflicting explicit dimension is
    an error.
    """
    rec = dict(record)
    family = rec.pop("family", "euclidean")
    d = rec.pop("dimension", None)
    if d is None:
        d = dim
    elif dim is not None and int(d) != int(dim):
        raise InvalidParameters(f"gauge dimension {d} does not match requested dimension {dim}")
    if d is None:
        raise InvalidParameters("gauge record needs a dimension")
    if family == "ellipsoidal" and "matrix" not in rec and "diag" in rec:
        rec["matrix"] = np.diag(rec.pop("diag"))
    allowed = {"q", "weights", "matrix"}
    unknown = set(rec) - allowed
    if unknown:
        raise InvalidParameters(f"unknown gauge fields: {sorted(unknown)}")
    return Gauge(family, int(d), **rec)


def eval_gauge(g, xi):
    return g.value(xi)


def grad_gauge(g, xi):
    return g.grad(xi)


def polar(g, method="analytic"):
    """Polar function ``H0(x) = sup_xi (xi . x) / H(xi)`` of a gauge."""
    if method == "analytic":
        if g.family == "euclidean":
            return PolarGauge("euclidean", g.dim, primal=g, provenance="analytic-dual")
        if g.family == "ellipsoidal":
            return PolarGauge("ellipsoidal", g.dim, matrix=np.linalg.inv(g.matrix),
                              primal=g, provenance="analytic-dual")
        if g.family == "weighted-lq":
            qd = g.q / (g.q - 1)
            return PolarGauge("weighted-lq", g.dim, q=qd, weights=g.weights ** (-qd / g.q),
                              primal=g, provenance="analytic-dual")
        raise NoAnalyticDual(f"no closed-form polar for {g.family!r} gauges")
    if method != "numeric":
        raise InvalidParameters(f"unknown polar method {method!r}")

    def h0(x):
        return _numeric_polar(g, x)[0]

    def h0_grad(x):
        return _numeric_polar(g, x)[1]

    return PolarGauge("custom", g.dim, func=h0, grad=h0_grad, primal=g,
                      provenance="numeric-dual", name=f"polar({g.name})")


def _ascent_starts(n):
    eye = np.eye(n)
    starts = [eye, -eye, np.ones((1, n)) / np.sqrt(n), -np.ones((1, n)) / np.sqrt(n)]
    alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0) / np.sqrt(n)
    starts += [alt[None], -alt[None]]
    s = np.concatenate(starts)
    return s[: max(8, 2 * n + 2)]


def _numeric_polar(g, x, max_iter=POLAR_MAX_ITER, tol=POLAR_TOL):
    """Return H0(x) and its gradient by projected ascent on the unit sphere.

    The gradient is the normalized maximizer ``theta*/H(theta*)`` (the sup
    is attained there, so this is the envelope-theorem derivative).
    """
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    n = x.shape[-1]
    X = x.reshape(-1, n)
    s = np.max(np.abs(X), axis=-1)
    zero = s == 0
    s1 = np.where(zero, 1.0, s)
    Xu = np.where(zero[:, None], 1.0, X / s1[:, None])
    starts = _ascent_starts(n)
    th = np.broadcast_to(starts, (Xu.shape[0],) + starts.shape).copy()
    P = Xu[:, None, :]

    def objective(t):
        return np.sum(t * P, axis=-1) / g.value(t)

    f = objective(th)
    step = np.full(f.shape, 0.5)
    for _ in range(max_iter):
        hv = g.value(th)
        gr = P / hv[..., None] - (np.sum(th * P, -1) / hv ** 2)[..., None] * g.grad(th)
        gr -= np.sum(gr * th, -1)[..., None] * th
        cand = th + step[..., None] * gr
        cand /= np.linalg.norm(cand, axis=-1, keepdims=True)
        fc = objective(cand)
        ok = fc >= f
        gain = np.where(ok, fc - f, 0.0)
        th = np.where(ok[..., None], cand, th)
        f = np.where(ok, fc, f)
        step = np.where(ok, step * 1.5, step * 0.5)
        done = (ok & (gain <= tol * np.maximum(1.0, np.abs(f)))) | (step < 1e-14)
        if np.all(done):
            break
    best = np.argmax(f, axis=1)
    idx = np.arange(f.shape[0])
    fbest = f[idx, best]
    tstar = th[idx, best]
    tstar, fbest = _newton_polish(g, Xu, tstar, fbest)
    val = fbest * s1
    grad = tstar / g.value(tstar)[:, None]
    val = np.where(zero, 0.0, val)
    return val.reshape(shape), grad.reshape(shape + (n,))


def _newton_polish(g, x, theta, f, steps=40):
    # The maximizer xi solves H(xi) grad H(xi) = x, whose Jacobian is the
    # Hessian of H^2/2 (positive definite), so Newton converges fast from the
    # ascent estimate.  A candidate is kept only where it raises the objective.
    xi = theta * (np.maximum(f, 1e-300) / g.value(theta))[:, None]
    for _ in range(steps):
        hv = g.value(xi)
        gr = g.grad(xi)
        res = hv[:, None] * gr - x
        jac = gr[:, :, None] * gr[:, None, :] + hv[:, None, None] * g.hess(xi)
        good = np.all(np.isfinite(jac), axis=(1, 2))
        jac = np.where(good[:, None, None], jac, np.eye(x.shape[1]))
        try:
            delta = np.linalg.solve(jac, res[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        delta = np.where(good[:, None], delta, 0.0)
        new = xi - delta
        ok = np.all(np.isfinite(new), axis=1) & (np.max(np.abs(new), axis=1) > 0)
        xi = np.where(ok[:, None], new, xi)
        if np.max(np.abs(res)) < 1e-14:
            break
    cand = xi / np.linalg.norm(xi, axis=1, keepdims=True)
    fc = np.sum(cand * x, axis=1) / g.value(cand)
    resid = np.max(np.abs(g.value(xi)[:, None] * g.grad(xi) - x), axis=1)
    slack = 8 * np.finfo(float).eps * np.abs(f)
    better = (fc >= f - slack) & (resid < 1e-10)
    return np.where(better[:, None], cand, theta), np.where(better, fc, f)


IDENTITY_IDS = (
    "euler", "grad_parity", "hess_scaling", "unit_H_at_grad_H0", "inverse_map",
    "euler_dual", "grad_parity_dual", "hess_scaling_dual", "unit_H0_at_grad_H", "inverse_map_dual",
)


def identity_residuals(g, h0, samples, ts=None, seed=0):
    """Max absolute residual of each of the ten gauge/polar identities.

    Returns a dict keyed by `IDENTITY_IDS`.  The Hessian identities are
    checked as ``hess(t xi) = hess(xi) / |t|``.
    """
    x = np.asarray(samples, dtype=float)
    if np.any(np.max(np.abs(x), axis=-1) == 0):
        raise SingularPoint("identity samples must be nonzero")
    if ts is None:
        rng = np.random.default_rng(seed)
        ts = rng.uniform(0.1, 10.0, x.shape[0]) * rng.choice([-1.0, 1.0], x.shape[0])
    t = np.asarray(ts, dtype=float)
    out = {}
    for tag, P, Q in (("", g, h0), ("_dual", h0, g)):
        v = P.value(x)
        gr = P.grad(x)
        out["euler" + tag] = np.max(np.abs(np.sum(gr * x, -1) - v))
        out["grad_parity" + tag] = np.max(np.abs(P.grad(t[:, None] * x) - np.sign(t)[:, None] * gr))
        hs = P.hess(x)
        out["hess_scaling" + tag] = np.max(np.abs(P.hess(t[:, None] * x) - hs / np.abs(t)[:, None, None]))
        qg = Q.grad(x)
        key = "unit_H_at_grad_H0" if tag == "" else "unit_H0_at_grad_H"
        out[key] = np.max(np.abs(P.value(qg) - 1.0))
        out["inverse_map" + tag] = np.max(np.abs(Q.value(x)[:, None] * P.grad(qg) - x))
    return {k: float(out[k]) for k in IDENTITY_IDS}


def check_identities(g, h0, samples, tol=1e-8, ts=None, seed=0):
    """Evaluate the ten gauge identities and report max residuals."""
    res = identity_residuals(g, h0, samples, ts=ts, seed=seed)
    report = ExperimentReport("identities")
    for key in IDENTITY_IDS:
        report.add(CheckRow.close(f"{g.name}:{key}", res[key], 0.0, tol, provenance="STATED"))
    return report


def schwarz_gap(g, h0, xi, x):
    """``H(xi) H0(x) - |xi . x|``; nonnegative for every pair."""
    return g.value(xi) * h0.value(x) - np.abs(np.sum(np.asarray(xi) * np.asarray(x), -1))
