"""One-dimensional radial rules, sphere rules and their products.

Every rule carries a coarser companion (half the nodes per panel) so an
integral can report ``|Q_fine - Q_coarse|`` as its error estimate.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import gamma, pi

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import (InvalidGrading, InvalidInterval, InvalidParameters,
                     UnsupportedDimension)

SINGULAR_CLASSES = ("none", "integrable-power", "integrable-log-power")
MAX_PRODUCT_DIM = 6


@lru_cache(maxsize=None)
def _gl(n):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _gj(n, alpha, beta):
    x, w = roots_jacobi(n, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def sphere_area(dim):
    """Euclidean surface area of the unit sphere in R^dim."""
    return 2 * pi ** (dim / 2) / gamma(dim / 2)


@dataclass(frozen=True, eq=False)
class AngularRule:
    """Nodes on the unit sphere S^{N-1} with positive weights."""

    nodes: np.ndarray
    weights: np.ndarray
    dim: int
    method: str = "product"
    coarse: "AngularRule | None" = None

    @property
    def size(self):
        return len(self.weights)

    def integrate(self, f):
        return float(np.dot(f(self.nodes), self.weights))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Radial nodes and weights on (a, b), optionally with a sphere rule.

    `left` and `right` name the endpoint singularity class the rule
    integrates accurately.  `coarse` is the same construction with half the
    nodes per panel, used for error estimates.
    """

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float
    left: str = "none"
    right: str = "none"
    level: int = 0
    angular: AngularRule | None = None
    coarse: "QuadratureRule | None" = None
    breakpoints: tuple = field(default=())
    log_nodes: np.ndarray | None = None
    dist_weights: np.ndarray | None = None

    @property
    def size(self):
        return len(self.weights)

    def integrate(self, f):
        return float(np.dot(f(self.nodes), self.weights))

    def integrate_with_error(self, f):
        q = self.integrate(f)
        if self.coarse is None:
            return q, 0.0
        return q, abs(q - self.coarse.integrate(f))

    def integrate_log(self, g):
        """Integrate in log-distance form for log-power singular ends.

        `g` receives ``L = log(length / dist)``, where `dist` is the
        distance to the singular end, and must return ``dist * f``.  Nodes
        whose distance underflows double precision still contribute.
        """
        if self.log_nodes is None:
            raise InvalidParameters("rule has no log-distance nodes")
        return float(np.dot(g(self.log_nodes), self.dist_weights))

    def with_angular(self, angular):
        coarse = self.coarse
        if coarse is not None and angular is not None:
            coarse = coarse.with_angular(angular.coarse or angular)
        return replace(self, angular=angular, coarse=coarse)


def _check_interval(a, b):
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise InvalidInterval(f"need finite a < b, got ({a}, {b})")


def _gl_panels(edges, n):
    x, w = _gl(n)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _jacobi_panel(lo, hi, n, beta):
    # Exact for (t - lo)^beta times a polynomial of degree < 2n.
    x, w = _gj(n, 0.0, beta)
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1)
    weights = half * w * (1 + x) ** (-beta)
    return nodes, weights


def _log_panel(lo, hi, n, n_sub=12):
    # t - lo = width * exp(1 - 1/v), v in (0, 1): integrands with
    # log-power decay at t = lo become smooth or power-like in v.  Returns
    # nodes, weights, log(width / dist) and weight / dist for every node;
    # nodes whose distance underflows get t = lo and zero weight.
    width = hi - lo
    edges = 0.5 ** np.arange(n_sub, -1, -1.0)
    edges[0] = 0.0
    v, wv = _gl_panels(edges, n)
    d = width * np.exp(1 - 1 / v)
    return lo + d, wv * d / v ** 2, 1 / v - 1, wv / v ** 2


def radial_rule(n, a, b, coarse=True):
    """Gauss-Legendre rule with `n` nodes on (a, b).

    Exact for polynomials of degree <= 2n - 1.
    """
    if int(n) < 1:
        raise InvalidParameters("need at least one node")
    _check_interval(a, b)
    nodes, weights = _gl_panels([a, b], int(n))
    c = radial_rule(max(n // 2, 1), a, b, coarse=False) if coarse and n >= 2 else None
    return QuadratureRule(nodes, weights, float(a), float(b), coarse=c)


def _singular_panel(lo, hi, n, cls, exponent):
    if cls == "none":
        return _gl_panels([lo, hi], n)
    if cls == "integrable-power":
        if exponent is None or exponent <= -1:
            raise InvalidParameters("integrable-power panels need exponent > -1")
        return _jacobi_panel(lo, hi, n, float(exponent))
    raise InvalidParameters(f"unknown singularity class {cls!r}")


def graded_radial_rule(n_panels, n_per_panel, a, b, grading=0.6, singular_end="left",
                       singular_class="none", exponent=None, coarse=True):
    """Geometrically graded composite Gauss-Legendre rule.

    Panel edges accumulate toward `singular_end` with ratio `grading`; the
    innermost panel uses a rule matched to `singular_class`
    (``"integrable-power"`` expects the integrand to behave like
    ``dist^exponent``).
    """
    rho = float(grading)
    if not 0 < rho < 1:
        raise InvalidGrading(f"grading ratio must lie in (0, 1), got {grading}")
    if int(n_panels) < 2:
        raise InvalidParameters("need at least two panels")
    if singular_end not in ("left", "right"):
        raise InvalidParameters("singular_end must be 'left' or 'right'")
    _check_interval(a, b)
    n_panels, n = int(n_panels), int(n_per_panel)
    length = b - a
    frac = rho ** np.arange(n_panels, -1, -1.0)
    outer_nodes, outer_weights = _gl_panels(frac * length, n)
    logn = distw = None
    if singular_class == "integrable-log-power":
        inner_nodes, inner_weights, inner_log, inner_dw = _log_panel(0.0, frac[0] * length, n)
        logn = np.concatenate([inner_log + n_panels * np.log(1 / rho),
                               np.log(length / outer_nodes)])
        distw = np.concatenate([inner_dw, outer_weights / outer_nodes])
    else:
        inner_nodes, inner_weights = _singular_panel(0.0, frac[0] * length, n,
                                                     singular_class, exponent)
    t = np.concatenate([inner_nodes, outer_nodes])
    w = np.concatenate([inner_weights, outer_weights])
    if singular_end == "left":
        nodes = a + t
    else:
        nodes, w = (b - t)[::-1], w[::-1]
        if logn is not None:
            logn, distw = logn[::-1], distw[::-1]
    keep = w > 0
    c = None
    if coarse:
        c = graded_radial_rule(n_panels, max(n // 2, 1), a, b, rho, singular_end,
                               singular_class, exponent, coarse=False)
    left = singular_class if singular_end == "left" else "none"
    right = singular_class if singular_end == "right" else "none"
    return QuadratureRule(nodes[keep], w[keep], float(a), float(b), left, right, coarse=c,
                          log_nodes=logn, dist_weights=distw)


@dataclass(frozen=True)
class Resolution:
    """Discretization knobs shared by the integral evaluators.

    ``angular=None`` selects the per-dimension default (256 nodes in 2-D,
    64 x 128 in 3-D).
    """

    n_per_panel: int = 12
    grading: float = 0.6
    n_panels: int = 40
    inner_cut: float = 1e-10
    segment_panels: int = 6
    angular: int | None = None
    angular_method: str = "product"
    angular_factor: float = 1.0

    def angular_nodes(self, dim):
        base = self.angular if self.angular is not None else {2: 256, 3: 128, 4: 48}.get(dim, 16)
        return max(int(round(base * self.angular_factor)), 4)

    def coarse(self):
        return replace(self, n_per_panel=max(self.n_per_panel // 2, 2),
                       angular_factor=self.angular_factor / 2)


def composite_radial_rule(a, b, breakpoints=(), res=Resolution(), graded_left=True,
                          right_class="none", right_exponent=None, coarse=True):
    """Radial rule on (a, b) that respects interior breakpoints.

    When `graded_left` is set and `a` is small compared with the first
    breakpoint, the first segment gets geometric panels (ratio
    ``res.grading``) accumulating at 0 and stopping at `a`; ``a = 0`` is
    replaced by ``res.inner_cut * b``.  Other segments use
    ``res.segment_panels`` equal panels.  The last segment can be graded
    toward `b` for endpoint singularities of class `right_class`.
    """
    if a == 0:
        a = res.inner_cut * b
    _check_interval(a, b)
    bps = sorted(float(x) for x in breakpoints if a < x < b)
    edges = [float(a)] + bps + [float(b)]
    n = res.n_per_panel
    rho = res.grading
    parts_x, parts_w = [], []
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        last = k == len(edges) - 2
        if k == 0 and graded_left and lo < hi * rho ** 2:
            # geometric panels below hi * rho, equal panels above it
            top = hi * rho
            n_pan = int(np.ceil(np.log(lo / top) / np.log(rho)))
            e = top * rho ** np.arange(n_pan, -1, -1.0)
            e[0] = lo
            if e[1] <= lo * (1 + 1e-9):
                e = np.delete(e, 1)
            e = np.concatenate([e, np.linspace(top, hi, res.segment_panels + 1)[1:]])
            x, w = _gl_panels(e, n)
        elif last and right_class != "none":
            r = graded_radial_rule(max(res.n_panels // 2, 2), n, lo, hi, rho, "right",
                                   right_class, right_exponent, coarse=False)
            x, w = r.nodes, r.weights
        else:
            x, w = _gl_panels(np.linspace(lo, hi, res.segment_panels + 1), n)
        parts_x.append(x)
        parts_w.append(w)
    c = None
    if coarse:
        c = composite_radial_rule(a, b, bps, replace(res, n_per_panel=max(n // 2, 2)),
                                  graded_left, right_class, right_exponent, coarse=False)
    return QuadratureRule(np.concatenate(parts_x), np.concatenate(parts_w), float(a), float(b),
                          "none", right_class, coarse=c, breakpoints=tuple(bps))


def sphere_rule(dim, n=None, method="product", seed=0, coarse=True):
    """Quadrature on S^{dim-1} whose weights sum to the sphere area.

    ``method="product"``: trapezoid in the azimuth (n nodes) and
    Gauss-Legendre in every polar angle (n // 2 nodes each).
    ``method="montecarlo"``: n random directions with equal weights.
    """
    dim = int(dim)
    if dim < 2:
        raise UnsupportedDimension("sphere rules need dimension >= 2")
    if n is None:
        n = Resolution().angular_nodes(dim)
    n = int(n)
    if method == "montecarlo":
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((n, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        w = np.full(n, sphere_area(dim) / n)
        c = sphere_rule(dim, n // 2, method, seed + 1, coarse=False) if coarse else None
        return AngularRule(pts, w, dim, method, c)
    if method != "product":
        raise InvalidParameters(f"unknown angular method {method!r}")
    if dim > MAX_PRODUCT_DIM:
        raise UnsupportedDimension(
            f"product sphere rules stop at dimension {MAX_PRODUCT_DIM}; use method='montecarlo'")
    # Azimuth: trapezoid after phi = psi - sin(4 psi) / 4, which clusters
    # nodes at the coordinate axes where gauges such as weighted l^q norms
    # lose smoothness; polar angles: Gauss-Legendre in theta on the two
    # halves of (0, pi), so the kink at the equator sits on a panel edge.
    psi = 2 * pi * (np.arange(n) + 0.5) / n
    phi = psi - np.sin(4 * psi) / 4
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    w = (2 * pi / n) * (1 - np.cos(4 * psi))
    if dim > 2:
        th, wth = _gl_panels([0.0, pi / 2, pi], max(n // 4, 1))
    for m in range(1, dim - 1):
        # add a polar angle with measure sin^m(theta) d theta
        c, s = np.cos(th), np.sin(th)
        wc = wth * s ** m
        pts = np.concatenate([
            np.repeat(c[:, None], len(pts), axis=0),
            (s[:, None, None] * pts[None, :, :]).reshape(-1, pts.shape[1]),
        ], axis=1)
        w = (wc[:, None] * w[None, :]).ravel()
    cr = sphere_rule(dim, max(n // 2, 4), method, seed, coarse=False) if coarse else None
    return AngularRule(pts, w, dim, method, cr)


def tensor_nodes(rules):
    """Tensor product of 1-D rules: (M, d) nodes and (M,) weights."""
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    wgrid = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    return nodes, weights


def panel_rule(edges, n, coarse=True):
    """Composite Gauss-Legendre rule on consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    if np.any(np.diff(edges) <= 0):
        raise InvalidInterval("panel edges must increase")
    x, w = _gl_panels(edges, int(n))
    c = panel_rule(edges, max(n // 2, 1), coarse=False) if coarse else None
    return QuadratureRule(x, w, float(edges[0]), float(edges[-1]), coarse=c,
                          breakpoints=tuple(edges[1:-1]))


def jacobi_rule(n, a, b, beta, end="left", coarse=True):
    """Single-panel rule exact for |t - endpoint|^beta times polynomials."""
    _check_interval(a, b)
    if beta <= -1:
        raise InvalidParameters("need beta > -1")
    t, w = _jacobi_panel(0.0, b - a, int(n), float(beta))
    if end == "left":
        x = a + t
    else:
        x, w = (b - t)[::-1], w[::-1]
    c = jacobi_rule(max(n // 2, 1), a, b, beta, end, coarse=False) if coarse else None
    cls = "integrable-power"
    return QuadratureRule(x, w, float(a), float(b), cls if end == "left" else "none",
                          cls if end == "right" else "none", coarse=c)
