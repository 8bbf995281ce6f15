"""Wulff-ball geometry and integration in anisotropic polar coordinates.

A point of the Wulff ball of radius R is written ``x = r * theta / H0(theta)``
with ``theta`` on the Euclidean unit sphere and ``0 < r < R``; the volume
element becomes ``r^(N-1) H0(theta)^(-N) dr dsigma(theta)``.
"""

from dataclasses import dataclass

import numpy as np

from ._parallel import chunk_size, map_chunks, pairwise_sum
from .errors import InvalidParameters, NonintegrableSingularity
from .quadrature import Resolution, composite_radial_rule, sphere_rule

VOLUME_NODES = {2: 1 << 14, 3: 512, 4: 96}


@dataclass(frozen=True)
class WulffGeometry:
    """Volume and anisotropic perimeter of the unit Wulff ball {H0 < 1}."""

    h0: object
    dim: int
    kappa: float
    kappa_err: float

    @property
    def omega(self):
        """Anisotropic perimeter of the unit Wulff ball, N * kappa."""
        return self.dim * self.kappa

    def ball_volume(self, R):
        return self.kappa * float(R) ** self.dim


@dataclass(frozen=True, eq=False)
class PolarFrame:
    """Sphere nodes mapped onto the unit Wulff sphere.

    ``rays[k] = theta_k / H0(theta_k)`` satisfies ``H0(rays[k]) = 1`` and
    ``weights[k] = w_k * H0(theta_k)^(-N)``, so that
    ``sum_k weights[k] g(rays[k])`` approximates the surface integral of
    `g` against the anisotropic measure on the Wulff sphere.
    """

    rays: np.ndarray
    weights: np.ndarray
    coarse: "PolarFrame | None" = None

    @property
    def dim(self):
        return self.rays.shape[1]


def polar_frame(h0, n=None, method="product", seed=0, coarse=True):
    rule = sphere_rule(h0.dim, n, method=method, seed=seed, coarse=coarse)
    return _frame_from_rule(h0, rule)


def _frame_from_rule(h0, rule):
    hv = h0.value(rule.nodes)
    c = _frame_from_rule(h0, rule.coarse) if rule.coarse is not None else None
    return PolarFrame(rule.nodes / hv[:, None], rule.weights * hv ** (-h0.dim), c)


def wulff_volume(h0, angular_resolution=None, method="product", seed=0, return_error=False):
    """Volume of {H0 < 1} as (1/N) times the sphere integral of H0^(-N)."""
    n = angular_resolution or VOLUME_NODES.get(h0.dim, 32)
    frame = polar_frame(h0, n, method=method, seed=seed)
    kappa = float(pairwise_sum(frame.weights)) / h0.dim
    coarse = float(pairwise_sum(frame.coarse.weights)) / h0.dim
    if return_error:
        return kappa, abs(kappa - coarse)
    return kappa


def wulff_geometry(h0, angular_resolution=None, method="product"):
    """Cached `WulffGeometry` of a polar gauge."""
    cache = h0.__dict__.setdefault("_wulff_cache", {})
    key = (angular_resolution, method)
    if key not in cache:
        k, err = wulff_volume(h0, angular_resolution, method, return_error=True)
        cache[key] = WulffGeometry(h0, h0.dim, k, err)
    return cache[key]


def surface_measure_total(h0):
    """Anisotropic perimeter of the unit Wulff ball."""
    return wulff_geometry(h0).omega


def polar_sums(integrand, frame, r_nodes, r_weights, n_out=1):
    """Integrate several quantities over a Wulff annulus in polar form.

    Parameters
    ----------
    integrand : callable
        ``integrand(rays, r)`` with rays of shape (m, N) and radii (k,)
        returns an array (n_out, m, k) of integrand values at
        ``x = r * ray``.
    frame : PolarFrame
    r_nodes, r_weights : ndarray
        Radial rule; the Jacobian ``r^(N-1)`` is applied here.

    Returns
    -------
    ndarray (n_out,)
        Integrals, reduced over rays with a fixed summation tree so the
        result does not depend on how rays are split between workers.
    """
    dim = frame.dim
    rw = r_weights * r_nodes ** (dim - 1)
    m = len(frame.weights)
    chunk = chunk_size(m, len(r_nodes) * max(n_out, 1) * (dim + 2))

    def work(lo, hi):
        vals = np.asarray(integrand(frame.rays[lo:hi], r_nodes), dtype=float)
        return (vals * rw).sum(axis=-1) * frame.weights[lo:hi]

    parts = map_chunks(work, m, chunk)
    per_ray = np.concatenate(parts, axis=-1)
    return pairwise_sum(np.moveaxis(per_ray, -1, 0))


def _as_callable(f):
    return f.value if hasattr(f, "value") else f


def polar_integrate(f, h0, R, rule=None, res=None, breakpoints=(), return_error=False):
    """Integral of `f` over the Wulff ball {H0 < R}.

    Parameters
    ----------
    f : callable or field
        Vectorized ``f(x)`` on points of shape (..., N); fields are
        evaluated through their ``value`` method.
    h0 : PolarGauge
    R : float
        Finite radius, or the cutoff for fields with compact support.
    rule : QuadratureRule, optional
        Radial rule on (0, R) with an attached angular rule.  Built from
        `res` and `breakpoints` when omitted.
    """
    if not (np.isfinite(R) and R > 0):
        raise InvalidParameters("polar_integrate needs a finite positive radius or cutoff")
    fun = _as_callable(f)
    res = res or Resolution()
    if rule is None:
        rule = composite_radial_rule(0.0, float(R), breakpoints, res)
    if rule.angular is not None:
        ang = rule.angular
        frame = _frame_from_rule(h0, ang)
    else:
        frame = polar_frame(h0, res.angular_nodes(h0.dim), res.angular_method)

    def integrand(rays, r):
        x = r[None, :, None] * rays[:, None, :]
        return fun(x)[None]

    val = float(polar_sums(integrand, frame, rule.nodes, rule.weights)[0])
    _check_inner_decay(fun, frame, rule, val, h0.dim)
    if not return_error:
        return val
    coarse_rule = rule.coarse or rule
    coarse_frame = frame.coarse or frame
    cval = float(polar_sums(integrand, coarse_frame, coarse_rule.nodes, coarse_rule.weights)[0])
    return val, abs(val - cval)


def _check_inner_decay(fun, frame, rule, total, dim):
    # r^N |f| at the innermost node estimates the mass the rule cannot see
    r0 = float(np.min(rule.nodes))
    if r0 > 1e-6 * rule.b:
        return
    x = r0 * frame.rays
    tail = float(np.max(np.abs(fun(x)))) * r0 ** dim * float(np.sum(frame.weights))
    if not np.isfinite(tail) or tail > 1e-6 * max(abs(total), 1e-300):
        raise NonintegrableSingularity(
            "integrand does not decay at the inner cut; declare its core behaviour")
