import math

import numpy as np
import pytest

from anisohardy.errors import InvalidGrading, InvalidInterval, UnsupportedDimension
from anisohardy.quadrature import (Resolution, composite_radial_rule, graded_radial_rule,
                                   jacobi_rule, radial_rule, sphere_area, sphere_rule)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_gauss_legendre_polynomial_exactness(n):
    r = radial_rule(n, 0.0, 2.0)
    for k in range(2 * n):
        assert r.integrate(lambda x: x ** k) == pytest.approx(2.0 ** (k + 1) / (k + 1), rel=1e-12)


def test_large_rule_is_fast_and_exact():
    r = radial_rule(4000, 0.0, 1.0)
    assert r.integrate(np.cos) == pytest.approx(math.sin(1.0), rel=1e-13)


def test_error_estimate_from_coarse_rule():
    r = radial_rule(12, 0.0, 1.0)
    q, err = r.integrate_with_error(np.exp)
    assert abs(q - (math.e - 1)) < 1e-12
    assert err >= 0


@pytest.mark.parametrize("s", [-0.5, -0.9, 0.3])
def test_graded_rule_handles_power_singularity(s):
    r = graded_radial_rule(30, 12, 0.0, 1.0, 0.3, "left", "integrable-power", s)
    assert r.integrate(lambda x: x ** s) == pytest.approx(1 / (1 + s), rel=1e-10)


def test_graded_rule_right_end():
    # few panels: nodes closer to b than machine epsilon would round onto it
    r = graded_radial_rule(10, 12, 0.0, 1.0, 0.3, "right", "integrable-power", -0.5)
    assert r.integrate(lambda x: (1 - x) ** -0.5) == pytest.approx(2.0, rel=1e-10)


def test_jacobi_rule_weight():
    r = jacobi_rule(8, 0.0, 1.0, -0.5)
    assert r.integrate(lambda x: np.ones_like(x) * x ** -0.5) == pytest.approx(2.0, rel=1e-12)


def test_composite_rule_respects_breakpoints():
    f = lambda x: np.abs(x - 0.37)
    exact = 0.27 ** 2 / 2 + 0.63 ** 2 / 2
    with_bp = composite_radial_rule(0.1, 1.0, (0.37,), Resolution())
    assert with_bp.integrate(f) == pytest.approx(exact, rel=1e-12)


def test_invalid_interval_and_grading():
    with pytest.raises(InvalidInterval):
        radial_rule(4, 1.0, 0.0)
    with pytest.raises(InvalidGrading):
        graded_radial_rule(10, 8, 0.0, 1.0, 1.5)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_sphere_rule_area_and_moments(dim):
    rule = sphere_rule(dim)
    assert rule.weights.sum() == pytest.approx(sphere_area(dim), rel=1e-12)
    # int x_1^2 over the sphere = area / dim
    assert rule.integrate(lambda x: x[:, 0] ** 2) == pytest.approx(sphere_area(dim) / dim, rel=1e-10)


def test_monte_carlo_sphere_rule_is_seeded():
    a = sphere_rule(7, 1000, method="montecarlo", seed=3)
    b = sphere_rule(7, 1000, method="montecarlo", seed=3)
    np.testing.assert_array_equal(a.nodes, b.nodes)
    with pytest.raises(UnsupportedDimension):
        sphere_rule(7, 10)


def test_plain_gauss_legendre_converges_slowly_on_endpoint_singularity():
    # r^-1/2 on (0, 1): the error of an unadapted rule decays like 1/n
    errs = [abs(radial_rule(n, 0.0, 1.0, coarse=False).integrate(lambda x: x ** -0.5) - 2.0)
            for n in (64, 128)]
    assert errs[0] > 1e-3
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
