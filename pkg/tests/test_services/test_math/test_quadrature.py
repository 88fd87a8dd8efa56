import math

import numpy as np
import pytest

from wavetails.services.math.quadrature import (
    QuadratureError,
    gauss_legendre,
    get_panel_edges,
    integrate_adaptive,
    integrate_panels,
)


def test_gauss_legendre_is_exact_for_polynomials():
    rule = gauss_legendre(5)
    x, w = rule.scaled(0.0, 1.0)

    assert np.sum(w * x**9) == pytest.approx(0.1, rel=1e-14)


def test_panel_edges():
    lower, upper = get_panel_edges([0.0, 1.0, 3.0], 2)

    np.testing.assert_allclose(lower, [0.0, 0.5, 1.0, 2.0])
    np.testing.assert_allclose(upper, [0.5, 1.0, 2.0, 3.0])


def test_integrate_panels_piecewise_polynomial():
    def bump(x):
        return np.where(np.abs(x) < 1, (1 - x**2) ** 2, 0.0)

    result = integrate_panels(bump, [-2.0, -1.0, 1.0, 2.0])

    assert result.value == pytest.approx(16 / 15, rel=1e-14)
    assert result.magnitude == pytest.approx(16 / 15, rel=1e-14)


def test_integrate_panels_smooth_function():
    result = integrate_panels(np.sin, [0.0, math.pi], rel_tol=1e-13)

    assert result.value == pytest.approx(2.0, rel=1e-13)


def test_integrate_panels_magnitude_bounds_cancellation():
    result = integrate_panels(np.sin, [-math.pi, math.pi])

    assert result.value == pytest.approx(0.0, abs=1e-14)
    assert result.magnitude == pytest.approx(4.0, rel=1e-12)


def test_integrate_panels_degenerate_input():
    assert integrate_panels(np.cos, [1.0]).value == 0.0

    with pytest.raises(QuadratureError):
        integrate_panels(np.cos, [1.0, 0.0])


def test_integrate_panels_reports_non_convergence():
    with pytest.raises(QuadratureError):
        integrate_panels(
            lambda x: np.sin(200 * x),
            [0.0, 10.0],
            node_count=4,
            max_doublings=2,
        )


def test_integrate_adaptive():
    result = integrate_adaptive(lambda x: 1 / x**4, 1.0, 3.0)

    assert result.value == pytest.approx((1 - 1 / 27) / 3, rel=1e-13)
    assert integrate_adaptive(np.exp, 2.0, 2.0).value == 0.0
