from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_legendre, hyp2f1

from wavetails.services.math.quadrature import gauss_legendre
from wavetails.services.math.special import (
    SpecialFunctionError,
    binomial,
    double_factorial_odd,
    falling_factorial,
    hyp2f1_terminating,
    legendre,
    legendre_power_expansion,
)


def test_falling_factorial():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(7, 0) == 1
    assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)
    # a zero factor makes C(l, 2) vanish exactly
    assert falling_factorial(2, 3) == 0

    with pytest.raises(SpecialFunctionError):
        falling_factorial(3, -1)


def test_double_factorial_odd():
    assert double_factorial_odd(0) == 1
    assert double_factorial_odd(1) == 3
    assert double_factorial_odd(3) == 105
    assert isinstance(double_factorial_odd(5), int)

    with pytest.raises(SpecialFunctionError):
        double_factorial_odd(-1)


def test_binomial():
    assert binomial(6, 2) == 15
    assert binomial(10, 0) == 1


def test_legendre_values():
    assert legendre(0, 0.3) == 1.0
    assert legendre(1, 0.3) == pytest.approx(0.3)
    assert legendre(2, 0.5) == pytest.approx(-0.125)

    mu = np.linspace(-1, 1, 41)
    for l in range(9):
        np.testing.assert_allclose(
            legendre(l, mu), eval_legendre(l, mu), rtol=1e-12, atol=1e-14
        )


@pytest.mark.parametrize("node_count", [13, 24])
def test_legendre_orthogonality(node_count):
    rule = gauss_legendre(node_count)
    values = [legendre(l, rule.nodes) for l in range(13)]

    for l, first in enumerate(values):
        for m, second in enumerate(values):
            expected = 2 / (2 * l + 1) if l == m else 0.0
            assert abs(np.sum(rule.weights * first * second) - expected) < (
                1e-12
            )


def test_legendre_clamps_rounding_overshoot():
    assert legendre(3, 1 + 1e-13) == pytest.approx(1.0)

    with pytest.raises(SpecialFunctionError):
        legendre(3, 1.1)


def test_legendre_power_expansion():
    assert legendre_power_expansion(0) == {0: Fraction(1)}
    assert legendre_power_expansion(2) == {
        2: Fraction(2, 3),
        0: Fraction(1, 3),
    }
    assert legendre_power_expansion(3) == {
        3: Fraction(2, 5),
        1: Fraction(3, 5),
    }


def test_legendre_power_expansion_reproduces_powers():
    mu = np.linspace(-1, 1, 17)

    for k in range(9):
        expansion = legendre_power_expansion(k)
        total = sum(
            float(coefficient) * legendre(l, mu)
            for l, coefficient in expansion.items()
        )
        np.testing.assert_allclose(total, mu**k, atol=1e-13)


def test_hyp2f1_terminating_matches_scipy():
    for a, b, c, z in [
        (-3, 1.5, 2.5, 0.3),
        (-0.5, -2, 3.5, 0.8),
        (-4, -3.5, 4.5, 0.25),
    ]:
        assert hyp2f1_terminating(a, b, c, z) == pytest.approx(
            hyp2f1(a, b, c, z), rel=1e-13
        )


def test_hyp2f1_terminating_rejects_infinite_series():
    with pytest.raises(SpecialFunctionError):
        hyp2f1_terminating(0.5, 1.5, 2.5, 0.3)

    with pytest.raises(SpecialFunctionError):
        hyp2f1_terminating(-3, 1.0, -1, 0.5)
