import numpy as np
import pytest

from wavetails.solvers.finite_differences import (
    get_first_derivative,
    get_interpolation_stencil,
    get_lagrange_weights,
    get_second_derivative,
    interpolate,
    pad_radial,
)

DR = 0.05
R = DR * np.arange(41)


def test_pad_radial():
    padded = pad_radial(np.array([1.0, 2.0, 3.0, 4.0]))

    np.testing.assert_array_equal(padded, [3, 2, 1, 2, 3, 4, 0, 0])


def test_derivatives_of_even_quartic():
    values = R**4 - R**2

    first = get_first_derivative(values, DR)
    second = get_second_derivative(values, DR)

    # the stencils are exact on quartics; the last two points see the zero
    # ghost values beyond the boundary
    np.testing.assert_allclose(first[:-2], (4 * R**3 - 2 * R)[:-2], atol=1e-9)
    np.testing.assert_allclose(second[:-2], (12 * R**2 - 2)[:-2], atol=1e-8)
    assert first[0] == 0.0


def test_lagrange_weights():
    offsets = np.arange(-2, 3)

    weights = get_lagrange_weights(offsets, 0.3)

    assert weights.sum() == pytest.approx(1.0, rel=1e-14)
    assert np.dot(weights, offsets**3) == pytest.approx(0.3**3, rel=1e-12)
    np.testing.assert_array_equal(
        get_lagrange_weights(offsets, 1.0), [0, 0, 0, 1, 0]
    )


@pytest.mark.parametrize("r", [0.0, 0.02, 0.07, 1.234, 1.99])
def test_interpolation_of_even_quartic(r):
    values = 1 + R**2 - 0.5 * R**4
    indices, weights = get_interpolation_stencil(r, DR, R.size)

    assert interpolate(values, indices, weights) == pytest.approx(
        1 + r**2 - 0.5 * r**4, abs=1e-12
    )
