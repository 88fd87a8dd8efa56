import numpy as np
import pytest

from wavetails.models.nonlinearity import NonlinearityTerm
from wavetails.services import duhamel
from wavetails.services.duhamel import (
    DuhamelError,
    DuhamelIntegrator,
    LightConeIntegrator,
    duhamel_iterate,
    first_order_iterate,
    fit_null_coefficients,
    get_light_cone_cosine,
    phi1_null_expansion_check,
    verify_master_identity,
)
from wavetails.services.freewave import tail_integral
from wavetails.services.predictions import coeff_C, coeff_E


def test_light_cone_cosine_endpoints():
    t, r, eta = 10.0, 3.0, -2.0

    assert get_light_cone_cosine(t, r, eta, t - r) == pytest.approx(-1.0)
    assert get_light_cone_cosine(t, r, eta, t + r) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "l, n, t, r, eta",
    [
        (1, 3, 10.0, 3.0, -2.0),
        (1, 4, 10.0, 3.0, -2.0),
        (2, 6, 7.5, 1.5, 0.5),
        (3, 11, 12.0, 4.0, 1.0),
    ],
)
def test_master_identity(l, n, t, r, eta):
    check = verify_master_identity(l, n, t, r, eta)

    assert check.rel_err < 1e-10
    assert check.rel_err_series < 1e-12


def test_master_identity_where_the_large_t_form_vanishes():
    # 1 + (l + n) eta / t = 0
    check = verify_master_identity(1, 4, 10.0, 3.0, -2.0)

    assert check.rhs_expansion == 0.0
    assert check.rel_err_expansion == float("inf")
    assert check.rel_err < 1e-10


def test_iterate_integrators_share_an_abstract_base(default_profile):
    with pytest.raises(TypeError):
        duhamel._IterateIntegrator(
            default_profile, 1, NonlinearityTerm(p=2), "both", 1e-9, 8, 4
        )


def test_master_identity_zero_upper_parameter():
    t, r, eta = 10.0, 3.0, -2.0
    check = verify_master_identity(1, 3, t, r, eta)

    assert check.rhs_closed == pytest.approx(
        -(2 / 3) * r**2 / ((t - eta) ** 2 - r**2) ** 2, rel=1e-14
    )


def test_master_identity_large_t_residual_is_quadratic():
    r, eta = 2.0, 0.5
    coarse = verify_master_identity(2, 5, 200.0, r, eta)
    fine = verify_master_identity(2, 5, 400.0, r, eta)

    assert fine.rel_err_expansion < coarse.rel_err_expansion
    assert coarse.rel_err_expansion / fine.rel_err_expansion == (
        pytest.approx(4.0, rel=0.1)
    )


def test_master_identity_rejects_invalid_arguments():
    with pytest.raises(DuhamelError):
        verify_master_identity(2, 3, 10.0, 2.0, 0.0)

    with pytest.raises(DuhamelError):
        verify_master_identity(1, 4, 3.0, 2.0, 1.5)


@pytest.mark.parametrize("l", [1, 2])
def test_quadratic_first_iterate_is_huygensian(default_profile, l):
    integrator = DuhamelIntegrator(default_profile, l, NonlinearityTerm(p=2))

    for t, r in [(5.0, 1.0), (20.0, 2.0), (60.0, 0.5)]:
        result = integrator.evaluate(t, r)

        assert result.magnitude > 0
        assert abs(result.value) < 1e-12 * result.magnitude


def test_interchanged_order_matches_light_cone_order(
    default_profile, cubic_term
):
    t, r = 10.0, 2.0
    interchanged = DuhamelIntegrator(
        default_profile, 1, cubic_term, rel_tol=1e-11
    ).evaluate(t, r)
    light_cone = LightConeIntegrator(
        default_profile, 1, cubic_term, rel_tol=1e-11
    ).evaluate(t, r)

    assert interchanged.value == pytest.approx(light_cone.value, rel=1e-9)


def test_first_iterate_approaches_the_generic_tail(
    default_profile, cubic_term
):
    r = 2.0
    amplitude = coeff_C(1, 3) * tail_integral(default_profile, 1, 3, 0)
    errors = [
        abs(
            t**5 * first_order_iterate(default_profile, 1, cubic_term, t, r)
            / amplitude
            - 1
        )
        for t in (50.0, 100.0, 200.0)
    ]

    assert errors[-1] < 0.01
    assert errors[0] > errors[1] > errors[2]


def test_first_iterate_approaches_the_alpha_eq_beta_tail(default_profile):
    term = NonlinearityTerm(p=1, q=1, alpha=1.0, beta=1.0)
    amplitude = coeff_E(1, 1, 1, 1.0) * tail_integral(default_profile, 1, 2, 0)

    value = first_order_iterate(default_profile, 1, term, 200.0, 2.0)

    assert 200.0**4 * value == pytest.approx(amplitude, rel=0.01)


def test_light_cone_iterate_inside_the_support(default_profile, cubic_term):
    value = duhamel_iterate(
        default_profile, 1, cubic_term, 0.8, 0.5, rel_tol=1e-6
    )

    assert np.isfinite(value)


def test_interchanged_order_needs_late_times(default_profile, cubic_term):
    integrator = DuhamelIntegrator(default_profile, 1, cubic_term)

    with pytest.raises(DuhamelError, match="must exceed"):
        integrator.evaluate(2.0, 1.0)

    with pytest.raises(DuhamelError):
        integrator.evaluate(10.0, 0.0)


def test_light_cone_order_rejects_singular_parts(default_profile, cubic_term):
    integrator = LightConeIntegrator(
        default_profile, 1, cubic_term, part="retarded"
    )

    with pytest.raises(DuhamelError, match="singular"):
        integrator.evaluate(1.5, 1.5)


def test_fit_null_coefficients():
    distances = np.array([100.0, 200.0, 400.0, 800.0])
    values = 2 * distances**-2 - 3 * distances**-3 + 5 * distances**-4

    coefficients = fit_null_coefficients(values, distances, [2, 3, 4])

    assert coefficients[2] == pytest.approx(2.0, rel=1e-8)
    assert coefficients[3] == pytest.approx(-3.0, rel=1e-8)
    assert coefficients[4] == pytest.approx(5.0, rel=1e-6)


def test_fit_null_coefficients_rejects_clustered_samples():
    distances = np.array([100.0, 100.0001, 100.0002])

    with pytest.raises(DuhamelError, match="wider range"):
        fit_null_coefficients(np.ones(3), distances, [2, 3, 4])


def test_null_expansion_before_the_support(default_profile):
    check = phi1_null_expansion_check(
        default_profile, 1, -2.0, [200.0, 400.0, 800.0]
    )

    assert check.extracted_coefficient == 0.0
    assert check.h_of_u == 0.0


def test_null_expansion_validates_samples(default_profile):
    with pytest.raises(DuhamelError):
        phi1_null_expansion_check(default_profile, 1, 0.0, [200.0, 400.0])

    with pytest.raises(DuhamelError):
        phi1_null_expansion_check(
            default_profile, 1, 0.0, [400.0, 200.0, 800.0]
        )


@pytest.mark.slow
@pytest.mark.parametrize("u", [-0.5, 0.0, 0.4])
def test_null_expansion_recovers_h(default_profile, u):
    check = phi1_null_expansion_check(
        default_profile, 1, u, [200.0, 400.0, 800.0]
    )

    assert check.rel_err < 0.02
