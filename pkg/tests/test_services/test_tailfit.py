import math

import numpy as np
import pytest

from wavetails.operations.observers import ObserverSeries
from wavetails.services.predictions import GENERIC, TailPrediction, TailTerm
from wavetails.services.tailfit import (
    DEGENERATE,
    FAIL,
    FAST_DECAY,
    PASS,
    TailFitError,
    compare,
    default_window,
    derivative_slope,
    eps_order,
    fit_amplitude,
    fit_tail,
    local_slope,
    trim_window,
    validate_window,
)

WINDOW = (20.0, 320.0)
EPSILON = 0.05


def make_prediction(gamma=4, amplitude=2.0, eps_order=3):
    term = TailTerm(
        eps_order=eps_order,
        gamma=gamma,
        amplitude=amplitude,
        case_label=GENERIC,
        coefficient=1.0,
        integral=amplitude,
        integral_label="I_1(3,0)",
    )
    return TailPrediction(terms=[term])


@pytest.fixture
def cubic_tail(power_law_series):
    """eps^3 * 2 * t^-4 (1 + 3/t), as an eps^3 tail would look."""
    return power_law_series(4.0, 2.0 * EPSILON**3, correction=3.0)


def test_local_slope_of_a_power_law(power_law_series):
    slopes = local_slope(power_law_series(4.0, 1.5), WINDOW)

    np.testing.assert_allclose(slopes.gamma, 4.0, rtol=1e-10)
    assert slopes.extrapolated() == pytest.approx(4.0, rel=1e-10)
    assert slopes.t[0] > WINDOW[0] and slopes.t[-1] < WINDOW[1]


def test_local_slope_extrapolates_the_correction(cubic_tail):
    slopes = local_slope(cubic_tail, (40.0, 400.0))

    assert np.all(slopes.gamma > 4.0)
    assert slopes.extrapolated() == pytest.approx(4.0, abs=0.02)


def test_derivative_slope(power_law_series):
    slopes = derivative_slope(power_law_series(3.0, -0.7), WINDOW)

    np.testing.assert_allclose(slopes.gamma, 3.0, rtol=1e-12)


def test_fit_amplitude_removes_the_correction(cubic_tail):
    amplitude = fit_amplitude(cubic_tail, 4.0, WINDOW)

    assert amplitude == pytest.approx(2.0 * EPSILON**3, rel=1e-10)


def test_fit_amplitude_with_the_wrong_exponent(cubic_tail):
    with pytest.raises(TailFitError, match="halves disagree"):
        fit_amplitude(cubic_tail, 3.5, WINDOW)


def test_fit_amplitude_is_unchanged_under_subsampling():
    t = np.arange(10.0, 400.125, 0.25)
    amplitude = 2.0 * EPSILON**3
    phi = amplitude * t**-4 * (1 + 3.0 / t + 30.0 / t**2)
    series = ObserverSeries(r_obs=2.0, t=t, phi=phi, phi_t=np.zeros_like(t))

    full = fit_amplitude(series, 4.0, WINDOW)
    halved = fit_amplitude(series.subsampled(2), 4.0, WINDOW)

    assert halved == pytest.approx(full, rel=1e-3)
    assert full == pytest.approx(amplitude, rel=0.02)


def test_eps_order(power_law_series):
    series = power_law_series(4.0, 2.0 * 0.1**3, epsilon=0.1)
    series_half = power_law_series(4.0, 2.0 * 0.05**3, epsilon=0.05)

    assert eps_order(series, series_half, WINDOW) == pytest.approx(
        3.0, rel=1e-10
    )


def test_eps_order_interpolates_other_cadences(power_law_series):
    series = power_law_series(5.0, 0.1**2, epsilon=0.1)
    series_half = power_law_series(5.0, 0.05**2, epsilon=0.05, d_t=0.125)

    assert eps_order(series, series_half, WINDOW) == pytest.approx(
        2.0, abs=1e-4
    )


def test_eps_order_rejects_inconsistent_runs(power_law_series):
    series = power_law_series(4.0, 1.0, epsilon=0.1)

    with pytest.raises(TailFitError, match="varies"):
        eps_order(series, power_law_series(3.0, 1.0, epsilon=0.05), WINDOW)

    with pytest.raises(TailFitError, match="do not determine"):
        eps_order(series, series, WINDOW)


def test_tail_samples_reject_sign_changes():
    t = np.linspace(10.0, 400.0, 400)
    phi = (t - 100.0) * t**-5
    series = ObserverSeries(r_obs=2.0, t=t, phi=phi, phi_t=np.zeros_like(t))

    with pytest.raises(TailFitError, match="changes sign"):
        local_slope(series, WINDOW)


def test_tail_samples_reject_noise(power_law_series):
    with pytest.raises(TailFitError, match="noise floor"):
        local_slope(power_law_series(4.0, 1e-10), WINDOW)


def test_tail_samples_need_enough_points(power_law_series):
    with pytest.raises(TailFitError, match="samples"):
        local_slope(power_law_series(4.0, 1.0), (20.0, 20.5))


def test_default_window():
    assert default_window(2.0, 1.1, 200.0) == pytest.approx((20.0, 160.0))
    assert default_window(10.0, 1.1, 200.0) == pytest.approx((22.2, 160.0))

    with pytest.raises(TailFitError, match="too short"):
        default_window(2.0, 1.1, 20.0)


def test_validate_window():
    validate_window((20.0, 160.0), 2.0, 1.1)

    with pytest.raises(TailFitError, match="before the tail regime"):
        validate_window((5.0, 160.0), 2.0, 1.1)

    with pytest.raises(TailFitError, match="half a decade"):
        validate_window((20.0, 50.0), 2.0, 1.1)


def test_trim_window(power_law_series):
    series = power_law_series(4.0, 1e-6, epsilon=0.1)
    series_half = power_law_series(4.0, 1e-6 / 16, epsilon=0.05)

    # 1e-6 t^-4 reaches 100 x 1e-16 at t = 100, the half run at t = 50
    assert trim_window(WINDOW, [series]) == pytest.approx(
        (20.0, 100.0), abs=0.3
    )
    assert trim_window(WINDOW, [series, series_half]) == pytest.approx(
        (20.0, 50.0), abs=0.3
    )
    assert trim_window(WINDOW, [power_law_series(4.0, 1.0)]) == WINDOW


def test_fit_tail_checks_the_window_against_the_tail_regime(cubic_tail):
    with pytest.raises(TailFitError, match="before the tail regime"):
        fit_tail(cubic_tail, (5.0, 320.0), radius=1.1)

    with pytest.raises(TailFitError, match="half a decade"):
        fit_tail(cubic_tail, (20.0, 50.0), radius=1.1)

    assert fit_tail(cubic_tail, (20.0, 50.0)).window == (20.0, 50.0)


def test_fit_tail(power_law_series):
    series = power_law_series(4.0, 2.0 * 0.1**3, correction=3.0, epsilon=0.1)
    series_half = power_law_series(
        4.0, 2.0 * 0.05**3, correction=3.0, epsilon=0.05
    )

    fit = fit_tail(series, WINDOW, series_half=series_half)

    assert fit.gamma_hat == pytest.approx(4.0, abs=0.05)
    assert fit.amplitude_gamma == 4.0
    assert fit.amplitude_hat == pytest.approx(2.0 * 0.1**3, rel=1e-8)
    assert fit.eps_order_hat == pytest.approx(3.0, rel=1e-10)
    assert fit.slope_range[0] > 4.0
    assert fit.verdict is None


def test_fit_tail_without_second_amplitude(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)

    assert math.isnan(fit.eps_order_hat)
    assert fit.to_dict()["window"] == list(WINDOW)


def test_compare_pass(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)
    report = compare(make_prediction(), fit, EPSILON)

    assert report.verdict == PASS
    assert report.fit.verdict == PASS
    assert report.amplitude_ratio == pytest.approx(1.0, rel=1e-8)
    assert report.expected_gamma == 4.0
    assert report.fit.tolerances == {
        "tol_gamma": 0.02,
        "tol_amp": 0.10,
        "tol_eps": 0.1,
    }


def test_compare_amplitude_outside_tolerance(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)
    report = compare(make_prediction(amplitude=3.0), fit, EPSILON)

    assert report.verdict == FAIL
    assert "amplitude ratio" in report.diagnostics[-1]

    relaxed = compare(
        make_prediction(amplitude=3.0), fit, EPSILON, tol_amp=0.5
    )
    assert relaxed.verdict == PASS


def test_compare_wrong_sign(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)
    report = compare(make_prediction(amplitude=-2.0), fit, EPSILON)

    assert report.verdict == FAIL
    assert "wrong sign" in report.diagnostics[-1]


def test_compare_wrong_exponent(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)
    report = compare(make_prediction(gamma=5), fit, EPSILON)

    assert report.verdict == FAIL
    assert report.gamma_error == pytest.approx(0.2, abs=0.01)


def test_compare_wrong_eps_order(power_law_series):
    series = power_law_series(4.0, 2.0 * 0.1**3, epsilon=0.1)
    quadratic_half = power_law_series(4.0, 2.0 * 0.1**3 / 4, epsilon=0.05)
    cubic_half = power_law_series(4.0, 2.0 * 0.05**3, epsilon=0.05)

    fit = fit_tail(
        series, WINDOW, series_half=quadratic_half, amplitude_gamma=4.0
    )
    report = compare(make_prediction(), fit, 0.1)

    assert report.verdict == FAIL
    assert report.amplitude_ratio == pytest.approx(1.0, rel=1e-8)
    assert report.eps_order_error == pytest.approx(1.0, rel=1e-8)
    assert "eps_order_hat 2.000" in report.diagnostics[-1]

    fit = fit_tail(series, WINDOW, series_half=cubic_half, amplitude_gamma=4.0)
    report = compare(make_prediction(), fit, 0.1)

    assert report.verdict == PASS
    assert report.eps_order_error == pytest.approx(0.0, abs=1e-8)


def test_compare_degenerate_prediction(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW)
    report = compare(TailPrediction(), fit, EPSILON)

    assert report.verdict == DEGENERATE
    assert report.term is None
    assert report.to_dict()["expected"]["case"] is None


def test_compare_fast_decay(power_law_series):
    fit = fit_tail(power_law_series(7.0, 1e4), WINDOW)

    assert (
        compare(TailPrediction(), fit, EPSILON, fast_decay_threshold=6.0)
    ).verdict == FAST_DECAY
    assert (
        compare(TailPrediction(), fit, EPSILON, fast_decay_threshold=8.0)
    ).verdict == FAIL


def test_verdict_report_to_dict(cubic_tail):
    fit = fit_tail(cubic_tail, WINDOW, amplitude_gamma=4.0)
    data = compare(make_prediction(), fit, EPSILON).to_dict()

    assert data["verdict"] == PASS
    assert data["measurement"]["verdict"] == PASS
    assert data["expected"] == {
        "gamma": 4.0,
        "amplitude": pytest.approx(2.0 * EPSILON**3),
        "case": GENERIC,
        "eps_order": 3,
    }
