"""
Measurement of late-time tails from observer series.

A tail phi ~ A t^-gamma is measured in three numbers: the decay exponent
from the local slope of ln|phi| against ln t, the amplitude as the t -> oo
limit of t^gamma phi, and the epsilon order from two runs at different
amplitudes. The measurements are then compared against the dominant
predicted term.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from wavetails.operations.observers import ObserverSeries
from wavetails.services.predictions import TailPrediction, TailTerm

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
DEGENERATE = "degenerate"
FAST_DECAY = "fast_decay"
VERDICTS = (PASS, FAIL, DEGENERATE, FAST_DECAY)

NOISE_MARGIN = 10.0
# window ends are pulled in to where |phi| nears the noise floor
TRIM_MARGIN = 100.0
HALVES_TOLERANCE = 0.2
MIN_WINDOW_RATIO = math.sqrt(10.0)
MIN_WINDOW_START = 20.0
WINDOW_END_FRACTION = 0.8


class TailFitError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True, eq=False)
class LocalSlope:
    """
    Sampled decay exponent gamma(t) = -d ln|phi| / d ln t.

    Attributes:
        t (np.ndarray): Centres of the moving fits.
        gamma (np.ndarray): Local exponents.
    """

    t: np.ndarray
    gamma: np.ndarray

    def extrapolated(self) -> float:
        """
        Limit of gamma(t) as t -> oo, from a straight line in 1/t.
        """
        if self.t.size < 2:
            return float(self.gamma[-1])
        _, intercept = np.polyfit(1.0 / self.t, self.gamma, 1)
        return float(intercept)


@dataclass(frozen=True)
class FitResult:
    """
    Measured tail of one observer series.

    Attributes:
        gamma_hat (float): Extrapolated decay exponent.
        amplitude_hat (float): Limit of t^gamma phi, gamma as used for the
            amplitude fit.
        eps_order_hat (float): Measured power of epsilon, nan when no
            second amplitude was given.
        window (tuple[float, float]): Fit window.
        residual (float): RMS residual of the straight log-log fit.
        slope_range (tuple[float, float]): Smallest and largest local slope
            over the window.
        amplitude_gamma (float): Exponent used for amplitude_hat.
        verdict (str | None): Set by compare.
        tolerances (dict): Tolerances behind the verdict.
    """

    gamma_hat: float
    amplitude_hat: float
    eps_order_hat: float
    window: tuple[float, float]
    residual: float
    slope_range: tuple[float, float]
    amplitude_gamma: float
    verdict: Optional[str] = None
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gamma_hat": self.gamma_hat,
            "amplitude_hat": self.amplitude_hat,
            "eps_order_hat": self.eps_order_hat,
            "window": list(self.window),
            "residual": self.residual,
            "slope_range": list(self.slope_range),
            "amplitude_gamma": self.amplitude_gamma,
            "verdict": self.verdict,
            "tolerances": dict(self.tolerances),
        }


@dataclass(frozen=True)
class VerdictReport:
    """
    Outcome of comparing a measured tail against a prediction.

    Attributes:
        verdict (str): pass, fail, degenerate or fast_decay.
        fit (FitResult): Measurement, with verdict filled in.
        term (TailTerm | None): Dominant predicted term.
        expected_gamma (float): Predicted exponent.
        expected_amplitude (float): eps^k * A of the dominant term.
        gamma_error (float): Relative exponent error.
        amplitude_ratio (float): amplitude_hat / (eps^k A).
        eps_order_error (float): |eps_order_hat - k|, nan without a
            second amplitude.
        diagnostics (list[str]): Human-readable reasons.
    """

    verdict: str
    fit: FitResult
    term: Optional[TailTerm] = None
    expected_gamma: float = math.nan
    expected_amplitude: float = math.nan
    gamma_error: float = math.nan
    amplitude_ratio: float = math.nan
    eps_order_error: float = math.nan
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "measurement": self.fit.to_dict(),
            "expected": {
                "gamma": self.expected_gamma,
                "amplitude": self.expected_amplitude,
                "case": None if self.term is None else self.term.case_label,
                "eps_order": (
                    None if self.term is None else self.term.eps_order
                ),
            },
            "gamma_error": self.gamma_error,
            "amplitude_ratio": self.amplitude_ratio,
            "eps_order_error": self.eps_order_error,
            "diagnostics": list(self.diagnostics),
        }

    def print_results(self) -> None:
        print("\nTAIL FIT")
        print(f" gamma_hat: {self.fit.gamma_hat:.5f}")
        print(f" amplitude_hat: {self.fit.amplitude_hat:+.6e}")
        print(f" eps_order_hat: {self.fit.eps_order_hat:.4f}")
        print(f" window: [{self.fit.window[0]:g}, {self.fit.window[1]:g}]")
        print(f" verdict: {self.verdict}")
        for diagnostic in self.diagnostics:
            print(f"  - {diagnostic}")


def default_window(
    r_obs: float, radius: float, t_max: float
) -> tuple[float, float]:
    """
    [max(2 (r_obs + R), 20), 0.8 t_max]: late enough for the asymptotic
    regime and early enough to stay above the noise floor.
    """
    window = (
        max(2.0 * (r_obs + radius), MIN_WINDOW_START),
        WINDOW_END_FRACTION * t_max,
    )
    if window[1] <= window[0]:
        raise TailFitError(
            f"t_max = {t_max} is too short for a tail window starting at "
            f"t = {window[0]:g}"
        )
    return window


def trim_window(
    window: tuple[float, float],
    series_list: list[ObserverSeries],
    noise_floor: float = 1e-16,
) -> tuple[float, float]:
    """
    Ends a window at the last sample before any of the series drops to
    TRIM_MARGIN times the noise floor.

    Args:
        window (tuple[float, float]): Time window.
        series_list (list[ObserverSeries]): Series fitted over the window,
            usually the runs at eps and eps / 2.
        noise_floor (float): Absolute noise level of the series.

    Returns:
        tuple[float, float]: The window, possibly shorter.
    """
    t_lo, t_hi = window
    threshold = TRIM_MARGIN * noise_floor

    for series in series_list:
        part = series.window(t_lo, t_hi)
        below = np.abs(part.phi) <= threshold
        if np.any(below):
            index = int(np.argmax(below))
            t_hi = min(t_hi, float(part.t[max(index - 1, 0)]))

    if t_hi < window[1]:
        logger.info(
            "Window end pulled in from t = %g to t = %g by the noise floor",
            window[1],
            t_hi,
        )

    return t_lo, t_hi


def validate_window(
    window: tuple[float, float], r_obs: float, radius: float
) -> None:
    t_lo, t_hi = window

    if t_lo < 2.0 * (r_obs + radius):
        raise TailFitError(
            f"Window starts at t = {t_lo:g}, before the tail regime "
            f"t >= {2.0 * (r_obs + radius):g}"
        )

    if t_hi < MIN_WINDOW_RATIO * t_lo:
        raise TailFitError(
            f"Window [{t_lo:g}, {t_hi:g}] spans less than half a decade"
        )


def _tail_samples(
    series: ObserverSeries, window: tuple[float, float], noise_floor: float
) -> ObserverSeries:
    part = series.window(*window)

    if part.t.size < 4:
        raise TailFitError(
            f"Only {part.t.size} samples inside window "
            f"[{window[0]:g}, {window[1]:g}]"
        )

    if part.t[0] <= 0:
        raise TailFitError("Tail windows must lie at positive times")

    magnitude = np.abs(part.phi)
    if np.any(magnitude <= NOISE_MARGIN * noise_floor):
        first = part.t[np.argmax(magnitude <= NOISE_MARGIN * noise_floor)]
        raise TailFitError(
            f"|phi| drops below {NOISE_MARGIN:g} x noise floor "
            f"({noise_floor:g}) at t = {first:g}"
        )

    signs = np.sign(part.phi)
    if np.any(signs != signs[0]):
        first = part.t[np.argmax(signs != signs[0])]
        raise TailFitError(
            f"phi changes sign at t = {first:g} inside the window; the "
            "series is still transient"
        )

    return part


def local_slope(
    series: ObserverSeries,
    window: tuple[float, float],
    noise_floor: float = 1e-16,
    centers: int = 50,
    half_width: float = 0.1,
) -> LocalSlope:
    """
    Moving least-squares slope of (ln t, ln|phi|).

    Args:
        series (ObserverSeries): Observer series.
        window (tuple[float, float]): Time window.
        noise_floor (float): Absolute noise level of the series.
        centers (int): Number of fit centres.
        half_width (float): Half width of each fit in ln t.

    Returns:
        LocalSlope: gamma(t) at the fit centres.
    """
    part = _tail_samples(series, window, noise_floor)
    ln_t = np.log(part.t)
    ln_phi = np.log(np.abs(part.phi))

    half_width = min(half_width, 0.5 * (ln_t[-1] - ln_t[0]))
    grid = np.linspace(ln_t[0] + half_width, ln_t[-1] - half_width, centers)

    t_centers = []
    gamma = []

    for center in grid:
        mask = np.abs(ln_t - center) <= half_width
        if np.count_nonzero(mask) < 3:
            continue
        slope, _ = np.polyfit(ln_t[mask] - center, ln_phi[mask], 1)
        t_centers.append(math.exp(center))
        gamma.append(-slope)

    if not gamma:
        raise TailFitError(
            f"Sampling is too coarse for local fits of half width "
            f"{half_width:g} in ln t"
        )

    return LocalSlope(t=np.asarray(t_centers), gamma=np.asarray(gamma))


def derivative_slope(
    series: ObserverSeries,
    window: tuple[float, float],
    noise_floor: float = 1e-16,
) -> LocalSlope:
    """
    Pointwise exponent -t phi_t / phi from the recorded time derivative.
    """
    part = _tail_samples(series, window, noise_floor)
    return LocalSlope(t=part.t, gamma=-part.t * part.phi_t / part.phi)


def _extrapolated_amplitude(t: np.ndarray, scaled: np.ndarray) -> float:
    design = np.column_stack([np.ones_like(t), 1.0 / t])
    coefficients, *_ = np.linalg.lstsq(design, scaled, rcond=None)
    return float(coefficients[0])


def fit_amplitude(
    series: ObserverSeries,
    gamma: float,
    window: tuple[float, float],
    noise_floor: float = 1e-16,
) -> float:
    """
    Limit of t^gamma phi as t -> oo.

    t^gamma phi is fitted by a straight line in 1/t over the window, which
    matches the O(1/t) correction of the tail, and the intercept is
    returned. The two window halves are fitted separately as a check.

    Args:
        series (ObserverSeries): Observer series.
        gamma (float): Exponent to scale by.
        window (tuple[float, float]): Time window.
        noise_floor (float): Absolute noise level of the series.

    Returns:
        float: Extrapolated amplitude.
    """
    part = _tail_samples(series, window, noise_floor)
    scaled = part.t**gamma * part.phi

    amplitude = _extrapolated_amplitude(part.t, scaled)

    half = part.t.size // 2
    first = _extrapolated_amplitude(part.t[:half], scaled[:half])
    second = _extrapolated_amplitude(part.t[half:], scaled[half:])

    spread = abs(first - second)
    if spread > HALVES_TOLERANCE * max(abs(first), abs(second)):
        raise TailFitError(
            f"Window halves disagree on the amplitude: {first:+.4e} vs "
            f"{second:+.4e}"
        )

    return amplitude


def eps_order(
    series: ObserverSeries,
    series_half: ObserverSeries,
    window: tuple[float, float],
    tolerance: float = 0.2,
    noise_floor: float = 1e-16,
) -> float:
    """
    Power k in phi ~ eps^k from two runs at different amplitudes.

    Args:
        series (ObserverSeries): Run at eps.
        series_half (ObserverSeries): Run at a smaller amplitude, usually
            eps / 2.
        window (tuple[float, float]): Time window.
        tolerance (float): Allowed spread of k across the window.
        noise_floor (float): Absolute noise level of the series.

    Returns:
        float: Median of ln(phi_1 / phi_2) / ln(eps_1 / eps_2).
    """
    ratio_eps = series.epsilon / series_half.epsilon
    if ratio_eps <= 0 or ratio_eps == 1:
        raise TailFitError(
            f"Amplitudes {series.epsilon} and {series_half.epsilon} do not "
            "determine an order"
        )

    first = _tail_samples(series, window, noise_floor)
    second = _tail_samples(series_half, window, noise_floor)

    if first.t.shape == second.t.shape and np.allclose(first.t, second.t):
        phi_second = second.phi
    else:
        phi_second = np.interp(first.t, second.t, second.phi)

    ratio = first.phi / phi_second
    if np.any(ratio <= 0):
        raise TailFitError("Series at the two amplitudes differ in sign")

    orders = np.log(ratio) / math.log(ratio_eps)
    spread = float(np.max(orders) - np.min(orders))

    if spread > tolerance:
        raise TailFitError(
            f"Epsilon order varies by {spread:.3f} across the window "
            f"(from {np.min(orders):.3f} to {np.max(orders):.3f})"
        )

    return float(np.median(orders))


def fit_tail(
    series: ObserverSeries,
    window: tuple[float, float],
    series_half: Optional[ObserverSeries] = None,
    amplitude_gamma: Optional[float] = None,
    noise_floor: float = 1e-16,
    eps_tolerance: float = 0.2,
    radius: Optional[float] = None,
) -> FitResult:
    """
    Measures exponent, amplitude and epsilon order of one tail.

    Args:
        series (ObserverSeries): Observer series.
        window (tuple[float, float]): Time window.
        series_half (ObserverSeries | None): Run at a smaller amplitude for
            the epsilon order.
        amplitude_gamma (float | None): Exponent for the amplitude. Defaults
            to gamma_hat rounded to an integer.
        noise_floor (float): Absolute noise level of the series.
        eps_tolerance (float): Allowed spread of the epsilon order.
        radius (float | None): Support radius of the profile. When given,
            the window is checked against the tail regime first.

    Returns:
        FitResult: Measurement without a verdict.
    """
    if radius is not None:
        validate_window(window, series.r_obs, radius)

    slopes = local_slope(series, window, noise_floor)
    gamma_hat = slopes.extrapolated()

    if amplitude_gamma is None:
        amplitude_gamma = float(round(gamma_hat))

    amplitude_hat = fit_amplitude(series, amplitude_gamma, window, noise_floor)

    part = _tail_samples(series, window, noise_floor)
    ln_t = np.log(part.t)
    ln_phi = np.log(np.abs(part.phi))
    coefficients = np.polyfit(ln_t, ln_phi, 1)
    residual = float(
        np.sqrt(np.mean((np.polyval(coefficients, ln_t) - ln_phi) ** 2))
    )

    order = math.nan
    if series_half is not None:
        order = eps_order(
            series, series_half, window, eps_tolerance, noise_floor
        )

    logger.debug(
        "Fit at r=%g: gamma_hat=%.5f amplitude_hat=%.6e eps_order=%.4f",
        series.r_obs,
        gamma_hat,
        amplitude_hat,
        order,
    )

    return FitResult(
        gamma_hat=gamma_hat,
        amplitude_hat=amplitude_hat,
        eps_order_hat=order,
        window=tuple(window),
        residual=residual,
        slope_range=(float(np.min(slopes.gamma)), float(np.max(slopes.gamma))),
        amplitude_gamma=amplitude_gamma,
    )


def compare(
    prediction: TailPrediction,
    fit: FitResult,
    epsilon: float,
    tol_gamma: float = 0.02,
    tol_amp: float = 0.10,
    fast_decay_threshold: Optional[float] = None,
    tol_eps: float = 0.1,
) -> VerdictReport:
    """
    Verdict of a measured tail against its prediction.

    pass iff |gamma_hat - gamma| <= tol_gamma gamma and
    |amplitude_hat / (eps^k A) - 1| <= tol_amp for the dominant term at the
    window midpoint. A measured epsilon order has to lie within tol_eps of
    k. A degenerate prediction gives a degenerate verdict.
    When fast_decay_threshold is given (combinations without a closed
    form), the only question is whether the measured slope stays above it.

    Args:
        prediction (TailPrediction): Predicted terms.
        fit (FitResult): Measurement.
        epsilon (float): Amplitude of the measured run.
        tol_gamma (float): Relative exponent tolerance.
        tol_amp (float): Relative amplitude tolerance.
        fast_decay_threshold (float | None): Slope a Huygensian
            combination must exceed.
        tol_eps (float): Absolute tolerance on the epsilon order.

    Returns:
        VerdictReport: Verdict and diagnostics.
    """
    tolerances = {
        "tol_gamma": tol_gamma,
        "tol_amp": tol_amp,
        "tol_eps": tol_eps,
    }
    diagnostics = list(prediction.warnings)

    if fast_decay_threshold is not None:
        slowest = fit.slope_range[0]
        verdict = FAST_DECAY if slowest > fast_decay_threshold else FAIL
        diagnostics.append(
            f"smallest local slope {slowest:.3f} vs fast decay threshold "
            f"{fast_decay_threshold:g}"
        )
        return _report(verdict, fit, tolerances, diagnostics)

    midpoint = 0.5 * (fit.window[0] + fit.window[1])
    term = prediction.dominant_term(epsilon, midpoint)

    if prediction.is_degenerate or term is None or term.degenerate:
        diagnostics.append("prediction is degenerate; the integral vanishes")
        logger.warning("Degenerate prediction, no quantitative comparison")
        return _report(DEGENERATE, fit, tolerances, diagnostics, term=term)

    expected_amplitude = epsilon**term.eps_order * term.amplitude
    gamma_error = abs(fit.gamma_hat - term.gamma) / term.gamma
    amplitude_ratio = fit.amplitude_hat / expected_amplitude

    verdict = PASS

    if gamma_error > tol_gamma:
        verdict = FAIL
        diagnostics.append(
            f"gamma_hat {fit.gamma_hat:.4f} differs from {term.gamma} by "
            f"{100 * gamma_error:.2f}%"
        )

    if fit.amplitude_gamma != term.gamma:
        verdict = FAIL
        diagnostics.append(
            f"amplitude was fitted with gamma {fit.amplitude_gamma:g}, "
            f"not {term.gamma}"
        )

    if amplitude_ratio < 0:
        verdict = FAIL
        diagnostics.append(
            f"amplitude has the wrong sign: measured "
            f"{fit.amplitude_hat:+.4e}, predicted {expected_amplitude:+.4e}"
        )
    elif abs(amplitude_ratio - 1) > tol_amp:
        verdict = FAIL
        diagnostics.append(
            f"amplitude ratio {amplitude_ratio:+.4f} is outside "
            f"1 +- {tol_amp:g}"
        )

    eps_order_error = abs(fit.eps_order_hat - term.eps_order)
    if eps_order_error > tol_eps:
        verdict = FAIL
        diagnostics.append(
            f"eps_order_hat {fit.eps_order_hat:.3f} differs from "
            f"{term.eps_order} by {eps_order_error:.3f}"
        )

    logger.info(
        "Verdict %s for %s: gamma error %.3g, amplitude ratio %.4f",
        verdict,
        term.case_label,
        gamma_error,
        amplitude_ratio,
    )

    return _report(
        verdict,
        fit,
        tolerances,
        diagnostics,
        term=term,
        expected_gamma=float(term.gamma),
        expected_amplitude=expected_amplitude,
        gamma_error=gamma_error,
        amplitude_ratio=amplitude_ratio,
        eps_order_error=eps_order_error,
    )


def _report(
    verdict: str,
    fit: FitResult,
    tolerances: dict,
    diagnostics: list[str],
    **kwargs,
) -> VerdictReport:
    return VerdictReport(
        verdict=verdict,
        fit=replace(fit, verdict=verdict, tolerances=tolerances),
        diagnostics=diagnostics,
        **kwargs,
    )
