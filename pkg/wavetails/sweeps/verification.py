"""
End-to-end checks of a configuration: predict, evolve, isolate, fit and
compare, plus the tabulated Duhamel iterate against its predicted tail.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, Optional

from wavetails.models.config import SimulationConfig
from wavetails.operations.observers import (
    ObserverSeries,
    order_isolate,
    subtract_free,
)
from wavetails.services.duhamel import DuhamelError
from wavetails.services.factories import get_iterate_integrator_class
from wavetails.services.math.quadrature import QuadratureError
from wavetails.services.predictions import TailPrediction, predict_tail
from wavetails.services.tailfit import (
    DEGENERATE,
    FAIL,
    FAST_DECAY,
    PASS,
    TailFitError,
    compare,
    default_window,
    fit_tail,
    trim_window,
)
from wavetails.sweeps import EvolutionSweep

logger = logging.getLogger(__name__)

DUHAMEL_COLUMNS = (
    "t",
    "r",
    "term",
    "value",
    "magnitude",
    "predicted",
    "ratio",
    "error",
)

# worst verdict first
VERDICT_PRECEDENCE = (FAIL, FAST_DECAY, DEGENERATE, PASS)


def predict_config(config: SimulationConfig) -> list[TailPrediction]:
    """One prediction per term of the configuration, in order."""
    return [
        predict_tail(config.l, term, config.generating)
        for term in config.terms
    ]


def get_prediction_report(
    config: SimulationConfig,
    predictions: Optional[list[TailPrediction]] = None,
) -> dict:
    if predictions is None:
        predictions = predict_config(config)
    return {
        "config_hash": config.config_hash,
        "l": config.l,
        "predictions": [
            {"term": term.describe(), **prediction.to_dict()}
            for term, prediction in zip(config.terms, predictions)
        ],
    }


def get_fast_decay_threshold(
    config: SimulationConfig, predictions: list[TailPrediction]
) -> Optional[float]:
    """
    Slope a configuration without a closed-form tail has to exceed.

    Single terms are compared quantitatively and get None. Combinations of
    terms and free evolution have to decay faster than any of the single
    term tails, and at least faster than t^-(3l+2).
    """
    if len(config.terms) == 1:
        return None

    gammas = [
        term.gamma for prediction in predictions for term in prediction.terms
    ]
    return float(max([3 * config.l + 1, *gammas]) + 1)


def get_worst_verdict(verdicts: Iterable[str]) -> str:
    verdicts = list(verdicts)
    for verdict in VERDICT_PRECEDENCE:
        if verdict in verdicts:
            return verdict
    return PASS


def _isolated(
    sweep: EvolutionSweep,
    free_sweep: Optional[EvolutionSweep],
    epsilon: float,
    r_obs: float,
    isolate: str,
) -> ObserverSeries:
    series = sweep.get_series(epsilon, r_obs)
    if isolate != "none":
        series = order_isolate(
            series, sweep.get_series(-epsilon, r_obs), isolate
        )
    if free_sweep is not None:
        series = subtract_free(series, free_sweep.get_series(epsilon, r_obs))
    return series


def get_fit_window(
    config: SimulationConfig,
    series: ObserverSeries,
    series_half: Optional[ObserverSeries] = None,
) -> tuple[float, float]:
    """
    Configured fit window, or the default one ended where either run
    nears the noise floor.
    """
    if config.fit.window is not None:
        return config.fit.window

    window = default_window(
        series.r_obs, config.generating.radius, config.grid.t_max
    )
    runs = [series] if series_half is None else [series, series_half]
    return trim_window(window, runs, config.fit.noise_floor)


def verify_observer(
    config: SimulationConfig,
    prediction: TailPrediction,
    series: ObserverSeries,
    series_half: ObserverSeries,
    epsilon: float,
    tol_gamma: float,
    tol_amp: float,
    fast_decay_threshold: Optional[float] = None,
    tol_eps: float = 0.1,
) -> dict:
    """
    Fits one observer series and compares it against the prediction.

    A series without a measurable tail fails, unless the prediction says
    there is none to measure: degenerate predictions report degenerate
    and combinations report fast_decay.

    Returns:
        dict: Report entry with the verdict.
    """
    entry = {"r_obs": series.r_obs, "epsilon": epsilon}

    try:
        window = get_fit_window(config, series, series_half)
        term = prediction.dominant_term(epsilon, 0.5 * sum(window))
        fit = fit_tail(
            series,
            window,
            series_half=series_half,
            amplitude_gamma=None if term is None else float(term.gamma),
            noise_floor=config.fit.noise_floor,
            radius=config.generating.radius,
        )
    except TailFitError as e:
        if fast_decay_threshold is not None:
            verdict = FAST_DECAY
            message = (
                f"no resolvable tail above the noise floor: {e.message}"
            )
        elif prediction.is_degenerate:
            verdict = DEGENERATE
            message = f"no resolvable tail, as predicted: {e.message}"
        else:
            verdict = FAIL
            message = e.message
        logger.warning("Fit at r=%g: %s", series.r_obs, message)
        diagnostics = [*prediction.warnings, message]
        return {**entry, "verdict": verdict, "diagnostics": diagnostics}

    report = compare(
        prediction,
        fit,
        epsilon,
        tol_gamma=tol_gamma,
        tol_amp=tol_amp,
        fast_decay_threshold=fast_decay_threshold,
        tol_eps=tol_eps,
    )
    return {**entry, **report.to_dict()}


def get_free_sweep(
    config: SimulationConfig,
    threads: int = 1,
    out: Optional[str | Path] = None,
) -> Optional[EvolutionSweep]:
    """
    Free evolutions at the positive amplitudes of a verification, or None
    when the isolated series carries no linear part.
    """
    if not config.terms or config.isolate == "even":
        return None

    epsilons = sorted(
        {value for e in config.epsilons for value in (e, 0.5 * e)}
    )
    return EvolutionSweep(
        config.with_terms(()), epsilons=epsilons, threads=threads, out=out
    )


def verify_config(
    config: SimulationConfig,
    threads: int = 1,
    out: Optional[str | Path] = None,
    tol_gamma: Optional[float] = None,
    tol_amp: Optional[float] = None,
    tol_eps: Optional[float] = None,
) -> dict:
    """
    Runs the full verification of a configuration.

    Evolves at +-eps and +-eps/2 (only the positive amplitudes when no
    parity is isolated), isolates the requested parity, subtracts the
    free evolution of the same data, fits every observer and compares
    against the dominant predicted term of that parity.

    Args:
        config (SimulationConfig): Configuration.
        threads (int): Worker count of the evolution sweep.
        out (str | Path | None): Directory for the observer series.
        tol_gamma (float | None): Overrides the configured exponent
            tolerance.
        tol_amp (float | None): Overrides the configured amplitude
            tolerance.
        tol_eps (float | None): Overrides the configured epsilon order
            tolerance.

    Returns:
        dict: Report with an overall verdict.
    """
    tol_gamma = config.fit.tol_gamma if tol_gamma is None else tol_gamma
    tol_amp = config.fit.tol_amp if tol_amp is None else tol_amp
    tol_eps = config.fit.tol_eps if tol_eps is None else tol_eps

    predictions = predict_config(config)
    threshold = get_fast_decay_threshold(config, predictions)
    prediction = (
        predictions[0].restricted(config.isolate)
        if threshold is None
        else TailPrediction()
    )

    sweep = EvolutionSweep(config, threads=threads, out=out)
    sweep.run()

    free_sweep = get_free_sweep(config, threads=threads, out=out)
    if free_sweep is not None:
        free_sweep.run()

    observers = []
    for epsilon in config.epsilons:
        for r_obs in config.observers:
            series, series_half = (
                _isolated(sweep, free_sweep, value, r_obs, config.isolate)
                for value in (epsilon, 0.5 * epsilon)
            )
            observers.append(
                verify_observer(
                    config,
                    prediction,
                    series,
                    series_half,
                    epsilon,
                    tol_gamma,
                    tol_amp,
                    fast_decay_threshold=threshold,
                    tol_eps=tol_eps,
                )
            )

    verdict = get_worst_verdict(entry["verdict"] for entry in observers)
    logger.info("Verification verdict: %s", verdict)

    return {
        **get_prediction_report(config, predictions),
        "config": config.to_dict(),
        "isolate": config.isolate,
        "free_subtracted": free_sweep is not None,
        "fast_decay_threshold": threshold,
        "observers": observers,
        "verdict": verdict,
    }


def parse_points(text: str) -> list[tuple[float, float]]:
    """Parses "t:r,t:r,..." into (t, r) pairs."""
    points = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        t, _, r = item.partition(":")
        points.append((float(t), float(r)))
    return points


def get_duhamel_table(
    config: SimulationConfig,
    points: Iterable[tuple[float, float]],
    method: str = "interchanged",
    rel_tol: float = 1e-9,
) -> list[dict]:
    """
    First iterate of every term at the given points, against the
    first-order predicted tail.

    Points where the iterate cannot be evaluated produce a row with an
    error message instead of aborting the table.

    Args:
        config (SimulationConfig): Configuration.
        points (Iterable[tuple[float, float]]): (t, r) pairs.
        method (str): Quadrature ordering, see get_iterate_integrator_class.
        rel_tol (float): Tolerance of each iterate.

    Returns:
        list[dict]: Rows keyed by DUHAMEL_COLUMNS.
    """
    integrator_class = get_iterate_integrator_class(method)
    points = list(points)
    rows = []

    for term, prediction in zip(config.terms, predict_config(config)):
        integrator = integrator_class(
            config.generating, config.l, term, rel_tol=rel_tol
        )
        first_order = [
            tail_term
            for tail_term in prediction.terms
            if tail_term.eps_order == term.order
        ]

        for t, r in points:
            predicted = sum(
                tail_term.evaluate(1.0, t) for tail_term in first_order
            )
            row = {
                "t": t,
                "r": r,
                "term": term.describe(),
                "value": math.nan,
                "magnitude": math.nan,
                "predicted": predicted,
                "ratio": math.nan,
                "error": "",
            }

            try:
                value = integrator.evaluate(t, r)
            except (DuhamelError, QuadratureError) as e:
                row["error"] = e.message
                rows.append(row)
                continue

            row["value"] = value.value
            row["magnitude"] = value.magnitude
            if predicted != 0:
                row["ratio"] = value.value / predicted
            rows.append(row)

    return rows
