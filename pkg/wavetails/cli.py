"""
Command line interface.

Exit codes: 0 for pass, degenerate and fast-decay verdicts, 1 for a failed
verification, 2 for configuration and model errors.
"""

import functools
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click

from wavetails import __version__
from wavetails.models.config import SimulationConfig, SimulationConfigError
from wavetails.models.dimension import DimensionError
from wavetails.models.nonlinearity import NonlinearityError
from wavetails.models.profiles import ProfileError
from wavetails.operations.observers import IsolationError
from wavetails.services.config import ConfigError, load_config
from wavetails.services.export_formats import (
    ExportFormatError,
    dumps_report,
    read_series_csv,
    write_json_report,
    write_table_csv,
)
from wavetails.services.predictions import PredictionError, predict_tail
from wavetails.services.tailfit import FAIL, TailFitError, compare, fit_tail
from wavetails.simulations.evolution import EvolutionError, RadialEvolution
from wavetails.sweeps import EvolutionSweep, get_run_directory
from wavetails.sweeps.identity import (
    IDENTITY_COLUMNS,
    get_identity_summary,
    parse_range,
    run_identity_sweep,
)
from wavetails.sweeps.verification import (
    DUHAMEL_COLUMNS,
    get_duhamel_table,
    get_fit_window,
    get_prediction_report,
    parse_points,
    verify_config,
)

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_CONFIG = 2

CONFIG_ERRORS = (
    ConfigError,
    DimensionError,
    NonlinearityError,
    ProfileError,
    SimulationConfigError,
    PredictionError,
    ExportFormatError,
)


def handle_errors(command):
    """Maps configuration errors to exit code 2 and run errors to 1."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        context = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except CONFIG_ERRORS as e:
            click.echo(f"configuration error: {e.message}", err=True)
            context.exit(EXIT_CONFIG)
        except (EvolutionError, IsolationError, TailFitError) as e:
            click.echo(f"error: {e.message}", err=True)
            context.exit(EXIT_FAIL)

    return wrapper


def parse_epsilons(
    context: click.Context, parameter: click.Parameter, value: Optional[str]
) -> Optional[tuple[float, ...]]:
    if value is None:
        return None
    try:
        return tuple(float(item) for item in value.split(",") if item.strip())
    except ValueError:
        raise click.BadParameter(f"not a comma-separated list: {value!r}")


def emit_report(report: dict, out: Optional[Path], name: str) -> None:
    click.echo(dumps_report(report))
    if out is not None:
        path = write_json_report(report, out / name)
        logger.info("Wrote %s", path)


def check_grid(config: SimulationConfig) -> None:
    """Rejects grids the evolution would refuse, before any work starts."""
    try:
        RadialEvolution(config, config.epsilons[0])
    except EvolutionError as e:
        raise ConfigError(e.message) from e


config_option = click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="TOML run configuration.",
)
out_option = click.option(
    "--out",
    envvar="WAVETAILS_OUT",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (default from WAVETAILS_OUT).",
)
threads_option = click.option(
    "--threads", default=1, show_default=True, type=click.IntRange(min=1)
)
tol_gamma_option = click.option(
    "--tol-gamma",
    type=float,
    default=None,
    help="Relative exponent tolerance.",
)
tol_amp_option = click.option(
    "--tol-amp",
    type=float,
    default=None,
    help="Relative amplitude tolerance.",
)
tol_eps_option = click.option(
    "--tol-eps",
    type=float,
    default=None,
    help="Absolute epsilon order tolerance.",
)
eps_option = click.option(
    "--eps",
    callback=parse_epsilons,
    default=None,
    help="Comma-separated amplitudes (default from the configuration).",
)


@click.group()
@click.version_option(__version__)
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Late-time tails of semilinear radial waves in odd dimensions."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@config_option
@out_option
@handle_errors
def predict(config_path: Path, out: Optional[Path]) -> None:
    """Closed-form tail prediction for every term of a configuration."""
    config = load_config(config_path)
    emit_report(get_prediction_report(config), out, "prediction.json")


@cli.command()
@click.option("--l-range", default="1:3", show_default=True)
@click.option(
    "--n-range",
    default="2:8",
    show_default=True,
    help="Offsets n - l.",
)
@click.option("--samples", default=20, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--threshold", default=1e-10, show_default=True, type=float)
@out_option
@handle_errors
def identity(
    l_range: str,
    n_range: str,
    samples: int,
    seed: int,
    threshold: float,
    out: Optional[Path],
) -> None:
    """Sweep of the light cone identity against its closed form."""
    rows = run_identity_sweep(
        parse_range(l_range), parse_range(n_range), samples, seed
    )
    summary = get_identity_summary(rows, threshold)
    metadata = {"seed": seed, "samples": samples}

    if out is not None:
        write_table_csv(
            rows, out / "identity.csv", metadata, columns=IDENTITY_COLUMNS
        )

    emit_report({"summary": summary, **metadata}, out, "identity.json")

    if not summary["passed"]:
        click.get_current_context().exit(EXIT_FAIL)


@cli.command()
@config_option
@click.option(
    "--points",
    default="25:2,50:2,100:2,200:2",
    show_default=True,
    help="Comma-separated t:r pairs.",
)
@click.option(
    "--method",
    type=click.Choice(["interchanged", "light-cone"]),
    default="interchanged",
    show_default=True,
)
@out_option
@handle_errors
def duhamel(
    config_path: Path, points: str, method: str, out: Optional[Path]
) -> None:
    """First iterate at chosen points against the first-order tail."""
    config = load_config(config_path)
    rows = get_duhamel_table(config, parse_points(points), method=method)
    metadata = {"config_hash": config.config_hash, "method": method}

    if out is None:
        for row in rows:
            click.echo(json.dumps(row))
        return

    path = write_table_csv(
        rows, out / "duhamel.csv", metadata, columns=DUHAMEL_COLUMNS
    )
    click.echo(str(path))


@cli.command()
@config_option
@eps_option
@threads_option
@out_option
@handle_errors
def evolve(
    config_path: Path,
    eps: Optional[tuple[float, ...]],
    threads: int,
    out: Optional[Path],
) -> None:
    """Evolves the configuration and writes observer series."""
    config = load_config(config_path)
    check_grid(config)
    out = Path("runs") if out is None else out

    sweep = EvolutionSweep(
        config,
        epsilons=config.epsilons if eps is None else eps,
        threads=threads,
        out=out,
    )
    sweep.run()

    for epsilon in sweep.epsilons:
        click.echo(str(get_run_directory(out, config, epsilon)))


@cli.command()
@config_option
@click.option(
    "--series",
    "series_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option(
    "--half-series",
    "half_path",
    default=None,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Series at a smaller amplitude, for the epsilon order.",
)
@click.option("--window", nargs=2, type=float, default=None)
@tol_gamma_option
@tol_amp_option
@tol_eps_option
@out_option
@handle_errors
def fit(
    config_path: Path,
    series_path: Path,
    half_path: Optional[Path],
    window: Optional[tuple[float, float]],
    tol_gamma: Optional[float],
    tol_amp: Optional[float],
    tol_eps: Optional[float],
    out: Optional[Path],
) -> None:
    """Fits a recorded series and compares it with the first term."""
    config = load_config(config_path)
    if len(config.terms) != 1:
        raise ConfigError("fit compares against exactly one [[terms]] table")

    series = read_series_csv(series_path)
    series_half = None if half_path is None else read_series_csv(half_path)

    window = window or get_fit_window(config, series, series_half)
    prediction = predict_tail(config.l, config.terms[0], config.generating)
    term = prediction.dominant_term(series.epsilon, 0.5 * sum(window))

    result = fit_tail(
        series,
        window,
        series_half=series_half,
        amplitude_gamma=None if term is None else float(term.gamma),
        noise_floor=config.fit.noise_floor,
        radius=config.generating.radius,
    )
    report = compare(
        prediction,
        result,
        series.epsilon,
        tol_gamma=config.fit.tol_gamma if tol_gamma is None else tol_gamma,
        tol_amp=config.fit.tol_amp if tol_amp is None else tol_amp,
        tol_eps=config.fit.tol_eps if tol_eps is None else tol_eps,
    )

    emit_report(
        {"config_hash": config.config_hash, **report.to_dict()},
        out,
        "fit.json",
    )

    if report.verdict == FAIL:
        click.get_current_context().exit(EXIT_FAIL)


@cli.command()
@config_option
@eps_option
@threads_option
@tol_gamma_option
@tol_amp_option
@tol_eps_option
@out_option
@handle_errors
def verify(
    config_path: Path,
    eps: Optional[tuple[float, ...]],
    threads: int,
    tol_gamma: Optional[float],
    tol_amp: Optional[float],
    tol_eps: Optional[float],
    out: Optional[Path],
) -> None:
    """Predict, evolve, isolate, fit and compare in one run."""
    config = load_config(config_path)
    if eps is not None:
        config = replace(config, epsilons=eps)
    check_grid(config)

    report = verify_config(
        config,
        threads=threads,
        out=out,
        tol_gamma=tol_gamma,
        tol_amp=tol_amp,
        tol_eps=tol_eps,
    )
    emit_report(report, out, "report.json")

    if report["verdict"] == FAIL:
        click.get_current_context().exit(EXIT_FAIL)
