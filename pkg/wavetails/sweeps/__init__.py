import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Optional

from wavetails.models.config import SimulationConfig
from wavetails.operations.observers import ObserverSeries
from wavetails.services.decorators import timing
from wavetails.services.export_formats import write_series_csv
from wavetails.simulations.evolution import evolve

logger = logging.getLogger(__name__)


def get_verification_epsilons(config: SimulationConfig) -> list[float]:
    """
    Amplitudes a verification needs: each eps and eps / 2, with their
    negatives when the run isolates a parity.

    Returns:
        list[float]: Sorted distinct amplitudes.
    """
    amplitudes = set()

    for epsilon in config.epsilons:
        for value in (epsilon, 0.5 * epsilon):
            amplitudes.add(value)
            if config.isolate != "none":
                amplitudes.add(-value)

    return sorted(amplitudes)


def get_run_directory(
    out: str | Path, config: SimulationConfig, epsilon: float
) -> Path:
    return Path(out) / config.config_hash[:12] / f"eps_{epsilon:+.6g}"


def _run_evolution(
    config: SimulationConfig, epsilon: float
) -> list[ObserverSeries]:
    return evolve(config, epsilon)


class EvolutionSweep:
    """
    Independent evolutions of one configuration at several amplitudes.

    Runs execute in a bounded process pool and share no state. Results are
    keyed by amplitude and do not depend on completion order.

    Attributes:
        config (SimulationConfig): Configuration shared by the runs.
        epsilons (list[float]): Amplitudes to evolve.
        threads (int): Worker count; 1 runs in the calling process.
        out (Path | None): Artifact root; each run writes its observer
            series to <out>/<hash[:12]>/eps_<value>/.
        results (dict[float, list[ObserverSeries]]): Filled by run.
    """

    def __init__(
        self,
        config: SimulationConfig,
        epsilons: Optional[Iterable[float]] = None,
        threads: int = 1,
        out: Optional[str | Path] = None,
    ) -> None:
        self.config = config
        self.epsilons = (
            get_verification_epsilons(config)
            if epsilons is None
            else list(epsilons)
        )
        self.threads = max(1, int(threads))
        self.out = None if out is None else Path(out)
        self.results: dict[float, list[ObserverSeries]] = {}

    @timing
    def run(self) -> dict[float, list[ObserverSeries]]:
        logger.info(
            "Sweeping %d amplitude(s) with %d worker(s)",
            len(self.epsilons),
            self.threads,
        )

        if self.threads == 1 or len(self.epsilons) == 1:
            outputs = [
                _run_evolution(self.config, epsilon)
                for epsilon in self.epsilons
            ]
        else:
            with ProcessPoolExecutor(max_workers=self.threads) as executor:
                futures = [
                    executor.submit(_run_evolution, self.config, epsilon)
                    for epsilon in self.epsilons
                ]
                outputs = [future.result() for future in futures]

        self.results = dict(zip(self.epsilons, outputs))

        if self.out is not None:
            self.write()

        return self.results

    def write(self) -> list[Path]:
        paths = []

        for epsilon, series_list in self.results.items():
            directory = get_run_directory(self.out, self.config, epsilon)
            for series in series_list:
                paths.append(
                    write_series_csv(
                        series, directory / f"r_{series.r_obs:g}.csv"
                    )
                )

        return paths

    def get_series(self, epsilon: float, r_obs: float) -> ObserverSeries:
        for series in self.results[epsilon]:
            if series.r_obs == r_obs:
                return series
        raise KeyError(f"No observer at r = {r_obs} for eps = {epsilon}")

    def print_results(self) -> None:
        print("\nEVOLUTION SWEEP")
        print(f" config hash: {self.config.config_hash[:12]}")
        for epsilon, series_list in self.results.items():
            radii = ", ".join(f"{series.r_obs:g}" for series in series_list)
            print(f" eps = {epsilon:+g}: observers at r = {radii}")
