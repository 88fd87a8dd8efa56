import logging
import math

import numpy as np

from wavetails.models.config import GridConfig, SimulationConfig
from wavetails.operations.observers import (
    EnergyOperation,
    ObserverOperation,
    ObserverSeries,
)
from wavetails.services.decorators import timing
from wavetails.services.equations import get_radial_wave_derivatives
from wavetails.services.initial_data import get_initial_state
from wavetails.simulations import Simulation
from wavetails.solvers.odes import rk4th_ode_solver

logger = logging.getLogger(__name__)

FINITE_CHECK_INTERVAL = 64


class EvolutionError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


class RadialEvolution(Simulation):
    """
    Method-of-lines evolution of the radial semilinear wave equation

        phi_tt = Laplacian(phi) + sum c phi^p (alpha phi_t + beta phi_r)^q

    on a uniform grid with a frozen zero outer boundary. The outer boundary
    must be causally disconnected from the observers up to t_max.

    Attributes:
        config (SimulationConfig): Run configuration.
        epsilon (float): Data amplitude.
        params (GridConfig): The grid, from the configuration.
        observers (list[ObserverOperation]): One per observer radius.
        energy (EnergyOperation | None): Energy record if requested.
    """

    def __init__(
        self,
        config: SimulationConfig,
        epsilon: float,
        record_energy: bool = False,
        energy_interval: int = 16,
    ) -> None:
        super().__init__(params=config.grid)
        self.config = config
        self.epsilon = epsilon
        self.record_energy = record_energy
        self.energy_interval = energy_interval
        self.observers: list[ObserverOperation] = []
        self.energy: EnergyOperation | None = None

        self.validate()

    def validate(self) -> None:
        grid: GridConfig = self.params

        required = (
            max(self.config.observers)
            + grid.t_max
            + self.config.generating.radius
        )
        if grid.r_out < required:
            raise EvolutionError(
                f"r_out = {grid.r_out} is not causally clean; observers "
                f"need r_out >= {required:.6g} up to t_max = {grid.t_max}"
            )

    @property
    def step_count(self) -> int:
        return int(math.ceil(self.params.t_max / self.params.d_t - 1e-9))

    @timing
    def run(self) -> list[ObserverOperation]:
        """
        Runs the evolution, sampling every observer at every step.

        Returns:
            list[ObserverOperation]: The observer records.
        """
        grid: GridConfig = self.params
        l = self.config.l
        r = grid.radii
        d_t = grid.d_t

        phi, pi = get_initial_state(self.config, self.epsilon)
        compensation = {"phi": np.zeros_like(phi), "pi": np.zeros_like(pi)}

        self.observers = [
            ObserverOperation(r_obs, grid.dr, grid.point_count)
            for r_obs in self.config.observers
        ]
        self.energy = (
            EnergyOperation(r, grid.dr, l) if self.record_energy else None
        )

        logger.info(
            "Evolving l=%d, eps=%g on %d points for %d steps",
            l,
            self.epsilon,
            grid.point_count,
            self.step_count,
        )

        self._record(0, 0.0, phi, pi)

        for step in range(1, self.step_count + 1):
            phi, pi = rk4th_ode_solver(
                {"phi": phi, "pi": pi},
                get_radial_wave_derivatives,
                d_t,
                compensation=compensation,
                r=r,
                dr=grid.dr,
                l=l,
                terms=self.config.terms,
            )
            t = step * d_t

            if step % FINITE_CHECK_INTERVAL == 0 or step == self.step_count:
                self._check_finite(step, t, phi, pi)

            self._record(step, t, phi, pi)

        logger.info("Evolution finished at t=%g", self.step_count * d_t)

        return self.observers

    def _record(
        self, step: int, t: float, phi: np.ndarray, pi: np.ndarray
    ) -> None:
        for observer in self.observers:
            observer.iterate(t, phi, pi)

        if self.energy is not None and step % self.energy_interval == 0:
            self.energy.iterate(t, phi, pi)

    def _check_finite(
        self, step: int, t: float, phi: np.ndarray, pi: np.ndarray
    ) -> None:
        if np.all(np.isfinite(phi)) and np.all(np.isfinite(pi)):
            return

        finite = phi[np.isfinite(phi)]
        peak = float(np.max(np.abs(finite))) if finite.size else math.nan
        message = (
            f"Non-finite field at step {step} (t = {t:.6g}); max finite "
            f"|phi| = {peak:.6e}. epsilon = {self.epsilon} is likely too "
            "large"
        )
        logger.error(message)
        raise EvolutionError(message)

    def get_series(self) -> list[ObserverSeries]:
        metadata = {
            "l": self.config.l,
            "terms": [term.describe() for term in self.config.terms],
        }
        return [
            observer.to_series(
                self.epsilon, self.config.config_hash, metadata
            )
            for observer in self.observers
        ]

    def print_results(self) -> None:
        print("\nRADIAL EVOLUTION RESULTS")
        print(f" l = {self.config.l}, epsilon = {self.epsilon}")
        for observer in self.observers:
            observer.print_results()
        if self.energy is not None:
            self.energy.print_results()


def evolve(config: SimulationConfig, epsilon: float) -> list[ObserverSeries]:
    """
    Evolves the data epsilon * (f, g) and returns one series per observer.

    Args:
        config (SimulationConfig): Run configuration.
        epsilon (float): Data amplitude.

    Returns:
        list[ObserverSeries]: Observer series in configuration order.
    """
    simulation = RadialEvolution(config, epsilon)
    simulation.run()
    return simulation.get_series()
