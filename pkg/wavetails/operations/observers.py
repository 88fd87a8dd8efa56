from dataclasses import dataclass, field, replace

import numpy as np

from wavetails.operations import Operation
from wavetails.services.decorators import validate_assertions
from wavetails.services.equations import get_radial_energy
from wavetails.solvers.finite_differences import (
    get_interpolation_stencil,
    interpolate,
)

PARITIES = ("odd", "even")
CADENCE_TOLERANCE = 1e-6


class ObserverSeriesError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


class IsolationError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True, eq=False)
class ObserverSeries:
    """
    Time series recorded at a fixed radius.

    Attributes:
        r_obs (float): Observer radius.
        t (np.ndarray): Sample times, strictly increasing, uniform cadence.
        phi (np.ndarray): Field.
        phi_t (np.ndarray): Time derivative of the field.
        epsilon (float): Data amplitude of the run.
        config_hash (str): Hash of the configuration that produced it.
        parity (str | None): "odd" or "even" after isolation.
        metadata (dict): Free-form descriptors (l, terms) for export.
    """

    r_obs: float
    t: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    phi_t: np.ndarray = field(repr=False)
    epsilon: float = 0.0
    config_hash: str = ""
    parity: str | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for name in ("t", "phi", "phi_t"):
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=float)
            )
        self.validate()

    @validate_assertions(exception=ObserverSeriesError)
    def validate(self) -> None:
        assert self.r_obs > 0, "Observer radius must be positive"
        assert (
            self.t.shape == self.phi.shape == self.phi_t.shape
        ), "Series columns must have equal length"
        assert np.all(np.diff(self.t) > 0), "Times must increase"
        if self.t.size >= 3:
            steps = np.diff(self.t)
            assert np.allclose(
                steps, steps.mean(), rtol=CADENCE_TOLERANCE, atol=0
            ), "Times must have a uniform cadence"

    def window(self, t_lo: float, t_hi: float) -> "ObserverSeries":
        mask = (self.t >= t_lo) & (self.t <= t_hi)
        return replace(
            self, t=self.t[mask], phi=self.phi[mask], phi_t=self.phi_t[mask]
        )

    def subsampled(self, stride: int) -> "ObserverSeries":
        return replace(
            self,
            t=self.t[::stride],
            phi=self.phi[::stride],
            phi_t=self.phi_t[::stride],
        )


def order_isolate(
    series_plus: ObserverSeries,
    series_minus: ObserverSeries,
    parity: str,
) -> ObserverSeries:
    """
    Separates odd and even powers of epsilon from runs at +eps and -eps.

    odd: (phi(eps) - phi(-eps)) / 2 keeps eps, eps^3, ...
    even: (phi(eps) + phi(-eps)) / 2 keeps eps^2, eps^4, ...

    Args:
        series_plus (ObserverSeries): Run at +eps.
        series_minus (ObserverSeries): Run at -eps, same configuration.
        parity (str): "odd" or "even".

    Returns:
        ObserverSeries: The isolated series, tagged with its parity.
    """
    if parity not in PARITIES:
        raise IsolationError(f"Unknown parity {parity!r}")

    if series_plus.config_hash != series_minus.config_hash:
        raise IsolationError("Series come from different configurations")

    if series_plus.r_obs != series_minus.r_obs:
        raise IsolationError("Series come from different observers")

    if series_plus.t.shape != series_minus.t.shape or not np.array_equal(
        series_plus.t, series_minus.t
    ):
        raise IsolationError("Series are sampled at different times")

    if not np.isclose(
        series_plus.epsilon, -series_minus.epsilon, rtol=1e-12, atol=0
    ):
        raise IsolationError(
            f"Amplitudes {series_plus.epsilon} and {series_minus.epsilon} "
            "are not opposite"
        )

    sign = -1.0 if parity == "odd" else 1.0

    return replace(
        series_plus,
        phi=0.5 * (series_plus.phi + sign * series_minus.phi),
        phi_t=0.5 * (series_plus.phi_t + sign * series_minus.phi_t),
        parity=parity,
    )


def subtract_free(
    series: ObserverSeries, free_series: ObserverSeries
) -> ObserverSeries:
    """
    Removes the linear part eps phi_0 from a series by subtracting the
    free evolution of the same data at the same amplitude.

    The discrete free wave is not exactly Huygensian: its truncation error
    leaves a small wake behind the pulse which would otherwise sit on top
    of the nonlinear tail.

    Args:
        series (ObserverSeries): Nonlinear run, possibly parity isolated.
        free_series (ObserverSeries): Free run at the same amplitude.

    Returns:
        ObserverSeries: The difference, keeping the tags of series.
    """
    if series.r_obs != free_series.r_obs:
        raise IsolationError("Series come from different observers")

    if series.t.shape != free_series.t.shape or not np.array_equal(
        series.t, free_series.t
    ):
        raise IsolationError("Series are sampled at different times")

    if not np.isclose(
        series.epsilon, free_series.epsilon, rtol=1e-12, atol=0
    ):
        raise IsolationError(
            f"Free run at eps = {free_series.epsilon} does not match "
            f"eps = {series.epsilon}"
        )

    return replace(
        series,
        phi=series.phi - free_series.phi,
        phi_t=series.phi_t - free_series.phi_t,
    )


class ObserverOperation(Operation):
    """
    Records phi and phi_t at one radius by 4th order interpolation.
    """

    def __init__(
        self, r_obs: float, dr: float, point_count: int
    ) -> None:
        self.r_obs = r_obs
        self.indices, self.weights = get_interpolation_stencil(
            r_obs, dr, point_count
        )
        self._t = []
        self._phi = []
        self._phi_t = []

    def iterate(self, t: float, phi: np.ndarray, pi: np.ndarray) -> None:
        self._t.append(t)
        self._phi.append(interpolate(phi, self.indices, self.weights))
        self._phi_t.append(interpolate(pi, self.indices, self.weights))

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self._t)

    @property
    def phi(self) -> np.ndarray:
        return np.asarray(self._phi)

    @property
    def phi_t(self) -> np.ndarray:
        return np.asarray(self._phi_t)

    def to_series(
        self, epsilon: float, config_hash: str, metadata: dict | None = None
    ) -> ObserverSeries:
        return ObserverSeries(
            r_obs=self.r_obs,
            t=self.t,
            phi=self.phi,
            phi_t=self.phi_t,
            epsilon=epsilon,
            config_hash=config_hash,
            metadata=dict(metadata or {}),
        )

    def print_results(self) -> None:
        phi = np.abs(self.phi)
        print(f"\nOBSERVER AT r = {self.r_obs:.4f}")
        print(f" Samples: {len(self._t)}")
        if len(self._t):
            peak = int(np.argmax(phi))
            print(f" Peak |phi|: {phi[peak]:.6e} at t = {self._t[peak]:.4f}")
            print(f" Final phi: {self._phi[-1]:+.6e}")


class EnergyOperation(Operation):
    """
    Records the free field energy of the grid state.
    """

    def __init__(self, r: np.ndarray, dr: float, l: int) -> None:
        self.r = r
        self.dr = dr
        self.l = l
        self._t = []
        self._energy = []

    def iterate(self, t: float, phi: np.ndarray, pi: np.ndarray) -> None:
        self._t.append(t)
        self._energy.append(
            get_radial_energy(phi, pi, self.r, self.dr, self.l)
        )

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self._t)

    @property
    def energy(self) -> np.ndarray:
        return np.asarray(self._energy)

    def get_relative_drift(self) -> float:
        energy = self.energy
        if energy.size == 0 or energy[0] == 0:
            return 0.0
        return float(np.max(np.abs(energy - energy[0])) / energy[0])

    def print_results(self) -> None:
        print("\nENERGY")
        if self._energy:
            print(f" Initial: {self._energy[0]:.10e}")
            print(f" Final: {self._energy[-1]:.10e}")
            print(f" Max relative drift: {self.get_relative_drift():.3e}")
