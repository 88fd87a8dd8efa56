import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from wavetails.models.dimension import DimensionIndex
from wavetails.models.nonlinearity import NonlinearityTerm
from wavetails.models.profiles import GeneratingFunction
from wavetails.services.decorators import validate_assertions
from wavetails.simulations import SimulationParameters

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
LARGE_EPSILON = 0.3
ISOLATION_MODES = ("odd", "even", "none")
# RK4 with 4th order centered differences; the (2l+2)/r term near the
# origin tightens the usual wave equation limit
MAX_STABLE_CFL = 0.5


class SimulationConfigError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class GridConfig(SimulationParameters):
    """
    Uniform radial grid r_i = i * dr on [0, r_out].

    Attributes:
        dr (float): Radial spacing.
        r_out (float): Outer boundary, where the field is held at zero.
        t_max (float): Final time.
        cfl (float): Time step ratio, dt = cfl * dr.
        fd_order (int): Order of the spatial stencils. Only 4 is available.
    """

    dr: float
    r_out: float
    t_max: float
    cfl: float = 0.25
    fd_order: int = 4

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=SimulationConfigError)
    def validate(self) -> None:
        assert self.dr > 0, f"dr must be positive, got {self.dr}"
        assert self.r_out > 0, f"r_out must be positive, got {self.r_out}"
        assert self.t_max > 0, f"t_max must be positive, got {self.t_max}"
        assert self.cfl > 0, f"cfl must be positive, got {self.cfl}"
        assert self.cfl <= MAX_STABLE_CFL, (
            f"cfl = {self.cfl} exceeds the stable limit {MAX_STABLE_CFL}"
        )
        assert self.fd_order == 4, "Only fourth order stencils are available"
        assert (
            self.r_out / self.dr >= 8
        ), "The grid needs at least 8 intervals"

    @property
    def d_t(self) -> float:
        return self.cfl * self.dr

    @property
    def point_count(self) -> int:
        return int(round(self.r_out / self.dr)) + 1

    @property
    def radii(self) -> np.ndarray:
        return self.dr * np.arange(self.point_count)


@dataclass(frozen=True)
class FitSettings:
    """
    Attributes:
        tol_gamma (float): Relative tolerance on the decay exponent.
        tol_amp (float): Relative tolerance on the amplitude.
        tol_eps (float): Absolute tolerance on the measured epsilon order.
        noise_floor (float): Absolute level below which samples are noise.
        window (tuple[float, float] | None): Fit window, default chosen from
            the observer radius and the final time.
    """

    tol_gamma: float = 0.02
    tol_amp: float = 0.10
    tol_eps: float = 0.1
    noise_floor: float = 1e-16
    window: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.window is not None:
            object.__setattr__(self, "window", tuple(self.window))
        self.validate()

    @validate_assertions(exception=SimulationConfigError)
    def validate(self) -> None:
        assert self.tol_gamma > 0, "tol_gamma must be positive"
        assert self.tol_amp > 0, "tol_amp must be positive"
        assert self.tol_eps > 0, "tol_eps must be positive"
        assert self.noise_floor >= 0, "noise_floor must be nonnegative"
        if self.window is not None:
            assert len(self.window) == 2, "window needs two bounds"
            assert (
                0 < self.window[0] < self.window[1]
            ), f"Invalid fit window {self.window}"


@dataclass(frozen=True)
class SimulationConfig:
    """
    Everything one verification run depends on.

    Attributes:
        dimension (DimensionIndex): Spatial dimension d = 2l + 3.
        terms (tuple[NonlinearityTerm, ...]): Right-hand side monomials.
            Empty for free evolution.
        generating (GeneratingFunction): Profile a(x) of the free data.
        grid (GridConfig): Evolution grid.
        epsilons (tuple[float, ...]): Data amplitudes.
        observers (tuple[float, ...]): Observer radii.
        isolate (str): Parity isolation, "odd", "even" or "none".
        fit (FitSettings): Tail fit settings.
    """

    dimension: DimensionIndex
    terms: tuple[NonlinearityTerm, ...]
    generating: GeneratingFunction
    grid: GridConfig
    epsilons: tuple[float, ...] = (0.05,)
    observers: tuple[float, ...] = (2.0,)
    isolate: str = "odd"
    fit: FitSettings = field(default_factory=FitSettings)

    def __post_init__(self) -> None:
        for name in ("terms", "epsilons", "observers"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

        for epsilon in self.epsilons:
            if abs(epsilon) > LARGE_EPSILON:
                logger.warning(
                    "epsilon = %g is not small; the perturbative "
                    "predictions may not apply",
                    epsilon,
                )

    @validate_assertions(exception=SimulationConfigError)
    def validate(self) -> None:
        assert self.epsilons, "At least one epsilon is required"
        assert self.observers, "At least one observer radius is required"
        assert all(
            0 < r < self.grid.r_out for r in self.observers
        ), f"Observer radii must lie inside (0, r_out): {self.observers}"
        assert (
            self.isolate in ISOLATION_MODES
        ), f"isolate must be one of {ISOLATION_MODES}, got {self.isolate!r}"
        self.generating.validate_for_dimension(self.dimension.l)

    @property
    def l(self) -> int:
        return self.dimension.l

    def to_dict(self) -> dict:
        data = asdict(self)
        data["schema_version"] = SCHEMA_VERSION
        return data

    @property
    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the configuration."""
        canonical = json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_terms(self, terms) -> "SimulationConfig":
        return replace(self, terms=tuple(terms))
