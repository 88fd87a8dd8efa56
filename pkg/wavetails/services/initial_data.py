import numpy as np

from wavetails.models.config import SimulationConfig
from wavetails.models.dimension import get_dimension_index
from wavetails.models.profiles import GeneratingFunction
from wavetails.services.freewave import evaluate_free_wave


class InitialDataError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


def initial_data(
    a: GeneratingFunction, l: int, r: float | np.ndarray
) -> tuple[float | np.ndarray, float | np.ndarray]:
    """
    Cauchy data (f, g) = (phi0, d phi0/dt) at t = 0 of the full free wave.

    The value at r = 0 is the exact limit, taken from the Taylor expansion
    of the free wave rather than from the singular closed form.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        r (float | np.ndarray): Radius (radii), nonnegative.

    Returns:
        tuple: f(r) and g(r).
    """
    l = get_dimension_index(l)
    radii = np.asarray(r, dtype=float)

    if np.any(radii < 0):
        raise InitialDataError("Initial data need nonnegative radii")

    f, g, _ = evaluate_free_wave(a, l, 0.0, radii, part="both")

    if radii.ndim == 0:
        return float(f), float(g)

    return f, g


def get_initial_state(
    config: SimulationConfig, epsilon: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Scaled data on the evolution grid, with the outer boundary point held at
    zero.

    Args:
        config (SimulationConfig): Run configuration.
        epsilon (float): Amplitude.

    Returns:
        tuple[np.ndarray, np.ndarray]: phi and phi_t on the grid.
    """
    f, g = initial_data(config.generating, config.l, config.grid.radii)
    phi = epsilon * f
    pi = epsilon * g
    phi[-1] = 0.0
    pi[-1] = 0.0

    return phi, pi
