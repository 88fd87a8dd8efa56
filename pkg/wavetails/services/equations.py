import numpy as np
from scipy.integrate import trapezoid

from wavetails.models.nonlinearity import NonlinearityTerm, evaluate_terms
from wavetails.solvers.finite_differences import (
    get_first_derivative,
    get_second_derivative,
)


def get_radial_laplacian(
    phi: np.ndarray, r: np.ndarray, dr: float, l: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Radial Laplacian phi_rr + (2l+2)/r phi_r in d = 2l + 3 dimensions.

    At the origin phi_r / r tends to phi_rr, so the operator becomes
    (2l + 3) phi_rr there.

    Args:
        phi (np.ndarray): Even field on the grid.
        r (np.ndarray): Grid radii, r[0] = 0.
        dr (float): Grid spacing.
        l (int): Dimension index.

    Returns:
        tuple[np.ndarray, np.ndarray]: Laplacian and phi_r.
    """
    phi_r = get_first_derivative(phi, dr)
    phi_rr = get_second_derivative(phi, dr)

    laplacian = np.empty_like(phi)
    laplacian[0] = (2 * l + 3) * phi_rr[0]
    laplacian[1:] = phi_rr[1:] + (2 * l + 2) / r[1:] * phi_r[1:]

    return laplacian, phi_r


def get_radial_wave_derivatives(
    phi: np.ndarray,
    pi: np.ndarray,
    r: np.ndarray,
    dr: float,
    l: int,
    terms: tuple[NonlinearityTerm, ...],
) -> tuple[np.ndarray, np.ndarray]:
    """
    Right-hand side of the first order system

        phi_t = pi
        pi_t = Laplacian(phi) + sum_terms c phi^p (alpha pi + beta phi_r)^q

    with the outer boundary point frozen.

    Args:
        phi (np.ndarray): Field.
        pi (np.ndarray): Time derivative of the field.
        r (np.ndarray): Grid radii.
        dr (float): Grid spacing.
        l (int): Dimension index.
        terms (tuple[NonlinearityTerm, ...]): Nonlinearity.

    Returns:
        tuple[np.ndarray, np.ndarray]: d phi/dt and d pi/dt.
    """
    laplacian, phi_r = get_radial_laplacian(phi, r, dr, l)
    d_phi = pi.copy()
    d_pi = laplacian + evaluate_terms(terms, phi, pi, phi_r)

    d_phi[-1] = 0.0
    d_pi[-1] = 0.0

    return d_phi, d_pi


def get_radial_energy(
    phi: np.ndarray, pi: np.ndarray, r: np.ndarray, dr: float, l: int
) -> float:
    """
    Free field energy integral of (phi_t^2 + phi_r^2) r^(2l+2) dr, by the
    composite trapezoidal rule.
    """
    phi_r = get_first_derivative(phi, dr)
    density = (pi**2 + phi_r**2) * r ** (2 * l + 2)

    return float(trapezoid(density, dx=dr))
