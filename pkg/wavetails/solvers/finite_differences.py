"""
Fourth-order centered stencils on the radial grid r_i = i * dr.

Ghost points come from parity at the origin (even fields: f(-r) = f(r))
and from the frozen zero boundary at r_out.
"""

import numpy as np

GHOST_POINTS = 2


def pad_radial(values: np.ndarray) -> np.ndarray:
    """
    Appends two ghost points on each side: mirrored at the origin, zero
    beyond the outer boundary.
    """
    return np.pad(
        np.pad(values, (GHOST_POINTS, 0), mode="reflect"),
        (0, GHOST_POINTS),
        mode="constant",
    )


def get_first_derivative(values: np.ndarray, dr: float) -> np.ndarray:
    """
    d/dr of an even field. Exactly zero at the origin by symmetry.

    Args:
        values (np.ndarray): Field on the grid.
        dr (float): Grid spacing.

    Returns:
        np.ndarray: Derivative on the grid.
    """
    f = pad_radial(values)
    return (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * dr)


def get_second_derivative(values: np.ndarray, dr: float) -> np.ndarray:
    """
    d^2/dr^2 of an even field.

    Args:
        values (np.ndarray): Field on the grid.
        dr (float): Grid spacing.

    Returns:
        np.ndarray: Second derivative on the grid.
    """
    f = pad_radial(values)
    return (
        -f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]
    ) / (12 * dr**2)


def get_lagrange_weights(offsets: np.ndarray, x: float) -> np.ndarray:
    """
    Lagrange interpolation weights at x for nodes at the given offsets
    (in units of the grid spacing).
    """
    offsets = np.asarray(offsets, dtype=float)
    weights = np.ones_like(offsets)

    for j, node in enumerate(offsets):
        for m, other in enumerate(offsets):
            if m != j:
                weights[j] *= (x - other) / (node - other)

    return weights


def get_interpolation_stencil(
    r: float, dr: float, point_count: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Five-point stencil around r for 4th order interpolation. Indices may be
    negative near the origin; they address the mirrored ghost points.

    Args:
        r (float): Interpolation radius.
        dr (float): Grid spacing.
        point_count (int): Number of grid points.

    Returns:
        tuple[np.ndarray, np.ndarray]: Grid indices (possibly negative) and
        weights.
    """
    center = int(round(r / dr))
    center = min(center, point_count - 1 - GHOST_POINTS)
    indices = np.arange(center - 2, center + 3)
    weights = get_lagrange_weights(indices, r / dr)

    return indices, weights


def interpolate(
    values: np.ndarray, indices: np.ndarray, weights: np.ndarray
) -> float:
    """Applies a stencil from get_interpolation_stencil to an even field."""
    return float(np.dot(weights, values[np.abs(indices)]))
