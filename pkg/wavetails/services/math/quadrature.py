"""
Gauss-Legendre rules and the composite integrators built on them.

Integrands are vectorized callables: they take a numpy array of abscissae
and return an array of the same shape.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

from wavetails.services.decorators import validate_assertions

logger = logging.getLogger(__name__)

DEFAULT_NODE_COUNT = 16
DEFAULT_MAX_DOUBLINGS = 12
# Gauss sums cannot beat this fraction of the integral of |f|
ROUNDOFF_FLOOR = 1e-14

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class QuadratureRule:
    """
    Gauss-Legendre rule on [-1, 1].

    Attributes:
        node_count (int): Number of nodes.
        nodes (np.ndarray): Abscissae in (-1, 1), increasing.
        weights (np.ndarray): Positive weights summing to 2.
    """

    node_count: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=QuadratureError)
    def validate(self) -> None:
        assert self.node_count >= 1, "A rule needs at least one node"
        assert self.nodes.shape == (self.node_count,), "Node count mismatch"
        assert self.weights.shape == (
            self.node_count,
        ), "Weight count mismatch"
        assert np.all(np.abs(self.nodes) < 1), "Nodes must lie in (-1, 1)"
        assert np.all(self.weights > 0), "Weights must be positive"

    def scaled(
        self, lower: float | np.ndarray, upper: float | np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Maps the rule onto one or more intervals.

        Args:
            lower (float | np.ndarray): Lower bound(s).
            upper (float | np.ndarray): Upper bound(s), same shape as lower.

        Returns:
            tuple[np.ndarray, np.ndarray]: Nodes and weights with shape
            lower.shape + (node_count,).
        """
        lower = np.asarray(lower, dtype=float)[..., np.newaxis]
        upper = np.asarray(upper, dtype=float)[..., np.newaxis]
        half = 0.5 * (upper - lower)
        middle = 0.5 * (upper + lower)

        return middle + half * self.nodes, half * self.weights

    def integrate(
        self, function: Integrand, lower: float, upper: float
    ) -> float:
        x, w = self.scaled(lower, upper)
        return float(np.sum(w * function(x)))


@lru_cache(maxsize=64)
def gauss_legendre(node_count: int) -> QuadratureRule:
    """
    Returns the cached Gauss-Legendre rule with the given number of nodes.

    Args:
        node_count (int): Number of nodes.

    Returns:
        QuadratureRule: Rule integrating polynomials of degree
        2*node_count - 1 exactly.
    """
    nodes, weights = roots_legendre(node_count)
    nodes.setflags(write=False)
    weights.setflags(write=False)

    return QuadratureRule(node_count=node_count, nodes=nodes, weights=weights)


@dataclass(frozen=True)
class QuadratureResult:
    """
    Attributes:
        value (float): Integral estimate.
        magnitude (float): Estimate of the integral of |f|, the scale
            against which rounding in value should be judged.
        error (float): Difference between the last two refinements.
        subdivisions (int): Panels per breakpoint interval at convergence.
    """

    value: float
    magnitude: float
    error: float
    subdivisions: int


def get_panel_edges(
    breakpoints: Sequence[float], subdivisions: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Splits every interval between consecutive breakpoints into equal panels.

    Args:
        breakpoints (Sequence[float]): Increasing panel boundaries.
        subdivisions (int): Panels per interval.

    Returns:
        tuple[np.ndarray, np.ndarray]: Lower and upper panel edges.
    """
    breakpoints = np.asarray(breakpoints, dtype=float)
    fractions = np.linspace(0.0, 1.0, subdivisions + 1)
    lower = breakpoints[:-1, np.newaxis]
    width = np.diff(breakpoints)[:, np.newaxis]
    edges = lower + width * fractions

    return edges[:, :-1].ravel(), edges[:, 1:].ravel()


def integrate_panels(
    function: Integrand,
    breakpoints: Sequence[float],
    rel_tol: float = 1e-12,
    node_count: int = DEFAULT_NODE_COUNT,
    max_doublings: int = DEFAULT_MAX_DOUBLINGS,
) -> QuadratureResult:
    """
    Composite Gauss quadrature with panels aligned to breakpoints.

    The panel count per interval doubles until two successive estimates
    differ by at most rel_tol * |Q| + ROUNDOFF_FLOOR * integral(|f|). The
    integrand is only required to be smooth between breakpoints.

    Args:
        function (Integrand): Vectorized integrand.
        breakpoints (Sequence[float]): Increasing interval boundaries.
        rel_tol (float): Relative tolerance.
        node_count (int): Gauss nodes per panel.
        max_doublings (int): Refinement limit.

    Returns:
        QuadratureResult: The converged estimate.
    """
    breakpoints = np.asarray(breakpoints, dtype=float)

    if breakpoints.size < 2:
        return QuadratureResult(0.0, 0.0, 0.0, 0)

    if np.any(np.diff(breakpoints) <= 0):
        raise QuadratureError("Breakpoints must be strictly increasing")

    rule = gauss_legendre(node_count)

    def estimate(subdivisions: int) -> tuple[float, float]:
        lower, upper = get_panel_edges(breakpoints, subdivisions)
        x, w = rule.scaled(lower, upper)
        values = function(x) * w
        return float(np.sum(values)), float(np.sum(np.abs(values)))

    subdivisions = 1
    previous, magnitude = estimate(subdivisions)

    for _ in range(max_doublings):
        subdivisions *= 2
        current, magnitude = estimate(subdivisions)
        error = abs(current - previous)

        if error <= rel_tol * abs(current) + ROUNDOFF_FLOOR * magnitude:
            logger.debug(
                "Panel quadrature converged with %d panels per interval",
                subdivisions,
            )
            return QuadratureResult(current, magnitude, error, subdivisions)

        previous = current

    raise QuadratureError(
        f"Panel quadrature did not converge after {max_doublings} "
        f"doublings (last change {error:.3e}, value {current:.6e})"
    )


def integrate_adaptive(
    function: Integrand,
    lower: float,
    upper: float,
    rel_tol: float = 1e-13,
    node_count: int = DEFAULT_NODE_COUNT,
    max_depth: int = 30,
) -> QuadratureResult:
    """
    Adaptive bisection with a Gauss rule on each panel.

    A panel is accepted when the rule on the panel and the sum of the rule
    on its halves agree to the share of the tolerance the panel's width
    carries. Panels are processed in a fixed order, so results are
    reproducible.

    Args:
        function (Integrand): Vectorized integrand, smooth on [lower, upper].
        lower (float): Lower bound.
        upper (float): Upper bound.
        rel_tol (float): Relative tolerance on the total.
        node_count (int): Gauss nodes per panel.
        max_depth (int): Bisection depth limit.

    Returns:
        QuadratureResult: Estimate and accumulated error.
    """
    rule = gauss_legendre(node_count)
    width = upper - lower

    if width == 0:
        return QuadratureResult(0.0, 0.0, 0.0, 0)

    def panel(a: float, b: float) -> tuple[float, float]:
        x, w = rule.scaled(a, b)
        values = function(x) * w
        return float(np.sum(values)), float(np.sum(np.abs(values)))

    total, magnitude = panel(lower, upper)
    accepted_values = []
    accepted_magnitudes = []
    error = 0.0
    stack = [(lower, upper, total, 0)]
    panels = 0

    while stack:
        a, b, whole, depth = stack.pop()
        middle = 0.5 * (a + b)
        left, left_magnitude = panel(a, middle)
        right, right_magnitude = panel(middle, b)
        difference = abs(left + right - whole)
        share = abs(b - a) / abs(width)
        scale = max(abs(total), ROUNDOFF_FLOOR * magnitude)

        if difference <= rel_tol * scale * share or depth >= max_depth:
            if depth >= max_depth and difference > rel_tol * scale * share:
                logger.warning(
                    "Adaptive quadrature hit depth %d on [%g, %g]",
                    max_depth,
                    a,
                    b,
                )
            accepted_values.extend((left, right))
            accepted_magnitudes.extend((left_magnitude, right_magnitude))
            error += difference
            panels += 2
            continue

        # right pushed first so the left half is refined first
        stack.append((middle, b, right, depth + 1))
        stack.append((a, middle, left, depth + 1))

    return QuadratureResult(
        math.fsum(accepted_values),
        math.fsum(accepted_magnitudes),
        error,
        panels,
    )
