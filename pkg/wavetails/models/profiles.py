"""
Generating functions a(x) built from compactly supported polynomial bumps.

Each bump is A * (1 - s^2)^m in the local variable s = (x - x0) / w, so
every derivative is an exact polynomial in s and no numerical
differentiation is ever needed.
"""

from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Iterable

import numpy as np
from numpy.polynomial import Polynomial

from wavetails.services.decorators import validate_assertions


class ProfileError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@lru_cache(maxsize=None)
def get_unit_bump_polynomial(smoothness: int, k: int) -> Polynomial:
    """
    k-th derivative of (1 - s^2)^m with respect to s.

    Args:
        smoothness (int): Exponent m.
        k (int): Derivative order.

    Returns:
        Polynomial: The derivative polynomial in s.
    """
    return (Polynomial([1.0, 0.0, -1.0]) ** smoothness).deriv(k)


@dataclass(frozen=True)
class BumpComponent:
    """
    One term A * (1 - ((x - x0)/w)^2)^m of a generating function, zero
    outside [x0 - w, x0 + w].

    Attributes:
        amplitude (float): Peak value A.
        center (float): Center x0.
        half_width (float): Half-width w > 0.
        smoothness (int): Exponent m; the bump is C^(m-1).
    """

    amplitude: float
    center: float
    half_width: float
    smoothness: int

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=ProfileError)
    def validate(self) -> None:
        assert np.isfinite(self.amplitude), "Bump amplitude must be finite"
        assert np.isfinite(self.center), "Bump center must be finite"
        assert (
            np.isfinite(self.half_width) and self.half_width > 0
        ), f"Bump half-width must be positive, got {self.half_width}"
        assert (
            isinstance(self.smoothness, (int, np.integer))
            and self.smoothness >= 1
        ), f"Bump smoothness must be a positive integer, got {self.smoothness}"

    @property
    def support(self) -> tuple[float, float]:
        return (
            self.center - self.half_width,
            self.center + self.half_width,
        )

    def get_local_variable(self, x: float | np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.center) / self.half_width

    def derivative(self, k: int, x: float | np.ndarray) -> np.ndarray:
        """
        Exact k-th derivative, zero outside the open support.

        Orders at or above the smoothness exponent are allowed here: they
        are the correct one-sided derivatives inside the support, which is
        what Taylor expansions within one bump need.

        Args:
            k (int): Derivative order.
            x (float | np.ndarray): Evaluation point(s).

        Returns:
            np.ndarray: Derivative values with the shape of x.
        """
        s = self.get_local_variable(x)
        polynomial = get_unit_bump_polynomial(self.smoothness, k)
        inside = np.abs(s) < 1
        values = self.amplitude * polynomial(np.where(inside, s, 0.0))

        return np.where(inside, values / self.half_width**k, 0.0)


@dataclass(frozen=True)
class GeneratingFunction:
    """
    Compactly supported profile a(x), a sum of polynomial bumps.

    Attributes:
        components (tuple[BumpComponent, ...]): At least one bump.
    """

    components: tuple[BumpComponent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        self.validate()

    @validate_assertions(exception=ProfileError)
    def validate(self) -> None:
        assert self.components, "A generating function needs a bump"
        assert all(
            isinstance(component, BumpComponent)
            for component in self.components
        ), "Components must be BumpComponent instances"

    @classmethod
    def from_bumps(cls, bumps: Iterable[dict]) -> "GeneratingFunction":
        return cls(tuple(BumpComponent(**bump) for bump in bumps))

    @property
    def smoothness(self) -> int:
        return min(component.smoothness for component in self.components)

    @property
    def support(self) -> tuple[float, float]:
        lower = min(component.support[0] for component in self.components)
        upper = max(component.support[1] for component in self.components)
        return lower, upper

    @property
    def radius(self) -> float:
        """R = sup |x| over the support."""
        return max(abs(edge) for edge in self.support)

    @cached_property
    def breakpoints(self) -> np.ndarray:
        """Sorted support endpoints; a is polynomial between them."""
        edges = [edge for c in self.components for edge in c.support]
        return np.unique(np.asarray(edges, dtype=float))

    @validate_assertions(exception=ProfileError)
    def validate_for_dimension(self, l: int) -> None:
        assert self.smoothness >= l + 3, (
            f"Smoothness {self.smoothness} is too low for l = {l}; "
            f"at least {l + 3} is required"
        )

    def derivative(
        self, k: int, x: float | np.ndarray, strict: bool = True
    ) -> float | np.ndarray:
        """
        Exact k-th derivative of a(x).

        Args:
            k (int): Derivative order.
            x (float | np.ndarray): Evaluation point(s).
            strict (bool): Reject orders k >= smoothness, where the
                derivative jumps at the support endpoints.

        Returns:
            float | np.ndarray: Values with the shape of x.
        """
        if k < 0:
            raise ProfileError(f"Negative derivative order {k}")

        if strict and k > self.smoothness - 1:
            raise ProfileError(
                f"Derivative order {k} exceeds smoothness "
                f"{self.smoothness} - 1"
            )

        total = sum(
            component.derivative(k, x) for component in self.components
        )

        if np.ndim(x) == 0:
            return float(total)

        return total

    def scaled(self, factor: float) -> "GeneratingFunction":
        return GeneratingFunction(
            tuple(
                replace(c, amplitude=c.amplitude * factor)
                for c in self.components
            )
        )

    def shifted(self, offset: float) -> "GeneratingFunction":
        return GeneratingFunction(
            tuple(
                replace(c, center=c.center + offset) for c in self.components
            )
        )

    def dilated(self, factor: float) -> "GeneratingFunction":
        """Returns x -> a(x / factor)."""
        return GeneratingFunction(
            tuple(
                replace(
                    c,
                    center=c.center * factor,
                    half_width=c.half_width * factor,
                )
                for c in self.components
            )
        )


def bump_derivative(
    a: GeneratingFunction, k: int, x: float | np.ndarray
) -> float | np.ndarray:
    """
    Exact k-th derivative of the generating function.

    Args:
        a (GeneratingFunction): Profile.
        k (int): Derivative order, at most smoothness - 1.
        x (float | np.ndarray): Evaluation point(s).

    Returns:
        float | np.ndarray: a^(k)(x).
    """
    return a.derivative(k, x)


def get_default_profile(smoothness: int = 8) -> GeneratingFunction:
    """
    Asymmetric two-bump profile used by the reference configurations.

    A single symmetric bump makes every I-integral with an odd integrand
    vanish, which hides the leading tail amplitude.
    """
    return GeneratingFunction(
        (
            BumpComponent(
                amplitude=1.0,
                center=-0.3,
                half_width=0.8,
                smoothness=smoothness,
            ),
            BumpComponent(
                amplitude=0.6,
                center=0.35,
                half_width=0.5,
                smoothness=smoothness,
            ),
        )
    )
