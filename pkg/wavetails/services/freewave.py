"""
Exact free waves in d = 2l + 3 dimensions and the integrals of the
generating function that fix their tails.

The general regular spherical free wave is a sum of an outgoing part built
from a(u) and an ingoing part built from a(v),

    ret = r^-(l+1) sum_k c_k a^(k)(u) (v - u)^(k - l)
    adv = r^-(l+1) sum_k (-1)^(k+1) c_k a^(k)(v) (v - u)^(k - l)

with c_k = (2l - k)! / (k! (l - k)!), u = t - r and v = t + r.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from wavetails.models.dimension import get_dimension_index
from wavetails.models.profiles import BumpComponent, GeneratingFunction
from wavetails.services.decorators import validate_assertions
from wavetails.services.math.quadrature import (
    QuadratureResult,
    integrate_panels,
)

PARTS = ("retarded", "advanced", "both")


class FreeWaveError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class NullPoint:
    """
    Point in null coordinates.

    Attributes:
        u (float): Retarded time t - r.
        v (float): Advanced time t + r, v >= u.
    """

    u: float
    v: float

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=FreeWaveError)
    def validate(self) -> None:
        assert self.v >= self.u, f"v = {self.v} must not be below u = {self.u}"

    @classmethod
    def from_tr(cls, t: float, r: float) -> "NullPoint":
        return cls(u=t - r, v=t + r)

    @property
    def t(self) -> float:
        return 0.5 * (self.v + self.u)

    @property
    def r(self) -> float:
        return 0.5 * (self.v - self.u)


@lru_cache(maxsize=None)
def get_free_wave_coefficients(l: int) -> tuple[int, ...]:
    """Returns c_k = (2l - k)! / (k! (l - k)!) for k = 0..l."""
    return tuple(
        math.factorial(2 * l - k)
        // (math.factorial(k) * math.factorial(l - k))
        for k in range(l + 1)
    )


@lru_cache(maxsize=None)
def get_regular_series_coefficients(
    l: int, max_order: int
) -> tuple[tuple[int, float], ...]:
    """
    Taylor coefficients of the full free wave around r = 0.

    Inside an interval where a is a single polynomial,

        phi0(t, r) = sum_n K_n a^(n)(t) r^(n - 2l - 1),

    where only odd n >= 2l + 1 survive. The lower orders cancel exactly,
    which is the regularity of the full solution at the origin.

    Args:
        l (int): Dimension index.
        max_order (int): Highest derivative order kept.

    Returns:
        tuple[tuple[int, float], ...]: Pairs (n, K_n) with nonzero K_n.
    """
    coefficients = get_free_wave_coefficients(l)
    series = []

    for n in range(max_order + 1):
        total = Fraction(0)

        for k, c in enumerate(coefficients):
            if k > n:
                break
            sign = (-1) ** (n - k) - (-1) ** k
            total += Fraction(c * 2**k * sign, math.factorial(n - k))

        total /= 2**l

        if total != 0:
            series.append((n, float(total)))

    return tuple(series)


def _characteristic_sums(
    bump: BumpComponent,
    l: int,
    x: np.ndarray,
    two_r: np.ndarray,
    advanced: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sums over k of the outgoing (or ingoing) part along one characteristic.

    Returns S0 = sum s_k c_k a^(k)(x) (2r)^(k-l), S1, the same with
    a^(k+1), and S2 = sum s_k c_k 2(k-l) a^(k)(x) (2r)^(k-l-1).
    """
    derivatives = [bump.derivative(k, x) for k in range(l + 2)]
    s0 = np.zeros_like(two_r)
    s1 = np.zeros_like(two_r)
    s2 = np.zeros_like(two_r)

    for k, c in enumerate(get_free_wave_coefficients(l)):
        weight = (-1) ** (k + 1) * c if advanced else c
        power = two_r ** (k - l)
        s0 = s0 + weight * derivatives[k] * power
        s1 = s1 + weight * derivatives[k + 1] * power
        s2 = s2 + 2 * (k - l) * weight * derivatives[k] * power / two_r

    return s0, s1, s2


def _closed_form(
    bump: BumpComponent, l: int, t: np.ndarray, r: np.ndarray, part: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    prefactor = r ** -(l + 1)
    value = np.zeros_like(r)
    d_t = np.zeros_like(r)
    d_r = np.zeros_like(r)

    if part in ("retarded", "both"):
        s0, s1, s2 = _characteristic_sums(bump, l, t - r, 2 * r, False)
        value = value + prefactor * s0
        d_t = d_t + prefactor * s1
        d_r = d_r + prefactor * (s2 - s1)

    if part in ("advanced", "both"):
        s0, s1, s2 = _characteristic_sums(bump, l, t + r, 2 * r, True)
        value = value + prefactor * s0
        d_t = d_t + prefactor * s1
        d_r = d_r + prefactor * (s2 + s1)

    d_r = d_r - (l + 1) / r * value

    return value, d_t, d_r


def _regular_series(
    bump: BumpComponent, l: int, t: np.ndarray, r: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    value = np.zeros_like(r)
    d_t = np.zeros_like(r)
    d_r = np.zeros_like(r)
    # a^(n) vanishes identically inside the bump for n > 2m
    max_order = 2 * bump.smoothness

    for n, coefficient in get_regular_series_coefficients(l, max_order):
        power = n - 2 * l - 1
        derivative = bump.derivative(n, t)
        value = value + coefficient * derivative * r**power
        d_t = d_t + coefficient * bump.derivative(n + 1, t) * r**power
        if power:
            d_r = d_r + coefficient * power * derivative * r ** (power - 1)

    return value, d_t, d_r


def evaluate_free_wave(
    a: GeneratingFunction,
    l: int,
    t: float | np.ndarray,
    r: float | np.ndarray,
    part: str = "both",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Free wave and its first derivatives.

    For the full wave, each bump whose support strictly contains
    [t - r, t + r] with r <= w/2 is evaluated by its terminating Taylor
    series in r, which is exact there and free of the 1/r^(2l+1)
    cancellation of the closed form near the origin. Bumps whose support
    misses [t - r, t + r] contribute exactly zero.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        t (float | np.ndarray): Time(s).
        r (float | np.ndarray): Radius (radii); r = 0 is allowed for the
            full wave only.
        part (str): "retarded", "advanced" or "both".

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: phi0, d phi0/dt and
        d phi0/dr, broadcast over t and r.
    """
    if part not in PARTS:
        raise FreeWaveError(f"Unknown free wave part {part!r}")

    l = get_dimension_index(l)
    t, r = np.broadcast_arrays(
        np.asarray(t, dtype=float), np.asarray(r, dtype=float)
    )
    value = np.zeros(r.shape)
    d_t = np.zeros(r.shape)
    d_r = np.zeros(r.shape)

    for bump in a.components:
        if part != "both":
            with np.errstate(divide="ignore", invalid="ignore"):
                contribution = _closed_form(bump, l, t, r, part)
            value += contribution[0]
            d_t += contribution[1]
            d_r += contribution[2]
            continue

        distance = np.abs(t - bump.center)
        use_series = (distance + r < bump.half_width) & (
            r <= 0.5 * bump.half_width
        )
        vanishes = distance - r >= bump.half_width
        use_closed = ~(use_series | vanishes)
        safe_r = np.where(use_closed, r, 1.0)

        closed = _closed_form(bump, l, t, safe_r, part)
        series = _regular_series(bump, l, t, np.where(use_series, r, 0.0))

        for total, closed_part, series_part in zip(
            (value, d_t, d_r), closed, series
        ):
            total += np.where(
                use_series,
                series_part,
                np.where(use_closed, closed_part, 0.0),
            )

    return value, d_t, d_r


def _as_output(values: np.ndarray) -> float | np.ndarray:
    if values.ndim == 0:
        return float(values)
    return values


def eval_phi0(
    a: GeneratingFunction,
    l: int,
    t: float | np.ndarray,
    r: float | np.ndarray,
    part: str = "both",
) -> float | np.ndarray:
    """
    Evaluates the free wave generated by a.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        t (float | np.ndarray): Time(s).
        r (float | np.ndarray): Radius (radii), positive.
        part (str): "retarded", "advanced" or "both".

    Returns:
        float | np.ndarray: phi0(t, r).
    """
    value, _, _ = evaluate_free_wave(a, l, t, r, part)
    return _as_output(value)


def eval_phi0_gradient(
    a: GeneratingFunction,
    l: int,
    t: float | np.ndarray,
    r: float | np.ndarray,
    part: str = "both",
) -> tuple[float | np.ndarray, float | np.ndarray]:
    """
    Analytic time and radial derivatives of the free wave.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        t (float | np.ndarray): Time(s).
        r (float | np.ndarray): Radius (radii), positive.
        part (str): "retarded", "advanced" or "both".

    Returns:
        tuple: (d phi0/dt, d phi0/dr).
    """
    _, d_t, d_r = evaluate_free_wave(a, l, t, r, part)
    return _as_output(d_t), _as_output(d_r)


def integrate_tail(
    a: GeneratingFunction,
    l: int,
    p: int,
    q: int,
    upper: Optional[float] = None,
    rel_tol: float = 1e-12,
) -> QuadratureResult:
    """
    Integral of (a^(l))^p (a^(l+1))^q up to `upper` (the whole line if
    None), with its magnitude estimate.

    The integrand is a polynomial between support endpoints, so the Gauss
    rule is sized to integrate each panel exactly and the refinement only
    confirms it.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Derivative index, nonnegative.
        p (int): Power of a^(l).
        q (int): Power of a^(l+1).
        upper (float | None): Upper integration limit.
        rel_tol (float): Relative tolerance.

    Returns:
        QuadratureResult: Integral and magnitude.
    """
    if l < 0 or p < 0 or q < 0 or p + q < 1:
        raise FreeWaveError(
            f"Invalid tail integral indices l={l}, p={p}, q={q}"
        )

    breakpoints = a.breakpoints

    if upper is not None:
        if upper <= breakpoints[0]:
            return QuadratureResult(0.0, 0.0, 0.0, 0)
        breakpoints = np.append(breakpoints[breakpoints < upper], upper)

    degree = (p + q) * max(2 * c.smoothness for c in a.components)
    node_count = max(16, degree // 2 + 1)

    def integrand(x: np.ndarray) -> np.ndarray:
        value = np.ones_like(x)
        if p:
            value = value * a.derivative(l, x, strict=False) ** p
        if q:
            value = value * a.derivative(l + 1, x, strict=False) ** q
        return value

    return integrate_panels(
        integrand, breakpoints, rel_tol=rel_tol, node_count=node_count
    )


def tail_integral(a: GeneratingFunction, l: int, p: int, q: int) -> float:
    """
    I_l(p, q) = integral of (a^(l))^p (a^(l+1))^q over the real line.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Derivative index, nonnegative.
        p (int): Power of a^(l).
        q (int): Power of a^(l+1).

    Returns:
        float: The integral.
    """
    return integrate_tail(a, l, p, q).value


def null_tail_coefficient(a: GeneratingFunction, l: int, u: float) -> float:
    """
    Coefficient h(u) of (v - u)^-(2l+1) in the first iterate of the
    quadratic equation near null infinity,

        h(u) = -(2^(2l) / l) * integral_{-inf}^{u} (a^(l)(x))^2 dx.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index, at least 1.
        u (float): Retarded time.

    Returns:
        float: h(u).
    """
    l = get_dimension_index(l)
    integral = integrate_tail(a, l, 2, 0, upper=u).value

    return -(2 ** (2 * l)) / l * integral
