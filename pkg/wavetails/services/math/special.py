"""
Exact combinatorial and special-function primitives.

Everything here is pure. Integer arguments produce exact integers or
fractions wherever the result is rational, so identities like C(l, 2) = 0
hold exactly instead of to rounding.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import comb, factorial2

MU_CLAMP_TOLERANCE = 1e-12


class SpecialFunctionError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


def falling_factorial(x: float, k: int) -> float:
    """
    Falling factorial x(x-1)...(x-k+1).

    Args:
        x (float): Base. Integer and Fraction inputs give exact results.
        k (int): Number of factors, nonnegative.

    Returns:
        float: The product. k = 0 returns 1.
    """
    if k < 0:
        raise SpecialFunctionError(f"Negative falling factorial order {k}")

    result = 1
    for i in range(k):
        result *= x - i

    return result


def double_factorial_odd(l: int) -> int:
    """
    Returns (2l+1)!! = 1*3*...*(2l+1).

    Args:
        l (int): Nonnegative index.

    Returns:
        int: The double factorial.
    """
    if l < 0:
        raise SpecialFunctionError(f"Negative double factorial index {l}")

    return int(factorial2(2 * l + 1, exact=True))


def binomial(n: int, k: int) -> int:
    return int(comb(n, k, exact=True))


def legendre(l: int, mu: float | np.ndarray) -> float | np.ndarray:
    """
    Legendre polynomial P_l evaluated with the three-term recurrence.

    Arguments overshooting [-1, 1] by less than MU_CLAMP_TOLERANCE are
    clamped; anything further out raises, since it means the caller built
    mu wrongly.

    Args:
        l (int): Degree, nonnegative.
        mu (float | np.ndarray): Argument(s) in [-1, 1].

    Returns:
        float | np.ndarray: P_l(mu), with the shape of mu.
    """
    if l < 0:
        raise SpecialFunctionError(f"Negative Legendre degree {l}")

    mu_array = np.asarray(mu, dtype=float)

    if np.any(np.abs(mu_array) > 1 + MU_CLAMP_TOLERANCE):
        raise SpecialFunctionError(
            f"Legendre argument outside [-1, 1]: max |mu| = "
            f"{np.max(np.abs(mu_array)):.16g}"
        )

    mu_array = np.clip(mu_array, -1.0, 1.0)

    previous = np.ones_like(mu_array)
    current = mu_array.copy()

    if l == 0:
        current = previous

    for n in range(1, l):
        previous, current = current, (
            (2 * n + 1) * mu_array * current - n * previous
        ) / (n + 1)

    if np.ndim(mu) == 0:
        return float(current)

    return current


@lru_cache(maxsize=None)
def legendre_power_expansion(k: int) -> dict[int, Fraction]:
    """
    Coefficients c_l with mu^k = sum_l c_l P_l(mu), l = k, k-2, ..., >= 0.

    c_l = (2l+1) k! / (2^((k-l)/2) ((k-l)/2)! (k+l+1)!!)

    The denominator carries the double factorial (k+l+1)!!; a plain
    factorial there fails the projection check already at k = 2.

    Args:
        k (int): Power, nonnegative.

    Returns:
        dict[int, Fraction]: Exact coefficients keyed by degree l.
    """
    if k < 0:
        raise SpecialFunctionError(f"Negative power {k}")

    coefficients = {}

    for l in range(k, -1, -2):
        half = (k - l) // 2
        numerator = (2 * l + 1) * math.factorial(k)
        denominator = (
            2**half
            * math.factorial(half)
            * int(factorial2(k + l + 1, exact=True))
        )
        coefficients[l] = Fraction(numerator, denominator)

    return coefficients


def _nonpositive_integer(x: float) -> int | None:
    """Returns -x when x is a nonpositive integer, else None."""
    rounded = round(float(x))

    if rounded <= 0 and abs(float(x) - rounded) < 1e-12:
        return -rounded

    return None


def hyp2f1_terminating(a: float, b: float, c: float, z: float) -> float:
    """
    Gauss hypergeometric function F(a, b; c; z) for a terminating series.

    At least one of the upper parameters must be a nonpositive integer. The
    finite series is summed term by term with math.fsum, which keeps
    cancellation in alternating sums at the rounding level of the largest
    term.

    Args:
        a (float): Upper parameter.
        b (float): Upper parameter.
        c (float): Lower parameter.
        z (float): Argument.

    Returns:
        float: The finite sum.
    """
    lengths = [
        n
        for n in (_nonpositive_integer(a), _nonpositive_integer(b))
        if n is not None
    ]

    if not lengths:
        raise SpecialFunctionError(
            f"F({a}, {b}; {c}; z) does not terminate"
        )

    last = min(lengths)
    c_index = _nonpositive_integer(c)

    if c_index is not None and c_index < last:
        raise SpecialFunctionError(
            f"Lower parameter c = {c} vanishes before the series terminates"
        )

    terms = [1.0]
    term = 1.0

    for k in range(last):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(term)

    return math.fsum(terms)
