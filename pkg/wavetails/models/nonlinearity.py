from dataclasses import dataclass
from typing import Iterable

import numpy as np

from wavetails.services.decorators import validate_assertions


class NonlinearityError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


def _is_integer(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(
        value, bool
    )


@dataclass(frozen=True)
class NonlinearityTerm:
    """
    One monomial c * phi^p * (alpha * phi_t + beta * phi_r)^q of the right
    hand side.

    Attributes:
        c (float): Coefficient.
        p (int): Power of the field.
        q (int): Power of the derivative combination.
        alpha (float): Weight of phi_t.
        beta (float): Weight of phi_r.
    """

    c: float = 1.0
    p: int = 0
    q: int = 0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=NonlinearityError)
    def validate(self) -> None:
        assert _is_integer(self.p) and _is_integer(
            self.q
        ), f"Powers must be integers, got p={self.p!r}, q={self.q!r}"
        assert self.p >= 0 and self.q >= 0, "Powers must be nonnegative"
        assert self.p + self.q >= 2, (
            f"p + q = {self.p + self.q} is linear; "
            "a nonlinearity needs p + q >= 2"
        )
        assert np.isfinite(self.c), "Coefficient must be finite"
        assert np.isfinite(self.alpha) and np.isfinite(
            self.beta
        ), "Derivative weights must be finite"

    @property
    def order(self) -> int:
        return self.p + self.q

    @property
    def is_derivative_free(self) -> bool:
        return self.q == 0

    def evaluate(
        self,
        phi: np.ndarray,
        phi_t: np.ndarray | None = None,
        phi_r: np.ndarray | None = None,
    ) -> np.ndarray:
        """
        Evaluates the monomial on field samples.

        Args:
            phi (np.ndarray): Field values.
            phi_t (np.ndarray | None): Time derivative, required if q > 0.
            phi_r (np.ndarray | None): Radial derivative, required if q > 0.

        Returns:
            np.ndarray: c * phi^p * (alpha phi_t + beta phi_r)^q.
        """
        value = self.c * phi**self.p

        if self.q:
            value = value * (self.alpha * phi_t + self.beta * phi_r) ** self.q

        return value

    def describe(self) -> str:
        text = f"{self.c:g}*phi^{self.p}"
        if self.q:
            text += f"*({self.alpha:g}*phi_t+{self.beta:g}*phi_r)^{self.q}"
        return text


def evaluate_terms(
    terms: Iterable[NonlinearityTerm],
    phi: np.ndarray,
    phi_t: np.ndarray,
    phi_r: np.ndarray,
) -> np.ndarray:
    total = np.zeros_like(phi)

    for term in terms:
        total = total + term.evaluate(phi, phi_t, phi_r)

    return total
