"""
Closed-form late-time tails for a single monomial nonlinearity.

Every prediction has the form phi ~ eps^k * A * t^-gamma at fixed r. The
amplitude A is a rational coefficient depending on (l, p, q, alpha, beta)
times one integral I_l(p, q) of the generating function.
"""

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from wavetails.models.dimension import get_dimension_index
from wavetails.models.nonlinearity import NonlinearityTerm
from wavetails.models.profiles import GeneratingFunction
from wavetails.services.freewave import integrate_tail
from wavetails.services.math.quadrature import integrate_panels
from wavetails.services.math.special import (
    double_factorial_odd,
    falling_factorial,
)

logger = logging.getLogger(__name__)

DEGENERACY_THRESHOLD = 1e-12

GENERIC = "generic"
P2_SECOND_ORDER = "p2-second-order"
Q1 = "q1"
Q1_P1_BETA0_SECOND_ORDER = "q1-p1-beta0-second-order"
Q2P0_FIRST = "q2p0-first"
Q2P0_SECOND = "q2p0-second"
ALPHA_EQ_BETA = "alpha-eq-beta"

CASE_LABELS = (
    GENERIC,
    P2_SECOND_ORDER,
    Q1,
    Q1_P1_BETA0_SECOND_ORDER,
    Q2P0_FIRST,
    Q2P0_SECOND,
    ALPHA_EQ_BETA,
)


class PredictionError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class TailTerm:
    """
    One predicted tail eps^k * A * t^-gamma.

    Attributes:
        eps_order (int): Power k of epsilon.
        gamma (int): Decay exponent.
        amplitude (float): A, the coefficient times the integral.
        case_label (str): Which closed form produced the term.
        coefficient (float): Rational prefactor, including c and the
            alpha/beta dependence.
        integral (float): Value of the I-integral.
        integral_label (str): Which I-integral, e.g. "I_1(3,0)".
        degenerate (bool): The integral vanishes to rounding.
    """

    eps_order: int
    gamma: int
    amplitude: float
    case_label: str
    coefficient: float
    integral: float
    integral_label: str
    degenerate: bool = False

    def evaluate(self, epsilon: float, t: float | np.ndarray) -> np.ndarray:
        return epsilon**self.eps_order * self.amplitude * t ** (-self.gamma)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TailPrediction:
    """
    All tail terms known for one nonlinearity, ordered by epsilon order.

    Attributes:
        terms (list[TailTerm]): Predicted terms.
        warnings (list[str]): Degeneracy notes.
    """

    terms: list[TailTerm] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.terms.sort(key=lambda term: term.eps_order)

    @property
    def is_degenerate(self) -> bool:
        return not self.terms or all(term.degenerate for term in self.terms)

    def restricted(self, parity: str) -> "TailPrediction":
        """
        The terms a parity isolated series can show: odd or even epsilon
        orders. Any other parity keeps every term.
        """
        if parity not in ("odd", "even"):
            return self

        remainder = 1 if parity == "odd" else 0
        terms = [
            term for term in self.terms if term.eps_order % 2 == remainder
        ]
        warnings = list(self.warnings)
        if self.terms and not terms:
            warnings.append(
                f"no predicted term survives the {parity} isolation"
            )

        return TailPrediction(terms=terms, warnings=warnings)

    def dominant_term(self, epsilon: float, t: float) -> Optional[TailTerm]:
        """
        The term with the largest |eps^k A t^-gamma| at (epsilon, t).

        Degenerate terms are skipped unless nothing else is left.
        """
        candidates = [term for term in self.terms if not term.degenerate]
        candidates = candidates or self.terms

        if not candidates:
            return None

        return max(
            candidates,
            key=lambda term: abs(term.evaluate(epsilon, t)),
        )

    def to_dict(self) -> dict:
        return {
            "terms": [term.to_dict() for term in self.terms],
            "warnings": list(self.warnings),
            "degenerate": self.is_degenerate,
        }

    def print_results(self) -> None:
        print("\nTAIL PREDICTION")
        for term in self.terms:
            print(
                f" {term.case_label:>26}: eps^{term.eps_order} * "
                f"{term.amplitude:+.6e} * t^-{term.gamma}"
                f"  ({term.integral_label} = {term.integral:+.6e})"
            )
        for warning in self.warnings:
            print(f" WARNING: {warning}")


def coeff_C(l: int, p: int) -> float:
    """
    Coefficient of the generic first-order tail of phi^p.

        C(l, p) = (-1)^l 2^((l+1)(p-1)-1) / (2l+1)!!
                  * [(l+1)(p-1)-2]^(falling l)

    Args:
        l (int): Dimension index.
        p (int): Total power, at least 2.

    Returns:
        float: C(l, p); exactly zero for p = 2.
    """
    l = get_dimension_index(l)

    if p < 2:
        raise PredictionError(f"C(l, p) needs p >= 2, got {p}")

    n = (l + 1) * (p - 1)
    value = Fraction(
        (-1) ** l * 2 ** (n - 1) * falling_factorial(n - 2, l),
        double_factorial_odd(l),
    )

    return float(value)


def coeff_D(l: int, p: int, alpha: float, beta: float) -> float:
    """
    Coefficient of the first-order tail for q = 1.

    Args:
        l (int): Dimension index.
        p (int): Power of the field, at least 1.
        alpha (float): Weight of phi_t.
        beta (float): Weight of phi_r.

    Returns:
        float: D(l, p); zero for p = 1 and beta = 0.
    """
    l = get_dimension_index(l)

    if p < 1:
        raise PredictionError(f"D(l, p) needs p >= 1, got {p}")

    n = (l + 1) * p
    prefactor = Fraction(
        (-1) ** l * 2 ** (n - 1) * (l + 1) * falling_factorial(n - 1, l),
        double_factorial_odd(l),
    )
    ratio = Fraction(p - 1, p + 1) * Fraction((l + 1) * (p + 1) - 1, n - 1)
    bracket = (beta - alpha) * float(ratio) - 2 * beta

    return float(prefactor) * bracket


def coeff_E(l: int, p: int, q: int, alpha: float) -> float:
    """
    Coefficient of the first-order tail when alpha = beta.

    Args:
        l (int): Dimension index.
        p (int): Power of the field.
        q (int): Power of the derivative combination, at least 1.
        alpha (float): Common weight alpha = beta.

    Returns:
        float: E(l, p, q).
    """
    l = get_dimension_index(l)

    if q < 1 or p + q < 2:
        raise PredictionError("E(l, p, q) needs q >= 1, p + q >= 2")

    n = (l + 1) * (p + q - 1)
    prefactor = Fraction(
        (-1) ** (l + q)
        * 2 ** (n + q - 1)
        * (l + 1) ** q
        * falling_factorial(n + q - 2, l),
        double_factorial_odd(l),
    )

    return float(prefactor) * alpha**q


def get_second_order_prefactor(l: int) -> Fraction:
    """Returns 2^(3l) / (2l (2l+1)), shared by the second-order tails."""
    return Fraction(2 ** (3 * l), 2 * l * (2 * l + 1))


def _make_term(
    a: GeneratingFunction,
    case_label: str,
    eps_order: int,
    gamma: int,
    coefficient: float,
    l: int,
    p: int,
    q: int,
) -> TailTerm:
    result = integrate_tail(a, l, p, q)
    degenerate = abs(result.value) <= DEGENERACY_THRESHOLD * max(
        1.0, result.magnitude
    )

    return TailTerm(
        eps_order=eps_order,
        gamma=gamma,
        amplitude=coefficient * result.value,
        case_label=case_label,
        coefficient=coefficient,
        integral=result.value,
        integral_label=f"I_{l}({p},{q})",
        degenerate=degenerate,
    )


def generic_tail_term(
    l: int, term: NonlinearityTerm, a: GeneratingFunction
) -> TailTerm:
    """
    The generic first-order tail, whether or not it vanishes for this term.

        eps^(p+q) c (alpha - beta)^q C(l, p+q) I_l(p, q) t^-((l+1)(p+q)-1)

    Args:
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial.
        a (GeneratingFunction): Profile.

    Returns:
        TailTerm: The generic term.
    """
    l = get_dimension_index(l)
    coefficient = (
        term.c * (term.alpha - term.beta) ** term.q * coeff_C(l, term.order)
    )

    return _make_term(
        a,
        GENERIC,
        term.order,
        (l + 1) * term.order - 1,
        coefficient,
        l,
        term.p,
        term.q,
    )


def predict_tail(
    l: int, term: NonlinearityTerm, a: GeneratingFunction
) -> TailPrediction:
    """
    Dispatches a monomial to the closed forms that apply to it.

    Args:
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial c phi^p (alpha phi_t + beta phi_r)^q.
        a (GeneratingFunction): Profile.

    Returns:
        TailPrediction: Every applicable term, with warnings for vanishing
        integrals.
    """
    l = get_dimension_index(l)
    p, q, alpha, beta, c = term.p, term.q, term.alpha, term.beta, term.c

    if p + q < 2:
        raise PredictionError(f"p + q = {p + q} is not a nonlinearity")

    second_order = float(get_second_order_prefactor(l))
    terms = []
    warnings = []

    if q >= 1 and alpha == 0 and beta == 0:
        warnings.append(
            "alpha = beta = 0: the nonlinearity vanishes identically"
        )
    elif q == 0 and p == 2:
        terms.append(
            _make_term(
                a,
                P2_SECOND_ORDER,
                3,
                3 * l + 1,
                c**2 * (-1) ** l * second_order,
                l - 1,
                1,
                2,
            )
        )
    elif q >= 1 and alpha == beta:
        terms.append(
            _make_term(
                a,
                ALPHA_EQ_BETA,
                p + q,
                (l + 1) * (p + q) + q - 1,
                c * coeff_E(l, p, q, alpha),
                l,
                p + q,
                0,
            )
        )
    elif q == 1 and p == 1 and beta == 0:
        prefactor = Fraction(
            2 ** (3 * l) * (3 * l + 1), 4 * 2 * l * (2 * l + 1)
        )
        coefficient = c**2 * (-1) ** l * alpha**2 * float(prefactor)
        terms.append(
            _make_term(
                a,
                Q1_P1_BETA0_SECOND_ORDER,
                3,
                3 * l + 2,
                coefficient,
                l,
                3,
                0,
            )
        )
    elif q == 1:
        terms.append(
            _make_term(
                a,
                Q1,
                p + 1,
                (l + 1) * (p + 1),
                c * coeff_D(l, p, alpha, beta),
                l,
                p + 1,
                0,
            )
        )
    elif q == 2 and p == 0:
        if alpha * beta != 0:
            first_order = Fraction(
                (-1) ** l
                * 2 ** (l + 2)
                * falling_factorial(l, l)
                * (l + 1) ** 3,
                double_factorial_odd(l),
            )
            terms.append(
                _make_term(
                    a,
                    Q2P0_FIRST,
                    2,
                    2 * l + 3,
                    c * alpha * beta * float(first_order),
                    l,
                    2,
                    0,
                )
            )
        terms.append(
            _make_term(
                a,
                Q2P0_SECOND,
                3,
                3 * l + 1,
                c**2 * (-1) ** (l + 1) * (alpha - beta) ** 4 * second_order,
                l,
                0,
                3,
            )
        )
    else:
        terms.append(generic_tail_term(l, term, a))

    for tail_term in terms:
        if tail_term.degenerate:
            message = (
                f"{tail_term.integral_label} vanishes for this profile; the "
                f"{tail_term.case_label} tail is below the implemented order"
            )
            logger.warning(message)
            warnings.append(message)

    return TailPrediction(terms=terms, warnings=warnings)


def anomalous_tail_candidates(
    l: int, a: GeneratingFunction, c: float = 1.0
) -> dict[str, float]:
    """
    Second-order amplitude of the quadratic equation for both readings of
    its integral index, I_{l-1}(1, 2) and I_l(1, 2).

    Only the first scales like t^-(3l+1) under a dilation of the profile;
    predict_tail uses it. The second is kept for empirical comparison.
    """
    l = get_dimension_index(l)
    prefactor = c**2 * (-1) ** l * float(get_second_order_prefactor(l))

    return {
        f"I_{l - 1}(1,2)": prefactor * integrate_tail(a, l - 1, 1, 2).value,
        f"I_{l}(1,2)": prefactor * integrate_tail(a, l, 1, 2).value,
    }


def generic_tail_correction(a: GeneratingFunction, l: int, p: int) -> float:
    """
    Next-order term kappa of the generic phi^p tail,

        t^gamma phi_{p-1}(t, r) = C(l, p) [I_l(p, 0) + kappa / t + O(1/t^2)].

    kappa collects the first moment of (a^(l))^p and the contribution of
    the k = l - 1 term of the outgoing wave. Translating the profile by s
    adds gamma * s * I_l(p, 0) to kappa.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        p (int): Power, at least 3.

    Returns:
        float: kappa.
    """
    l = get_dimension_index(l)

    if p < 3:
        raise PredictionError(f"The generic correction needs p >= 3, got {p}")

    gamma = (l + 1) * p - 1
    n = (l + 1) * (p - 1)
    ratio = Fraction(
        falling_factorial(n - 1, l), falling_factorial(n - 2, l)
    )
    mixing = p * l * (l + 1) * float(ratio)

    def moment(x: np.ndarray) -> np.ndarray:
        return x * a.derivative(l, x, strict=False) ** p

    def cross(x: np.ndarray) -> np.ndarray:
        return (
            a.derivative(l, x, strict=False) ** (p - 1)
            * a.derivative(l - 1, x, strict=False)
        )

    node_count = max(16, p * max(c.smoothness for c in a.components) + 2)
    first_moment = integrate_panels(
        moment, a.breakpoints, node_count=node_count
    ).value
    cross_integral = integrate_panels(
        cross, a.breakpoints, node_count=node_count
    ).value

    return gamma * first_moment + mixing * cross_integral
