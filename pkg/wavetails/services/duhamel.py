"""
Direct quadrature of the first iterate of the small-amplitude expansion.

The first iterate solves box(phi) = S with zero data, where S is the
nonlinearity evaluated on the free wave. In null coordinates eta = tau - rho,
xi = tau + rho its Duhamel representation is

    phi(t, r) = 1 / (2^(l+3) r^(l+1))
                * int dxi int deta (xi - eta)^(l+1) P_l(mu) S(eta, xi),

    mu = (r^2 + (xi - t)(t - eta)) / (r (xi - eta)).
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from wavetails.models.dimension import get_dimension_index
from wavetails.models.nonlinearity import NonlinearityTerm
from wavetails.models.profiles import GeneratingFunction
from wavetails.services.freewave import (
    evaluate_free_wave,
    get_free_wave_coefficients,
    null_tail_coefficient,
)
from wavetails.services.math.quadrature import (
    QuadratureError,
    gauss_legendre,
    get_panel_edges,
    integrate_adaptive,
)
from wavetails.services.math.special import (
    binomial,
    double_factorial_odd,
    falling_factorial,
    hyp2f1_terminating,
    legendre,
)

logger = logging.getLogger(__name__)

# |dQ| below this share of the integral of |integrand| is rounding
MAGNITUDE_FLOOR = 1e-14


class DuhamelError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class DuhamelValue:
    """
    Attributes:
        value (float): The iterate at (t, r).
        magnitude (float): Same integral with |integrand|; the scale that
            rounding in value is measured against.
        subdivisions (int): Panel subdivisions at convergence.
    """

    value: float
    magnitude: float
    subdivisions: int


def get_light_cone_cosine(
    t: float, r: float, eta: np.ndarray, xi: np.ndarray
) -> np.ndarray:
    return (r**2 + (xi - t) * (t - eta)) / (r * (xi - eta))


class _IterateIntegrator(ABC):
    """Shared source evaluation and refinement loop."""

    def __init__(
        self,
        a: GeneratingFunction,
        l: int,
        term: NonlinearityTerm,
        part: str,
        rel_tol: float,
        node_count: int,
        max_doublings: int,
    ) -> None:
        self.a = a
        self.l = get_dimension_index(l)
        self.term = term
        self.part = part
        self.rel_tol = rel_tol
        self.rule = gauss_legendre(node_count)
        self.max_doublings = max_doublings

    def get_source(self, eta: np.ndarray, xi: np.ndarray) -> np.ndarray:
        tau = 0.5 * (eta + xi)
        rho = 0.5 * (xi - eta)
        phi, phi_t, phi_r = evaluate_free_wave(
            self.a, self.l, tau, rho, part=self.part
        )
        return self.term.evaluate(phi, phi_t, phi_r)

    def get_integrand(
        self, t: float, r: float, eta: np.ndarray, xi: np.ndarray
    ) -> np.ndarray:
        mu = get_light_cone_cosine(t, r, eta, xi)
        return (
            (xi - eta) ** (self.l + 1)
            * legendre(self.l, mu)
            * self.get_source(eta, xi)
        )

    @abstractmethod
    def get_estimate(
        self, t: float, r: float, subdivisions: int
    ) -> tuple[float, float]:
        """Integral and integral of |integrand| at a refinement level."""
        pass

    def evaluate(self, t: float, r: float) -> DuhamelValue:
        self.validate_point(t, r)
        prefactor = 1.0 / (2 ** (self.l + 3) * r ** (self.l + 1))

        subdivisions = 1
        previous, _ = self.get_estimate(t, r, subdivisions)

        for _ in range(self.max_doublings):
            subdivisions *= 2
            current, magnitude = self.get_estimate(t, r, subdivisions)
            change = abs(current - previous)

            if (
                change <= self.rel_tol * abs(current)
                or change <= MAGNITUDE_FLOOR * magnitude
            ):
                return DuhamelValue(
                    prefactor * current, prefactor * magnitude, subdivisions
                )

            previous = current

        raise QuadratureError(
            f"Duhamel quadrature at (t={t}, r={r}) did not converge: "
            f"last change {change:.3e} against value {current:.3e}"
        )

    def validate_point(self, t: float, r: float) -> None:
        if r <= 0:
            raise DuhamelError(f"The observer radius must be positive: {r}")


class DuhamelIntegrator(_IterateIntegrator):
    """
    First iterate with the eta integral outermost.

    For t > r + R only the outgoing part of the free wave reaches the past
    light cone, eta runs over the support of a and xi over [t - r, t + r],
    so the domain is a rectangle and a tensor-product Gauss rule applies.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial generating the source.
        rel_tol (float): Relative tolerance between refinements.
        node_count (int): Gauss nodes per panel in each direction.
        max_doublings (int): Refinement limit.
    """

    def __init__(
        self,
        a: GeneratingFunction,
        l: int,
        term: NonlinearityTerm,
        rel_tol: float = 1e-9,
        node_count: int = 16,
        max_doublings: int = 7,
    ) -> None:
        super().__init__(
            a, l, term, "retarded", rel_tol, node_count, max_doublings
        )

    def validate_point(self, t: float, r: float) -> None:
        super().validate_point(t, r)

        if t <= r + self.a.radius:
            raise DuhamelError(
                f"t = {t} must exceed r + R = {r + self.a.radius}; the "
                "ingoing part of the free wave cannot be dropped earlier"
            )

    def get_estimate(
        self, t: float, r: float, subdivisions: int
    ) -> tuple[float, float]:
        eta_lower, eta_upper = get_panel_edges(
            self.a.breakpoints, subdivisions
        )
        xi_lower, xi_upper = get_panel_edges([t - r, t + r], subdivisions)
        eta, eta_weights = self.rule.scaled(eta_lower, eta_upper)
        xi, xi_weights = self.rule.scaled(xi_lower, xi_upper)

        eta_grid, xi_grid = np.meshgrid(
            eta.ravel(), xi.ravel(), indexing="ij"
        )
        weights = np.outer(eta_weights.ravel(), xi_weights.ravel())
        values = weights * self.get_integrand(t, r, eta_grid, xi_grid)

        return math.fsum(values.ravel()), float(np.sum(np.abs(values)))


class LightConeIntegrator(_IterateIntegrator):
    """
    First iterate over the full past light cone, xi outermost.

    xi runs over [|t - r|, t + r] and eta over [-xi, t - r], with the
    source built from the selected part of the free wave. With the full
    wave this is the first iterate of the initial value problem at any
    (t, r). The xi panels are graded geometrically away from |t - r| so
    long light cones stay cheap.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial generating the source.
        part (str): Free wave part used in the source.
        rel_tol (float): Relative tolerance between refinements.
        node_count (int): Gauss nodes per panel in each direction.
        max_doublings (int): Refinement limit.
        grading (float): Width of the first geometric xi panel.
    """

    def __init__(
        self,
        a: GeneratingFunction,
        l: int,
        term: NonlinearityTerm,
        part: str = "both",
        rel_tol: float = 1e-9,
        node_count: int = 16,
        max_doublings: int = 6,
        grading: float = 0.5,
    ) -> None:
        super().__init__(a, l, term, part, rel_tol, node_count, max_doublings)
        self.grading = grading

    def validate_point(self, t: float, r: float) -> None:
        super().validate_point(t, r)

        lower, upper = self.a.support
        if self.part != "both" and t >= r and lower < t - r < upper:
            raise DuhamelError(
                f"The {self.part} source is singular at the light cone "
                f"vertex u = {t - r} inside the support"
            )

    def get_xi_breakpoints(self, t: float, r: float) -> np.ndarray:
        xi_lower, xi_upper = abs(t - r), t + r
        points = [xi_lower, xi_upper]
        points.extend(
            b for b in self.a.breakpoints if xi_lower < b < xi_upper
        )

        step = self.grading
        while xi_lower + step < xi_upper:
            points.append(xi_lower + step)
            step *= 2

        return np.unique(np.asarray(points, dtype=float))

    def get_eta_segments(
        self, xi: float, u: float
    ) -> list[tuple[float, float]]:
        lower, upper = self.a.support
        ingoing_active = self.part != "retarded" and lower < xi < upper

        if ingoing_active:
            start, stop = -xi, u
        elif self.part == "advanced":
            return []
        else:
            start, stop = max(-xi, lower), min(u, upper)

        if stop <= start:
            return []

        points = [start, stop]
        points.extend(b for b in self.a.breakpoints if start < b < stop)
        points = sorted(set(points))

        return list(zip(points[:-1], points[1:]))

    def get_estimate(
        self, t: float, r: float, subdivisions: int
    ) -> tuple[float, float]:
        u = t - r
        xi_lower, xi_upper = get_panel_edges(
            self.get_xi_breakpoints(t, r), subdivisions
        )
        xi_nodes, xi_weights = self.rule.scaled(xi_lower, xi_upper)

        segment_lower = []
        segment_upper = []
        segment_xi = []
        segment_weight = []

        for xi, xi_weight in zip(xi_nodes.ravel(), xi_weights.ravel()):
            for start, stop in self.get_eta_segments(xi, u):
                edges = np.linspace(start, stop, subdivisions + 1)
                segment_lower.extend(edges[:-1])
                segment_upper.extend(edges[1:])
                segment_xi.extend([xi] * subdivisions)
                segment_weight.extend([xi_weight] * subdivisions)

        if not segment_lower:
            return 0.0, 0.0

        eta, eta_weights = self.rule.scaled(
            np.asarray(segment_lower), np.asarray(segment_upper)
        )
        xi_grid = np.asarray(segment_xi)[:, np.newaxis] * np.ones_like(eta)
        weights = eta_weights * np.asarray(segment_weight)[:, np.newaxis]
        values = weights * self.get_integrand(t, r, eta, xi_grid)

        return math.fsum(values.ravel()), float(np.sum(np.abs(values)))


def first_order_iterate(
    a: GeneratingFunction,
    l: int,
    term: NonlinearityTerm,
    t: float,
    r: float,
    rel_tol: float = 1e-9,
) -> float:
    """
    First iterate phi_{p+q-1}(t, r) for t > r + R, eta integral outermost.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial generating the source.
        t (float): Time, above r + R.
        r (float): Radius, positive.
        rel_tol (float): Relative tolerance.

    Returns:
        float: The iterate, including the coefficient c of the term.
    """
    return DuhamelIntegrator(a, l, term, rel_tol=rel_tol).evaluate(t, r).value


def duhamel_iterate(
    a: GeneratingFunction,
    l: int,
    term: NonlinearityTerm,
    t: float,
    r: float,
    part: str = "both",
    rel_tol: float = 1e-9,
) -> float:
    """
    First iterate from the full light cone integral, xi outermost.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        term (NonlinearityTerm): Monomial generating the source.
        t (float): Time.
        r (float): Radius, positive.
        part (str): Free wave part used in the source.
        rel_tol (float): Relative tolerance.

    Returns:
        float: The iterate.
    """
    integrator = LightConeIntegrator(a, l, term, part=part, rel_tol=rel_tol)
    return integrator.evaluate(t, r).value


@dataclass(frozen=True)
class MasterIdentityCheck:
    """
    The light cone integral of P_l(mu) / (xi - eta)^n three ways, plus its
    large-t form.

    Attributes:
        lhs (float): Adaptive quadrature.
        rhs_closed (float): Hypergeometric closed form.
        rhs_series (float): Finite sum before it is written as a
            hypergeometric function.
        rhs_expansion (float): Two-term large-t form.
        rel_err (float): |lhs / rhs_closed - 1|.
        rel_err_series (float): |rhs_series / rhs_closed - 1|.
        rel_err_expansion (float): |lhs / rhs_expansion - 1|, infinite
            where the two-term form vanishes.
    """

    lhs: float
    rhs_closed: float
    rhs_series: float
    rhs_expansion: float
    rel_err: float
    rel_err_series: float
    rel_err_expansion: float


def verify_master_identity(
    l: int, n: int, t: float, r: float, eta: float
) -> MasterIdentityCheck:
    """
    Checks the closed form of int_{t-r}^{t+r} P_l(mu) / (xi - eta)^n dxi.

    Args:
        l (int): Dimension index.
        n (int): Power, at least l + 2.
        t (float): Time.
        r (float): Radius, with t - eta > r > 0.
        eta (float): Retarded time of the source point.

    Returns:
        MasterIdentityCheck: All evaluations and their relative errors.
    """
    l = get_dimension_index(l)

    if n < l + 2:
        raise DuhamelError(f"n = {n} must be at least l + 2 = {l + 2}")

    if not t - eta > r > 0:
        raise DuhamelError(
            f"Need t - eta > r > 0, got t={t}, r={r}, eta={eta}"
        )

    def integrand(xi: np.ndarray) -> np.ndarray:
        mu = get_light_cone_cosine(t, r, eta, xi)
        return legendre(l, mu) / (xi - eta) ** n

    lhs = integrate_adaptive(integrand, t - r, t + r, rel_tol=1e-14).value

    distance = t - eta
    z = (r / distance) ** 2
    sign = (-1) ** l
    double_factorial = double_factorial_odd(l)
    leading = 2 * falling_factorial(n - 2, l) / double_factorial

    common = (
        sign
        * r ** (l + 1)
        * distance ** (n - l - 2)
        / (distance**2 - r**2) ** (n - 1)
    )
    rhs_closed = (
        common
        * leading
        * hyp2f1_terminating(
            (l + 2 - n) / 2, (l + 3 - n) / 2, l + 1.5, z
        )
    )

    series_terms = []
    m = 0
    while l + 2 * m <= n - 2:
        series_terms.append(
            2.0 ** (1 - m)
            * binomial(n - 2, l + 2 * m)
            * math.factorial(l + 2 * m)
            / (math.factorial(m) * double_factorial_odd(l + m))
            * z**m
        )
        m += 1
    rhs_series = common * math.fsum(series_terms)

    rhs_expansion = (
        sign * leading * r ** (l + 1) / t ** (l + n) * (1 + (l + n) * eta / t)
    )

    rel_err_expansion = math.inf
    if rhs_expansion != 0:
        rel_err_expansion = abs(lhs / rhs_expansion - 1)

    return MasterIdentityCheck(
        lhs=lhs,
        rhs_closed=rhs_closed,
        rhs_series=rhs_series,
        rhs_expansion=rhs_expansion,
        rel_err=abs(lhs / rhs_closed - 1),
        rel_err_series=abs(rhs_series / rhs_closed - 1),
        rel_err_expansion=rel_err_expansion,
    )


@dataclass(frozen=True)
class NullExpansionCheck:
    """
    Attributes:
        extracted_coefficient (float): Coefficient of (v - u)^-(2l+1) in
            the first iterate, free part removed.
        h_of_u (float): Closed-form h(u).
        rel_err (float): Relative difference (absolute when h(u) = 0).
        coefficients (dict[int, float]): Fitted coefficients B_j at u.
    """

    extracted_coefficient: float
    h_of_u: float
    rel_err: float
    coefficients: dict = field(default_factory=dict)


def fit_null_coefficients(
    values: Sequence[float],
    distances: Sequence[float],
    powers: Sequence[int],
    max_condition: float = 1e10,
) -> dict[int, float]:
    """
    Least-squares fit of values = sum_j B_j * distance^-j.

    Columns are normalized before solving; an ill-conditioned design
    raises instead of returning noise.
    """
    distances = np.asarray(distances, dtype=float)
    reference = distances[0]
    design = np.column_stack(
        [(distances / reference) ** (-j) for j in powers]
    )
    norms = np.linalg.norm(design, axis=0)
    design = design / norms

    if np.linalg.cond(design) > max_condition:
        raise DuhamelError(
            "The v samples do not separate the fitted powers; spread them "
            "over a wider range"
        )

    solution, *_ = np.linalg.lstsq(
        design, np.asarray(values, dtype=float), rcond=None
    )

    return {
        j: float(solution[i] / norms[i] * reference**j)
        for i, j in enumerate(powers)
    }


def phi1_null_expansion_check(
    a: GeneratingFunction,
    l: int,
    u: float,
    v_samples: Sequence[float],
    rel_tol: float = 1e-10,
    node_count: int = 8,
) -> NullExpansionCheck:
    """
    Extracts h(u) from the first iterate of the quadratic equation.

    At fixed u the iterate is fitted as sum_j B_j(u) (v - u)^-j for
    j = l+1..2l+2. The free part of the iterate is an outgoing wave
    b(u); it puts 2^(l+1) c_k b^(k)(u) at j = 2l+1-k, so its share of
    B_{2l+1} is (c_0/c_1) * integral_{-inf}^{u} B_{2l}(x) dx with
    c_0/c_1 = 2. That integral is evaluated by Gauss quadrature over
    [inf supp a, u] from fits at the nodes, and subtracted.

    Args:
        a (GeneratingFunction): Profile.
        l (int): Dimension index.
        u (float): Retarded time.
        v_samples (Sequence[float]): Increasing advanced times, v >> u, at
            least l + 2 of them.
        rel_tol (float): Tolerance of each light cone integral.
        node_count (int): Gauss nodes per panel of the u-integral.

    Returns:
        NullExpansionCheck: Extracted coefficient against h(u).
    """
    l = get_dimension_index(l)
    v_samples = np.asarray(v_samples, dtype=float)
    powers = list(range(l + 1, 2 * l + 3))
    lower = a.support[0]

    if v_samples.size < len(powers):
        raise DuhamelError(
            f"At least {len(powers)} v samples are needed for l = {l}"
        )

    if np.any(np.diff(v_samples) <= 0) or v_samples[0] <= u:
        raise DuhamelError("v samples must increase and exceed u")

    h_of_u = null_tail_coefficient(a, l, u)

    if u <= lower:
        return NullExpansionCheck(0.0, h_of_u, abs(h_of_u))

    integrator = LightConeIntegrator(
        a, l, NonlinearityTerm(c=1.0, p=2), part="both", rel_tol=rel_tol
    )

    def fit_at(x: float) -> dict[int, float]:
        values = [
            integrator.evaluate(0.5 * (x + v), 0.5 * (v - x)).value
            for v in v_samples
        ]
        return fit_null_coefficients(values, v_samples - x, powers)

    coefficients = fit_at(u)

    breakpoints = [b for b in a.breakpoints if lower < b < u]
    breakpoints = np.asarray([lower, *breakpoints, u], dtype=float)
    rule = gauss_legendre(node_count)
    x_nodes, x_weights = rule.scaled(breakpoints[:-1], breakpoints[1:])
    free_integral = math.fsum(
        weight * fit_at(x)[2 * l]
        for x, weight in zip(x_nodes.ravel(), x_weights.ravel())
    )

    c = get_free_wave_coefficients(l)
    extracted = coefficients[2 * l + 1] - c[0] / c[1] * free_integral
    logger.debug(
        "Null expansion at u=%g: B_%d=%g, free share=%g, h=%g",
        u,
        2 * l + 1,
        coefficients[2 * l + 1],
        c[0] / c[1] * free_integral,
        h_of_u,
    )

    if h_of_u == 0:
        rel_err = abs(extracted)
    else:
        rel_err = abs(extracted / h_of_u - 1)

    return NullExpansionCheck(extracted, h_of_u, rel_err, coefficients)
