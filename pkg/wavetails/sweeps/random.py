from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class RandomGenerator(ABC):
    """
    Abstract class for a seeded random number generator.

    Attributes:
        lower (float): Lower bound of the drawn values.
        upper (float): Upper bound of the drawn values.
        generator (np.random.Generator): Source of randomness, shared
            between parameters so that a single seed fixes a sweep.
    """

    lower: float
    upper: float
    generator: np.random.Generator = field(
        default_factory=np.random.default_rng, repr=False
    )

    def __post_init__(self) -> None:
        if self.upper < self.lower:
            raise ValueError(
                f"Upper bound {self.upper} is below lower bound {self.lower}."
            )

    @abstractmethod
    def get_value(self) -> float:
        """
        Gets a random value based on a probability distribution.

        Returns:
            Random value.
        """
        pass


@dataclass
class UniformRandomGenerator(RandomGenerator):
    """
    Uniform distribution on [lower, upper].
    """

    def get_value(self) -> float:
        return float(self.generator.uniform(low=self.lower, high=self.upper))


@dataclass
class LogUniformRandomGenerator(RandomGenerator):
    """
    Uniform distribution of ln(x) on [ln lower, ln upper]; both bounds must
    be positive.
    """

    def __post_init__(self) -> None:
        super().__post_init__()

        if self.lower <= 0:
            raise ValueError(
                "LogUniformRandomGenerator needs positive bounds."
            )

    def get_value(self) -> float:
        return float(
            np.exp(
                self.generator.uniform(
                    low=np.log(self.lower), high=np.log(self.upper)
                )
            )
        )


def get_random_generator(
    probability_distribution: str, *args, **kwargs
) -> RandomGenerator:
    """
    Gets a random generator based on a probability distribution.

    Args:
        probability_distribution (str): "uniform" or "log-uniform".
        *args: Additional arguments for the random generator constructor.
        **kwargs: Additional keyword arguments for the random generator
            constructor.

    Returns:
        RandomGenerator: An instance of the appropriate random generator.

    Raises:
        ValueError: If the specified probability distribution is not supported.
    """
    if probability_distribution == "uniform":
        return UniformRandomGenerator(*args, **kwargs)
    elif probability_distribution == "log-uniform":
        return LogUniformRandomGenerator(*args, **kwargs)

    raise ValueError(
        f'Probability distribution "{probability_distribution}" not supported.'
    )


@dataclass(frozen=True)
class IdentitySample:
    t: float
    r: float
    eta: float


class IdentitySampler:
    """
    Reproducible (t, r, eta) points for checking the light cone identity.

    r is drawn from [1, 5] and the gap t - eta - r from [1, 10], so every
    sample satisfies t - eta > r + 1. eta is drawn from [-2, 2].

    Args:
        seed (int | None): Seed of the numpy generator.
        distribution (str): Distribution of the radius and the gap.
    """

    def __init__(
        self, seed: Optional[int] = 0, distribution: str = "uniform"
    ) -> None:
        self.generator = np.random.default_rng(seed)
        self.radius = get_random_generator(
            distribution, 1.0, 5.0, generator=self.generator
        )
        self.gap = get_random_generator(
            distribution, 1.0, 10.0, generator=self.generator
        )
        self.eta = UniformRandomGenerator(-2.0, 2.0, self.generator)

    def sample(self) -> IdentitySample:
        r = self.radius.get_value()
        gap = self.gap.get_value()
        eta = self.eta.get_value()
        return IdentitySample(t=eta + r + gap, r=r, eta=eta)

    def samples(self, count: int) -> list[IdentitySample]:
        return [self.sample() for _ in range(count)]
