from dataclasses import dataclass

from wavetails.services.decorators import validate_assertions


class DimensionError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


@dataclass(frozen=True)
class DimensionIndex:
    """
    Index l of the odd spatial dimension d = 2l + 3.

    Attributes:
        l (int): Dimension index, at least 1 (d >= 5).
    """

    l: int

    def __post_init__(self) -> None:
        self.validate()

    @validate_assertions(exception=DimensionError)
    def validate(self) -> None:
        assert isinstance(self.l, int) and not isinstance(
            self.l, bool
        ), f"Dimension index must be an integer, got {self.l!r}"
        assert self.l >= 1, (
            f"Dimension index l = {self.l} is not supported; "
            "l >= 1 (d >= 5) is required"
        )

    @property
    def d(self) -> int:
        return 2 * self.l + 3


def get_dimension_index(l: "int | DimensionIndex") -> int:
    """
    Normalizes a dimension argument to a validated integer l.

    Args:
        l (int | DimensionIndex): Raw index or descriptor.

    Returns:
        int: The validated index.
    """
    if isinstance(l, DimensionIndex):
        return l.l

    return DimensionIndex(l).l
