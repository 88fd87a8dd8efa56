import pytest

from wavetails.models.dimension import (
    DimensionError,
    DimensionIndex,
    get_dimension_index,
)


def test_dimension_index():
    dimension = DimensionIndex(2)

    assert dimension.l == 2
    assert dimension.d == 7


def test_dimension_index_rejects_three_dimensions():
    with pytest.raises(DimensionError, match="l >= 1"):
        DimensionIndex(0)


def test_dimension_index_rejects_non_integers():
    with pytest.raises(DimensionError):
        DimensionIndex(1.5)

    with pytest.raises(DimensionError):
        DimensionIndex(True)


def test_get_dimension_index():
    assert get_dimension_index(3) == 3
    assert get_dimension_index(DimensionIndex(1)) == 1

    with pytest.raises(DimensionError):
        get_dimension_index(-1)
