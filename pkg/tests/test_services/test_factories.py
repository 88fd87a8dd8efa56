import pytest

from wavetails.services.duhamel import DuhamelIntegrator, LightConeIntegrator
from wavetails.services.factories import (
    ITERATE_METHODS,
    get_iterate_integrator_class,
)


def test_get_iterate_integrator_class():
    assert get_iterate_integrator_class("interchanged") is DuhamelIntegrator
    assert get_iterate_integrator_class("light-cone") is LightConeIntegrator
    assert ITERATE_METHODS == ("interchanged", "light-cone")


def test_get_iterate_integrator_class_rejects_unknown_methods():
    with pytest.raises(ValueError, match="not supported"):
        get_iterate_integrator_class("monte-carlo")
