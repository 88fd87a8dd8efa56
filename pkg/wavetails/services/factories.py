from wavetails.services.duhamel import DuhamelIntegrator, LightConeIntegrator

ITERATE_METHODS = ("interchanged", "light-cone")


def get_iterate_integrator_class(
    method: str,
) -> type[DuhamelIntegrator] | type[LightConeIntegrator]:
    """
    Returns the first-iterate integrator for a quadrature ordering.

    Args:
        method (str): "interchanged" (eta outermost, t > r + R only) or
            "light-cone" (xi outermost, any point).

    Returns:
        type: The integrator class.

    Raises:
        ValueError: If the method is not supported.

    Example:
        integrator_class = get_iterate_integrator_class("interchanged")
        integrator = integrator_class(a, l, term)
    """
    if method == "interchanged":
        return DuhamelIntegrator
    elif method == "light-cone":
        return LightConeIntegrator

    raise ValueError(f'Iterate method "{method}" not supported.')
