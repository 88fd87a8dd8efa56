from typing import Callable, Optional

import numpy as np


def rk4th_ode_solver(
    variables: dict[str, np.ndarray],
    equation: Callable,
    d_t: float,
    compensation: Optional[dict[str, np.ndarray]] = None,
    **kwargs,
) -> tuple[np.ndarray, ...]:
    """
    Advances a system of ordinary differential equations by one step of the
    classic 4th order Runge-Kutta method.

    When a compensation dictionary is given, the update is accumulated with
    Kahan summation: the rounding error of each addition is kept in
    compensation (updated in place) and fed back on the next step. This
    keeps long integrations from drifting by one ulp per step.

    Args:
        variables (dict[str, np.ndarray]): Current values of the state
            variables, in the order the equation returns their derivatives.
        equation (Callable): A function that returns the derivatives of the
            variables as a tuple.
        d_t (float): The time step.
        compensation (dict[str, np.ndarray] | None): Running Kahan
            compensation per variable.
        **kwargs: Additional keyword arguments to be passed to the equation
            function.

    Returns:
        tuple[np.ndarray, ...]: The new values of the variables.

    """
    k_1 = equation(**variables, **kwargs)
    k_2 = equation(
        **{
            key: value + 0.5 * k_1[index] * d_t
            for index, (key, value) in enumerate(variables.items())
        },
        **kwargs,
    )
    k_3 = equation(
        **{
            key: value + 0.5 * k_2[index] * d_t
            for index, (key, value) in enumerate(variables.items())
        },
        **kwargs,
    )
    k_4 = equation(
        **{
            key: value + k_3[index] * d_t
            for index, (key, value) in enumerate(variables.items())
        },
        **kwargs,
    )

    new_values = []

    for index, (key, value) in enumerate(variables.items()):
        increment = (
            (1 / 6)
            * (k_1[index] + 2 * (k_2[index] + k_3[index]) + k_4[index])
            * d_t
        )

        if compensation is None:
            new_values.append(value + increment)
            continue

        corrected = increment - compensation[key]
        total = value + corrected
        compensation[key] = (total - value) - corrected
        new_values.append(total)

    return tuple(new_values)
