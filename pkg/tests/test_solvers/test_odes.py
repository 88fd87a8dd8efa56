import numpy as np
import pytest

from wavetails.solvers.odes import rk4th_ode_solver


def decay(y, z, rate):
    return -rate * y, -2 * rate * z


@pytest.mark.parametrize("compensated", [False, True])
def test_rk4th_ode_solver_exponential_decay(compensated):
    variables = {"y": np.array([1.0]), "z": np.array([2.0])}
    compensation = (
        {"y": np.zeros(1), "z": np.zeros(1)} if compensated else None
    )

    for _ in range(100):
        y, z = rk4th_ode_solver(
            variables, decay, 0.01, compensation=compensation, rate=1.0
        )
        variables = {"y": y, "z": z}

    assert variables["y"][0] == pytest.approx(np.exp(-1.0), rel=1e-9)
    assert variables["z"][0] == pytest.approx(2 * np.exp(-2.0), rel=1e-8)


def test_rk4th_ode_solver_fourth_order():
    def run(steps):
        y = np.array([1.0])
        for _ in range(steps):
            (y,) = rk4th_ode_solver({"y": y}, lambda y: (-y,), 2.0 / steps)
        return abs(y[0] - np.exp(-2.0))

    assert np.log2(run(20) / run(40)) == pytest.approx(4.0, abs=0.2)
