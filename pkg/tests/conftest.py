import numpy as np
import pytest

from sensornet import LinearFunctionSet, PriorBox


def two_sensor_demo_functions() -> LinearFunctionSet:
    """The worked two-function example: (2t1 + pi t2)/sqrt(4+pi^2) and (2t1 + t2)/sqrt(5)."""
    V = np.array(
        [
            [2.0 * np.sqrt(5.0), 2.0 * np.sqrt(4.0 + np.pi**2)],
            [np.pi * np.sqrt(5.0), np.sqrt(4.0 + np.pi**2)],
        ]
    ) / np.sqrt(20.0 + 5.0 * np.pi**2)
    return LinearFunctionSet(V=V, a=np.zeros(2), weights=np.array([0.5, 0.5]))


def demo_geometry() -> float:
    return (8.0 + 10.0 * np.pi + 2.0 * np.pi**2) / (20.0 + 5.0 * np.pi**2)


@pytest.fixture(scope="session")
def demo_functions() -> LinearFunctionSet:
    return two_sensor_demo_functions()


@pytest.fixture(scope="session")
def quarter_pi_prior() -> PriorBox:
    return PriorBox(
        center=np.array([np.pi / 4.0, np.pi / 4.0]),
        widths=np.array([np.pi / 2.0, np.pi / 2.0]),
    )
