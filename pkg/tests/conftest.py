import numpy as np
import pytest

from bethecont.trajectory import trajectory_energy


def pseudo_vacuum_moments(a):
    """Exact X_a = -delta_a0."""
    return np.where(np.asarray(a) == 0, -1.0, 0.0) + 0j


@pytest.fixture(scope="session")
def pv_moments():
    return pseudo_vacuum_moments


@pytest.fixture(scope="session")
def traj1_series():
    return trajectory_energy("traj1", 1.0, 14)


@pytest.fixture(scope="session")
def traj2_series():
    return trajectory_energy("traj2", 1.0, 7)
