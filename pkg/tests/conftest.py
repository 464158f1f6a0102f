"""
Pytest configuration and fixtures for planar_beltrami tests.
"""

import numpy as np
import pytest
from scipy.stats import qmc

from planar_beltrami.beltrami import ScalarBasisElement, b3_basis
from planar_beltrami.config import set_settings
from planar_beltrami.formal_powers import FormalPowerBasis
from planar_beltrami.profile import AlphaProfile, GeneratingFunction, generating_function
from planar_beltrami.vekua import ProbeGrid


@pytest.fixture(autouse=True)
def reset_settings():
    """Drop the cached SolverSettings so environment changes never leak between tests."""
    set_settings(None)
    yield
    set_settings(None)


@pytest.fixture(scope="session")
def example_alpha() -> AlphaProfile:
    """alpha = 1/sqrt(1 - y^2) on [-0.95, 0.95]."""
    return AlphaProfile.inverse_sqrt()


@pytest.fixture(scope="session")
def example_g(example_alpha) -> GeneratingFunction:
    """f0 = (1 - y^2)^(3/4): c1 = 0, c2 = 1, y_ref = 0."""
    return generating_function(example_alpha, 0.0, 1.0, y_ref=0.0)


@pytest.fixture(scope="session")
def example_elements(example_alpha, example_g) -> list[ScalarBasisElement]:
    """Example basis up to n = 10 around z0 = 0."""
    return b3_basis(example_alpha, example_g, 0j, 10)


@pytest.fixture(scope="session")
def example_powers(example_elements) -> FormalPowerBasis:
    return example_elements[0].powers


@pytest.fixture(scope="session")
def example_grid() -> ProbeGrid:
    """|x|, |y| <= 0.9."""
    return ProbeGrid.rectangle((-0.9, 0.9, 13), (-0.9, 0.9, 13))


@pytest.fixture(scope="session")
def disk_points() -> tuple[np.ndarray, np.ndarray]:
    """200 quasi-random points in the disk |z| <= 0.9."""
    sample = qmc.Halton(d=2, scramble=False).random(200)
    r = 0.9 * np.sqrt(sample[:, 0])
    theta = 2.0 * np.pi * sample[:, 1]
    return r * np.cos(theta), r * np.sin(theta)


@pytest.fixture(scope="session")
def constant_alpha() -> AlphaProfile:
    """alpha = 2 on [0, 1.5]."""
    return AlphaProfile.constant(2.0, (0.0, 1.5))


@pytest.fixture(scope="session")
def constant_g(constant_alpha) -> GeneratingFunction:
    """f0 = sin(2y)/sqrt(2), positive on (0, pi/2), anchored at y = 0.75."""
    return generating_function(constant_alpha, 1.0, 0.0, y_ref=0.0, anchor=0.75)


@pytest.fixture
def example_run_dict() -> dict:
    """Run configuration of the inverse square-root profile."""
    return {
        "profile": {
            "alpha": {"preset": "example_inv_sqrt"},
            "domain": [-0.95, 0.95],
            "c1": 0.0,
            "c2": 1.0,
            "y_ref": 0.0,
        },
        "z0": [0.0, 0.0],
        "n_max": 3,
        "grid": {"x": [-0.8, 0.8, 9], "y": [-0.8, 0.8, 9]},
    }


@pytest.fixture
def constant_run_dict() -> dict:
    """Run configuration of alpha = 2 with c1 = 1, c2 = 0."""
    return {
        "profile": {
            "alpha": {"preset": "constant", "k": 2.0},
            "domain": [0.0, 1.5],
            "c1": 1.0,
            "c2": 0.0,
            "y_ref": 0.0,
        },
        "z0": [0.0, 0.75],
        "n_max": 4,
        "grid": {"x": [-0.4, 0.4, 9], "y": [0.35, 1.15, 9]},
    }
