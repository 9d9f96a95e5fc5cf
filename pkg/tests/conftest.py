import numpy as np
import pytest

from risloc import SystemConfig, UePosition


@pytest.fixture
def cfg():
    """Baseline setup: 8x8 surface, 8-antenna terminal, lambda/2 spacings."""
    return SystemConfig()


@pytest.fixture
def cfg_small():
    """Small geometry for brute-force-friendly tests."""
    return SystemConfig(n_y=2, n_z=4, k_ue=4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_position(cfg, rng, theta_max=1.2):
    """In-annulus UE draw used across test modules."""
    from risloc import near_field_bounds

    fresnel, rayleigh = near_field_bounds(cfg)
    return UePosition(rng.uniform(fresnel, rayleigh), rng.uniform(-theta_max, theta_max))
