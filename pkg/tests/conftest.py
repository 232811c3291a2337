"""Shared fixtures: small grids, a bump profile and smooth localized states."""

import numpy as np
import pytest

from src.charge_model.profile import make_profile
from src.grid_fields.grid import GridSpec
from src.grid_fields.random_fields import localized_solenoidal_field
from src.hamiltonian_core.state import Particle, State


@pytest.fixture
def grid():
    """Box of side 12 with 40 nodes per axis (h = 0.3)."""
    return GridSpec(L=12.0, N=40)


@pytest.fixture
def coarse_grid():
    """Box of side 10 with 16 nodes per axis, for time integration."""
    return GridSpec(L=10.0, N=16)


@pytest.fixture
def profile(grid):
    return make_profile(R_rho=2.0, Q=1.0, grid=grid)


@pytest.fixture
def particle(profile):
    return Particle(profile, m=1.3, I=0.7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def localized_state(grid, rng):
    """Random smooth divergence-free fields around the origin with nonzero momenta."""
    A = localized_solenoidal_field(grid, rng, envelope_radius=0.7, amplitude=0.5)
    Pi = localized_solenoidal_field(grid, rng, envelope_radius=0.7, amplitude=0.5)
    return State(A, Pi, np.zeros(3), np.array([0.3, -0.2, 0.1]), np.array([0.1, 0.25, -0.2]))


@pytest.fixture
def shifted_state(localized_state, grid):
    """The localized state with the particle moved to a grid node off the origin."""
    q = np.array([grid.h, -2 * grid.h, 0.0])
    Y = localized_state
    return State(Y.A, Y.Pi, q, Y.p, Y.pi)
