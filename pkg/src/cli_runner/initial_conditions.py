"""Initial phase points built from a SimConfig."""

from __future__ import annotations

import logging

import numpy as np

from src.cli_runner.config import SimConfig
from src.grid_fields.grid import ScalarField, VectorField3
from src.grid_fields.operators import centered_coordinate, gradient
from src.grid_fields.random_fields import localized_solenoidal_field
from src.hamiltonian_core.physics import soliton_guess
from src.hamiltonian_core.state import Particle, State

logger = logging.getLogger(__name__)


def gauge_gradient(cfg: SimConfig, particle: Particle) -> VectorField3:
    """∇ of a unit Gaussian centred at q0, used to break the Coulomb gauge on purpose."""
    grid = particle.grid
    y = centered_coordinate(grid, cfg.particle.q0).values / cfg.fields.envelope_radius
    bump = ScalarField(grid, np.exp(-0.5 * np.sum(y**2, axis=0)))
    return gradient(bump)


def initial_state(cfg: SimConfig, particle: Particle) -> State:
    """
    Build Y(0) for the configured initial condition.

    "zero" leaves the fields empty, "random-localized" draws smooth divergence-free
    fields around q0 from the seeded generator, and "soliton-guess" reads p0/m and
    pi0/I as the particle's velocity and angular velocity and dresses them with their
    quasi-static fields.
    """
    grid = particle.grid
    fields = cfg.fields
    q0 = np.asarray(cfg.particle.q0, dtype=float)
    p0 = np.asarray(cfg.particle.p0, dtype=float)
    pi0 = np.asarray(cfg.particle.pi0, dtype=float)

    if fields.initial == "zero":
        Y = State(VectorField3.zeros(grid), VectorField3.zeros(grid), q0, p0, pi0)
    elif fields.initial == "soliton-guess":
        Y = soliton_guess(q0, p0 / particle.m, pi0 / particle.I, particle)
    else:
        rng = np.random.default_rng(fields.seed)
        A = localized_solenoidal_field(grid, rng, fields.envelope_radius, fields.amplitude, q0)
        Pi = localized_solenoidal_field(grid, rng, fields.envelope_radius, fields.amplitude, q0)
        Y = State(A, Pi, q0, p0, pi0)

    if fields.gauge_perturbation:
        A = Y.A + fields.gauge_perturbation * gauge_gradient(cfg, particle)
        Y = State(A, Y.Pi, Y.q, Y.p, Y.pi)
        logger.warning("Initial A carries a gradient of strength %g", fields.gauge_perturbation)

    logger.info("Initial state: %s (seed %d)", fields.initial, fields.seed)
    return Y
