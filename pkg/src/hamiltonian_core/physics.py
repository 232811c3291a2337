"""Derived fields, the Lorentz force and torque, quasi-static initial fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.grid_fields.grid import GridSpec, ScalarField, VectorField3
from src.grid_fields.operators import (
    curl,
    directional_derivative,
    gradient,
    laplacian_inverse,
    leray_project,
)
from src.hamiltonian_core.hamiltonian import coupling_current, velocities
from src.hamiltonian_core.state import Particle, State


@dataclass(frozen=True)
class DerivedQuantities:
    """Velocities and fields recovered from a phase point."""

    v: np.ndarray
    omega: np.ndarray
    E: VectorField3
    B: VectorField3
    Phi: ScalarField


def derived_quantities(Y: State, particle: Particle) -> DerivedQuantities:
    v, omega = velocities(Y, particle)
    Phi = particle.profile.coulomb_potential(Y.q)
    B = curl(Y.A)
    E = -Y.Pi - gradient(Phi)
    return DerivedQuantities(v=v, omega=omega, E=E, B=B, Phi=Phi)


def lorentz_force_torque(
    Y: State, particle: Particle, derived: DerivedQuantities | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Force <E + w∧B, rho(x-q)> and torque <(x-q)∧[E + w∧B], rho(x-q)>,
    with w = v + omega∧(x-q).

    The w∧B terms are expanded so that every pairing is a shifted-kernel inner product.
    Only the transverse part -Pi of E enters: the Coulomb self-force and self-torque of
    the symmetric charge vanish.
    """
    profile = particle.profile
    d = derived if derived is not None else derived_quantities(Y, particle)
    v, omega = d.v, d.omega
    h3 = Y.grid.cell_volume
    transverse_E = -Y.Pi

    charge_B = profile.charge_inner(d.B, Y.q)
    pairs_B = profile.moment_pairs(d.B, Y.q)
    trace_B = float(np.trace(pairs_B))
    second = profile.shifted_second_moments(Y.q)
    quadrupole_B = np.einsum("ijxyz,jxyz->i", second, d.B.values) * h3

    force = (
        profile.charge_inner(transverse_E, Y.q)
        + np.cross(v, charge_B)
        + pairs_B @ omega
        - omega * trace_B
    )
    torque = (
        profile.moment_inner(transverse_E, Y.q)
        + v * trace_B
        - v @ pairs_B
        + np.cross(omega, quadrupole_B)
    )
    return force, torque


def soliton_guess(q, v, omega, particle: Particle) -> State:
    """
    Quasi-static fields of a particle at q moving with v and spinning with omega.

    A solves -ΔA = P([v + omega∧(x-q)] rho(x-q)) and Pi = -(v·∇)A; the momenta follow from
    the mechanical velocities. With v = 0 this is a stationary spinning solution.
    """
    grid: GridSpec = particle.grid
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    at_q = State.zeros(grid)
    at_q = State(at_q.A, at_q.Pi, q, at_q.p, at_q.pi)
    source = leray_project(coupling_current(at_q, particle, v, omega))
    A = -VectorField3.from_components(
        *(laplacian_inverse(source.component(j)) for j in range(3))
    )
    velocity_field = VectorField3.constant(grid, v)
    Pi = -directional_derivative(velocity_field, A)
    profile = particle.profile
    p = particle.m * v + profile.charge_inner(A, q)
    pi = particle.I * omega + profile.moment_inner(A, q)
    return State(A, Pi, q, p, pi)
