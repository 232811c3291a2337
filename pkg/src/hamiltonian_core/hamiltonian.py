"""Hamiltonian, its analytic gradient, the structural operator and the evolution field."""

from __future__ import annotations

import numpy as np

from src.charge_model.profile import antisymmetric_part
from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import (
    cross_const,
    curl,
    inner_product,
    leray_project,
    vector_laplacian,
)
from src.hamiltonian_core.state import (
    CotangentVector,
    Particle,
    PhaseVector,
    State,
    TangentVector,
    pairing,
)


def velocities(Y: State, particle: Particle) -> tuple[np.ndarray, np.ndarray]:
    """Mechanical velocity v and angular velocity omega obtained by inverting the momenta."""
    profile = particle.profile
    v = (Y.p - profile.charge_inner(Y.A, Y.q)) / particle.m
    omega = (Y.pi - profile.moment_inner(Y.A, Y.q)) / particle.I
    return v, omega


def hamiltonian(Y: State, particle: Particle) -> float:
    """Field energy plus the kinetic energies of translation and rotation."""
    particle.grid.check_same(Y.grid)
    B = curl(Y.A)
    v, omega = velocities(Y, particle)
    field_energy = 0.5 * inner_product(Y.Pi, Y.Pi) + 0.5 * inner_product(B, B)
    return field_energy + 0.5 * particle.m * float(v @ v) + 0.5 * particle.I * float(omega @ omega)


def coupling_current(
    Y: State, particle: Particle, v: np.ndarray, omega: np.ndarray
) -> VectorField3:
    """[v + omega ∧ (x - q)] rho(x - q), assembled from the shifted kernels."""
    profile = particle.profile
    rho_q = profile.shifted_density(Y.q)
    moments = VectorField3(Y.grid, profile.shifted_moments(Y.q))
    translation = VectorField3(Y.grid, np.asarray(v).reshape(3, 1, 1, 1) * rho_q[None])
    return translation + cross_const(omega, moments)


def position_derivatives(A: VectorField3, q, particle: Particle) -> tuple[np.ndarray, np.ndarray]:
    """
    Jacobians of the charge and torque pairings with respect to q.

    Returns arrays da[n, j] = d<A_j, rho(.-q)>/dq_n and db[n, k] = d<((x-q)∧A)_k, rho(.-q)>/dq_n.
    """
    profile = particle.profile
    h3 = A.grid.cell_volume
    grad_rho = profile.shifted_density_gradient(q)
    grad_moments = profile.shifted_moment_gradient(q)
    da = -np.einsum("nxyz,jxyz->nj", grad_rho, A.values) * h3
    pairs = -np.einsum("njxyz,mxyz->njm", grad_moments, A.values) * h3
    db = np.stack([antisymmetric_part(pairs[n]) for n in range(3)])
    return da, db


def grad_hamiltonian(Y: State, particle: Particle) -> CotangentVector:
    """
    Analytic gradient DH(Y) with the A block projected onto divergence-free fields.

    D_Pi H = Pi, D_p H = v, D_pi H = omega,
    D_A H = P(curl curl A - [v + omega ∧ (x-q)] rho(x-q)),
    D_q H = -(da/dq) v - (db/dq) omega.
    """
    particle.grid.check_same(Y.grid)
    v, omega = velocities(Y, particle)
    D_A = leray_project(curl(curl(Y.A)) - coupling_current(Y, particle, v, omega))
    da, db = position_derivatives(Y.A, Y.q, particle)
    D_q = -(da @ v) - (db @ omega)
    return CotangentVector(D_A, Y.Pi, D_q, v, omega)


def structural_apply(Y: PhaseVector, Z: PhaseVector) -> TangentVector:
    """Apply the block operator J(Y): (Z_Pi, -Z_A, Z_p, -Z_q, -pi ∧ Z_pi)."""
    return TangentVector(Z.Pi, -Z.A, Z.p, -Z.q, -np.cross(Y.pi, Z.pi))


def rhs(Y: State, particle: Particle) -> TangentVector:
    """Evolution field Ydot = J(Y) DH(Y)."""
    return structural_apply(Y, grad_hamiltonian(Y, particle))


def energy_rate(Y: State, particle: Particle) -> float:
    """<DH, J(Y) DH>, which vanishes by skew-symmetry."""
    grad = grad_hamiltonian(Y, particle)
    return pairing(grad, structural_apply(Y, grad))


def second_order_field_acceleration(Y: State, particle: Particle) -> VectorField3:
    """ΔA + P([v + omega ∧ (x-q)] rho(x-q)), the wave-equation form of Pi-dot."""
    v, omega = velocities(Y, particle)
    return vector_laplacian(Y.A) + leray_project(coupling_current(Y, particle, v, omega))


def implied_acceleration(Y: State, particle: Particle) -> tuple[np.ndarray, np.ndarray]:
    """(qddot, omegadot) obtained by differentiating v and omega along rhs(Y)."""
    profile = particle.profile
    Ydot = rhs(Y, particle)
    da, db = position_derivatives(Y.A, Y.q, particle)
    a_dot = profile.charge_inner(Ydot.A, Y.q) + Ydot.q @ da
    b_dot = profile.moment_inner(Ydot.A, Y.q) + Ydot.q @ db
    return (Ydot.p - a_dot) / particle.m, (Ydot.pi - b_dot) / particle.I
