"""Canonical transformation to the comoving frame and the comoving Hamiltonian."""

from __future__ import annotations

import numpy as np

from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import (
    cross_const,
    curl,
    directional_derivative,
    inner_product,
    leray_project,
    shift,
)
from src.hamiltonian_core.hamiltonian import structural_apply
from src.hamiltonian_core.state import (
    CotangentVector,
    Particle,
    PhaseVector,
    State,
    TangentVector,
)
from src.momentum_map.star import grad_star_inner

_ORIGIN = (0.0, 0.0, 0.0)


class ComovingState(PhaseVector):
    """
    Phase point (bA, bPi, q, P, pi) with fields recentred at the particle:
    bA(y) = A(q + y), bPi(y) = Pi(q + y), and P the total momentum.
    """

    @property
    def bA(self) -> VectorField3:
        return self.A

    @property
    def bPi(self) -> VectorField3:
        return self.Pi

    @property
    def P(self) -> np.ndarray:
        return self.p


def to_comoving(Y: State) -> ComovingState:
    bA = shift(Y.A, -Y.q)
    bPi = shift(Y.Pi, -Y.q)
    P = Y.p - grad_star_inner(bPi, bA)
    return ComovingState(bA, bPi, Y.q, P, Y.pi)


def from_comoving(Yc: ComovingState) -> State:
    p = Yc.P + grad_star_inner(Yc.bPi, Yc.bA)
    return State(shift(Yc.bA, Yc.q), shift(Yc.bPi, Yc.q), Yc.q, p, Yc.pi)


def comoving_velocities(Yc: ComovingState, particle: Particle) -> tuple[np.ndarray, np.ndarray]:
    """V = (P + <bPi, ∇_* bA> - <bA, rho>)/m and W = (pi - <y ∧ bA, rho>)/I."""
    profile = particle.profile
    V = (Yc.P + grad_star_inner(Yc.bPi, Yc.bA) - profile.charge_inner(Yc.bA, _ORIGIN)) / particle.m
    W = (Yc.pi - profile.moment_inner(Yc.bA, _ORIGIN)) / particle.I
    return V, W


def comoving_hamiltonian(Yc: ComovingState, particle: Particle) -> float:
    particle.grid.check_same(Yc.grid)
    B = curl(Yc.bA)
    V, W = comoving_velocities(Yc, particle)
    field_energy = 0.5 * inner_product(Yc.bPi, Yc.bPi) + 0.5 * inner_product(B, B)
    return field_energy + 0.5 * particle.m * float(V @ V) + 0.5 * particle.I * float(W @ W)


def comoving_grad_hamiltonian(Yc: ComovingState, particle: Particle) -> CotangentVector:
    """
    Analytic gradient of the comoving Hamiltonian; field blocks are Leray-projected.

    D_bPi = Pi + (V·∇)bA, D_bA = curl curl bA - (V·∇)bPi - V rho - W ∧ (y rho),
    D_q = 0, D_P = V, D_pi = W.
    """
    grid = Yc.grid
    profile = particle.profile
    V, W = comoving_velocities(Yc, particle)
    transport = VectorField3.constant(grid, V)
    rho = profile.rho.values
    D_bPi = leray_project(Yc.bPi + directional_derivative(transport, Yc.bA))
    D_bA = leray_project(
        curl(curl(Yc.bA))
        - directional_derivative(transport, Yc.bPi)
        - VectorField3(grid, V.reshape(3, 1, 1, 1) * rho[None])
        - cross_const(W, profile.moment_kernels)
    )
    return CotangentVector(D_bA, D_bPi, np.zeros(3), V, W)


def comoving_rhs(Yc: ComovingState, particle: Particle) -> TangentVector:
    return structural_apply(Yc, comoving_grad_hamiltonian(Yc, particle))
