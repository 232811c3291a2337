"""Momentum map, angular and linear momenta in both the Hamiltonian and classical forms."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.comoving.rotations import field_deformation
from src.comoving.transform import ComovingState, to_comoving
from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import (
    centered_coordinate,
    cross,
    divergence,
    inner_product,
    integral,
    warn_if_near_seam,
)
from src.hamiltonian_core.hamiltonian import hamiltonian
from src.hamiltonian_core.physics import DerivedQuantities, derived_quantities
from src.hamiltonian_core.state import Particle, State
from src.momentum_map.star import angular_star_inner, grad_star_inner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvariantRecord:
    """Conserved quantities and constraint residuals at one observation time."""

    t: float
    H: float
    P: np.ndarray
    P_c: np.ndarray
    J: np.ndarray
    J_c: np.ndarray
    pi_norm: float
    div_A_max: float
    div_Pi_max: float
    gauss_residual: float


def relative_drift(
    records: Sequence[InvariantRecord], until: float | None = None
) -> dict[str, float]:
    """
    Largest |X(t) - X(0)| / |X(0)| of H, P and J over the records with t <= `until`.

    A vanishing initial value falls back to the absolute drift.
    """
    if not records:
        return {"H": 0.0, "P": 0.0, "J": 0.0}
    first = records[0]
    kept = [r for r in records if until is None or r.t <= until + 1e-12]
    drift = {}
    for name in ("H", "P", "J"):
        x0 = np.atleast_1d(getattr(first, name))
        scale = float(np.linalg.norm(x0)) or 1.0
        drift[name] = max(
            float(np.linalg.norm(np.atleast_1d(getattr(r, name)) - x0)) / scale for r in kept
        )
    return drift


def total_momentum(Y: State) -> np.ndarray:
    """P = p - <Pi, ∇_* A>."""
    return Y.p - grad_star_inner(Y.Pi, Y.A)


def j_xi(Yc: ComovingState, xi) -> float:
    """J_xi = <xi∧bA - ((xi∧y)·∇)bA, bPi> + (xi∧q)·P + xi·pi."""
    xi = np.asarray(xi, dtype=float)
    field_part = inner_product(field_deformation(xi, Yc.bA), Yc.bPi)
    return field_part + float(np.cross(xi, Yc.q) @ Yc.P) + float(xi @ Yc.pi)


def field_cross_integral(F: VectorField3, G: VectorField3) -> np.ndarray:
    """<F ∧ G> = integral of the pointwise cross product."""
    return integral(cross(F, G))


def angular_momentum(Yc: ComovingState) -> np.ndarray:
    """J = <bA∧bPi> - <(y∧∇)_* bA, bPi> + q∧P + pi."""
    warn_if_near_seam(Yc.bA, "comoving vector potential")
    return (
        field_cross_integral(Yc.bA, Yc.bPi)
        - angular_star_inner(Yc.bA, Yc.bPi)
        + np.cross(Yc.q, Yc.P)
        + Yc.pi
    )


def lab_angular_momentum(Y: State) -> np.ndarray:
    """The same J evaluated on lab-frame fields with the centred coordinate x - q."""
    P = total_momentum(Y)
    return (
        field_cross_integral(Y.A, Y.Pi)
        - angular_star_inner(Y.A, Y.Pi, Y.q)
        + np.cross(Y.q, P)
        + Y.pi
    )


def classical_invariants(
    Y: State, particle: Particle, derived: DerivedQuantities | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    P_c = ∫E∧B + m v and J_c = ∫x∧(E∧B) + I omega + q∧(m v), with x centred on the box.
    """
    d = derived if derived is not None else derived_quantities(Y, particle)
    warn_if_near_seam(d.B, "magnetic field")
    poynting = cross(d.E, d.B)
    x = centered_coordinate(Y.grid)
    mv = particle.m * d.v
    P_c = integral(poynting) + mv
    J_c = integral(cross(x, poynting)) + particle.I * d.omega + np.cross(Y.q, mv)
    return P_c, J_c


def background_correction(Y: State, particle: Particle) -> tuple[np.ndarray, np.ndarray]:
    """
    Neutralizing-background terms (rho_bar ∫A, rho_bar ∫x∧A).

    On the periodic box P_c = P - rho_bar ∫A and J_c = J - rho_bar ∫x∧A.
    """
    rho_bar = particle.profile.background_density
    x = centered_coordinate(Y.grid)
    return rho_bar * integral(Y.A), rho_bar * integral(cross(x, Y.A))


def pi_reading_discrepancy(Y: State, particle: Particle) -> dict[str, np.ndarray]:
    """Compare <(x-q)∧A, rho(x-q)> with the literal <(x-q)∧A, rho(x)> reading."""
    profile = particle.profile
    shifted = profile.moment_inner(Y.A, Y.q)
    y = centered_coordinate(Y.grid, Y.q)
    literal = integral(VectorField3(Y.grid, cross(y, Y.A).values * profile.rho.values[None]))
    return {"shifted": shifted, "literal": literal, "difference": shifted - literal}


def gauss_residual(Y: State, particle: Particle, derived: DerivedQuantities | None = None) -> float:
    """max |div E - (rho(x-q) - Q/L^3)|."""
    d = derived if derived is not None else derived_quantities(Y, particle)
    profile = particle.profile
    target = profile.shifted_density(Y.q) - profile.background_density
    return float(np.max(np.abs(divergence(d.E).values - target)))


class InvariantObserver:
    """Observer producing an InvariantRecord for each saved state."""

    def __init__(self, particle: Particle):
        self.particle = particle

    def __call__(self, t: float, Y: State) -> InvariantRecord:
        d = derived_quantities(Y, self.particle)
        P_c, J_c = classical_invariants(Y, self.particle, d)
        div_A, div_Pi = Y.max_divergence()
        return InvariantRecord(
            t=t,
            H=hamiltonian(Y, self.particle),
            P=total_momentum(Y),
            P_c=P_c,
            J=angular_momentum(to_comoving(Y)),
            J_c=J_c,
            pi_norm=float(np.linalg.norm(Y.pi)),
            div_A_max=div_A,
            div_Pi_max=div_Pi,
            gauss_residual=gauss_residual(Y, self.particle, d),
        )
