"""
Residual checks for the Hamiltonian structure, the momentum map and the classical invariants.

Every check returns a ResidualReport of relative residuals. Tolerances live with the
caller (see cli_runner.config.CheckTolerances).
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.comoving.rotations import (
    cubic_rotations,
    deformation_field,
    field_deformation,
    rotate_state,
)
from src.comoving.transform import (
    ComovingState,
    comoving_grad_hamiltonian,
    comoving_hamiltonian,
    comoving_rhs,
    comoving_velocities,
    from_comoving,
    to_comoving,
)
from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import (
    centered_coordinate,
    cross,
    cross_const,
    directional_derivative,
    integral,
    jacobian,
    laplacian,
)
from src.grid_fields.random_fields import localized_solenoidal_field
from src.hamiltonian_core.hamiltonian import (
    energy_rate,
    grad_hamiltonian,
    hamiltonian,
    implied_acceleration,
    rhs,
    second_order_field_acceleration,
    structural_apply,
    velocities,
)
from src.hamiltonian_core.physics import derived_quantities, lorentz_force_torque
from src.hamiltonian_core.state import (
    CotangentVector,
    Particle,
    PhaseVector,
    State,
    TangentVector,
    pairing,
)
from src.momentum_map.invariants import (
    angular_momentum,
    background_correction,
    classical_invariants,
    gauss_residual,
    j_xi,
    pi_reading_discrepancy,
    total_momentum,
)
from src.momentum_map.star import grad_star_inner

logger = logging.getLogger(__name__)

FD_STEPS: tuple[float, ...] = (1e-4, 1e-5, 1e-6, 1e-7)
UNIT_AXES: tuple[np.ndarray, ...] = tuple(np.eye(3))
_BLOCKS = ("A", "Pi", "q", "p", "pi")


@dataclass(frozen=True)
class ResidualReport:
    """Named relative residuals of one identity."""

    name: str
    residuals: dict[str, float] = field(default_factory=dict)
    info: dict[str, float] = field(default_factory=dict)

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tolerance: float) -> bool:
        return self.worst <= tolerance


def _relative(error, scale) -> float:
    error = float(np.linalg.norm(np.ravel(error)))
    scale = float(np.linalg.norm(np.ravel(scale)))
    return error / scale if scale > 0 else error


def random_direction(
    grid_source: PhaseVector, rng: np.random.Generator, envelope_radius: float = 1.0
) -> TangentVector:
    """Random tangent vector with smooth localized divergence-free field blocks."""
    grid = grid_source.grid
    return TangentVector(
        localized_solenoidal_field(grid, rng, envelope_radius),
        localized_solenoidal_field(grid, rng, envelope_radius),
        rng.standard_normal(3),
        rng.standard_normal(3),
        rng.standard_normal(3),
    )


def _only_block(Z: TangentVector, block: str) -> TangentVector:
    zero = TangentVector.zeros(Z.grid)
    parts = {name: getattr(zero, name) for name in _BLOCKS}
    parts[block] = getattr(Z, block)
    return TangentVector(**parts)


def _best_central_difference(
    f: Callable[[float], float], exact: float, steps: Sequence[float] = FD_STEPS
) -> float:
    """Smallest relative error of (f(eps) - f(-eps)) / (2 eps) against `exact` over the steps."""
    best = np.inf
    for eps in steps:
        estimate = (f(eps) - f(-eps)) / (2 * eps)
        best = min(best, _relative(estimate - exact, exact))
    return float(best)


def verify_gradient(
    Y: State, particle: Particle, rng: np.random.Generator | None = None
) -> ResidualReport:
    """Each block of grad_hamiltonian against central differences of hamiltonian."""
    rng = rng if rng is not None else np.random.default_rng(0)
    grad = grad_hamiltonian(Y, particle)
    Z = random_direction(Y, rng)
    residuals = {}
    for block in (*_BLOCKS, "all"):
        direction = Z if block == "all" else _only_block(Z, block)
        exact = pairing(grad, direction)
        residuals[block] = _best_central_difference(
            lambda eps, d=direction: hamiltonian(Y.combine(d, 1.0, eps), particle), exact
        )
    return ResidualReport("gradient", residuals)


def verify_structure(
    Y: State, particle: Particle, rng: np.random.Generator | None = None
) -> ResidualReport:
    """Skew-symmetry of J(Y) on random vectors and <DH, J DH> = 0."""
    rng = rng if rng is not None else np.random.default_rng(0)
    Z1 = random_direction(Y, rng)
    Z2 = random_direction(Y, rng)
    skew = pairing(Z1, structural_apply(Y, Z2)) + pairing(structural_apply(Y, Z1), Z2)
    grad = grad_hamiltonian(Y, particle)
    return ResidualReport(
        "structure",
        {
            "skew_symmetry": _relative(skew, Z1.norm() * Z2.norm()),
            "energy_rate": _relative(energy_rate(Y, particle), grad.norm() ** 2),
        },
    )


def verify_form_equivalence(Y: State, particle: Particle) -> ResidualReport:
    """First-order Hamiltonian form against the second-order field equations."""
    Ydot = rhs(Y, particle)
    v, _ = velocities(Y, particle)
    accel = second_order_field_acceleration(Y, particle)
    return ResidualReport(
        "form_equivalence",
        {
            "field_acceleration": _relative((Ydot.Pi - accel).values, accel.values),
            "field_velocity": _relative((Ydot.A - Y.Pi).values, Y.Pi.values),
            "particle_velocity": _relative(Ydot.q - v, v),
        },
    )


def verify_canonical_transform(Y: State, particle: Particle) -> ResidualReport:
    """
    Round trip through the comoving frame, equality of the two Hamiltonians, and agreement of
    the particle rates qdot and pidot generated in either frame.
    """
    Yc = to_comoving(Y)
    back = from_comoving(Yc)
    H = hamiltonian(Y, particle)
    lab_rate = rhs(Y, particle)
    comoving_rate = comoving_rhs(Yc, particle)
    return ResidualReport(
        "canonical",
        {
            "hamiltonian": _relative(comoving_hamiltonian(Yc, particle) - H, H),
            "round_trip": _relative((back - Y).norm(), Y.norm()),
            "qdot": _relative(comoving_rate.q - lab_rate.q, lab_rate.q),
            "pidot": _relative(comoving_rate.pi - lab_rate.pi, lab_rate.pi),
        },
    )


def verify_newton_lorentz(Y: State, particle: Particle) -> ResidualReport:
    """m qddot and I omegadot implied by rhs against the Lorentz force and torque."""
    qddot, omegadot = implied_acceleration(Y, particle)
    force, torque = lorentz_force_torque(Y, particle)
    mq = particle.m * qddot
    Iw = particle.I * omegadot
    return ResidualReport(
        "newton_lorentz",
        {
            "force": _relative(mq - force, np.linalg.norm(force) + np.linalg.norm(mq)),
            "torque": _relative(Iw - torque, np.linalg.norm(torque) + np.linalg.norm(Iw)),
        },
    )


def verify_gauge(Y: State) -> ResidualReport:
    """Coulomb-gauge constraints max |div A| and max |div Pi|."""
    div_A, div_Pi = Y.max_divergence()
    return ResidualReport("gauge", {"div_A": div_A, "div_Pi": div_Pi})


def verify_gauss(Y: State, particle: Particle) -> ResidualReport:
    """
    Gauss law div E = rho(x - q) - Q/L^3, and the Poisson equation for the Coulomb potential
    relative to max |rho|.
    """
    profile = particle.profile
    density = profile.shifted_density(Y.q)
    source = density - profile.background_density
    poisson = laplacian(profile.coulomb_potential(Y.q)).values + source
    scale = float(np.max(np.abs(density)))
    return ResidualReport(
        "gauss",
        {
            "gauss": gauss_residual(Y, particle),
            "poisson": _relative(np.max(np.abs(poisson)), scale),
        },
    )


def momentum_map_gradient(Yc: ComovingState, xi) -> CotangentVector:
    """
    Analytic DJ_xi with u = xi ∧ y:

    D_bA = bPi ∧ xi + (u·∇)bPi, D_bPi = xi ∧ bA - (u·∇)bA,
    D_q = -xi ∧ P, D_P = xi ∧ q, D_pi = xi.
    """
    xi = np.asarray(xi, dtype=float)
    u = cross_const(xi, centered_coordinate(Yc.grid))
    D_A = -cross_const(xi, Yc.bPi) + directional_derivative(u, Yc.bPi)
    D_Pi = field_deformation(xi, Yc.bA)
    return CotangentVector(D_A, D_Pi, -np.cross(xi, Yc.P), np.cross(xi, Yc.q), xi)


def verify_momentum_map(
    Yc: ComovingState,
    axes: Sequence[np.ndarray] = UNIT_AXES,
    rng: np.random.Generator | None = None,
) -> ResidualReport:
    """
    J(Yc) DJ_xi = v_xi block by block, and DJ_xi against central differences of J_xi.

    J_xi is bilinear in the fields and affine in (q, P, pi), so central differences carry
    only roundoff; what remains is the discrete adjoint of (u·∇) near the seam.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    Z = random_direction(Yc, rng)
    residuals = {}
    for k, xi in enumerate(axes, start=1):
        grad = momentum_map_gradient(Yc, xi)
        flow = structural_apply(Yc, grad)
        target = deformation_field(xi, Yc)
        for block in _BLOCKS:
            got, want = getattr(flow, block), getattr(target, block)
            if isinstance(got, VectorField3):
                got, want = got.values, want.values
            residuals[f"flow_{block}_{k}"] = _relative(got - want, target.norm())
        exact = pairing(grad, Z)
        estimate = (j_xi(Yc.combine(Z, 1.0, 1e-3), xi) - j_xi(Yc.combine(Z, 1.0, -1e-3), xi)) / 2e-3
        residuals[f"differential_{k}"] = _relative(estimate - exact, exact)
    return ResidualReport("momentum_map", residuals)


def verify_definitional(Yc: ComovingState) -> ResidualReport:
    """J · e_k equals J_{e_k}."""
    J = angular_momentum(Yc)
    return ResidualReport(
        "definitional",
        {
            f"axis_{k}": _relative(J[k - 1] - j_xi(Yc, e), J)
            for k, e in enumerate(UNIT_AXES, start=1)
        },
    )


def verify_classical_identity(Y: State, particle: Particle) -> ResidualReport:
    """
    P = P_c and J = J_c once the neutralizing-background terms are added back.

    The uncorrected residuals go to `info` as `*_raw`; `poynting` checks the
    intermediate ∫E∧B = P - m v - rho_bar ∫A. `pi_reading` in `info` compares the shifted
    and literal readings of the spin coupling <(x-q)∧A, rho>.
    """
    d = derived_quantities(Y, particle)
    P = total_momentum(Y)
    J = angular_momentum(to_comoving(Y))
    P_c, J_c = classical_invariants(Y, particle, d)
    dP, dJ = background_correction(Y, particle)
    poynting = integral(cross(d.E, d.B))
    readings = pi_reading_discrepancy(Y, particle)
    return ResidualReport(
        "classical",
        {
            "P": _relative(P - dP - P_c, P),
            "J": _relative(J - dJ - J_c, J),
            "poynting": _relative(poynting - (P - particle.m * d.v - dP), P),
        },
        info={
            "P_raw": _relative(P - P_c, P),
            "J_raw": _relative(J - J_c, J),
            "pi_reading": _relative(readings["difference"], readings["shifted"]),
        },
    )


def verify_rotation_invariance(Yc: ComovingState, particle: Particle) -> ResidualReport:
    """
    Comoving H under all 24 cubic rotations, together with the covariance
    V(T(R)Y) = R V(Y) and W(T(R)Y) = R W(Y) of the comoving velocities.

    The field term of V is also checked on its own: <R bPi R^{-1}, ∇_* R bA R^{-1}> must equal
    R <bPi, ∇_* bA>, scaled by its Cauchy-Schwarz bound.
    """
    H = comoving_hamiltonian(Yc, particle)
    V, W = comoving_velocities(Yc, particle)
    G = grad_star_inner(Yc.bPi, Yc.bA)
    h3 = Yc.grid.cell_volume
    bound = h3 * float(np.sqrt(np.sum(Yc.bPi.values**2) * np.sum(jacobian(Yc.bA) ** 2)))
    worst_h = worst_v = worst_w = worst_g = 0.0
    for R in cubic_rotations():
        rotated = rotate_state(R, Yc)
        worst_h = max(worst_h, _relative(comoving_hamiltonian(rotated, particle) - H, H))
        V_r, W_r = comoving_velocities(rotated, particle)
        worst_v = max(worst_v, _relative(V_r - R @ V, V))
        worst_w = max(worst_w, _relative(W_r - R @ W, W))
        G_r = grad_star_inner(rotated.bPi, rotated.bA)
        worst_g = max(worst_g, _relative(G_r - R @ G, bound))
    return ResidualReport(
        "rotation",
        {
            "hamiltonian": worst_h,
            "V_covariance": worst_v,
            "W_covariance": worst_w,
            "grad_star_covariance": worst_g,
        },
    )


def lie_derivative_H(Yc: ComovingState, particle: Particle, xi) -> float:
    """<DH_c, v_xi>, which vanishes when H_c is rotation invariant."""
    return pairing(comoving_grad_hamiltonian(Yc, particle), deformation_field(xi, Yc))


def verify_lie_derivative(
    Yc: ComovingState, particle: Particle, axes: Sequence[np.ndarray] = UNIT_AXES
) -> ResidualReport:
    H = abs(comoving_hamiltonian(Yc, particle))
    residuals = {
        f"axis_{k}": _relative(lie_derivative_H(Yc, particle, xi), H * float(np.linalg.norm(xi)))
        for k, xi in enumerate(axes, start=1)
    }
    return ResidualReport("lie_derivative", residuals)


def run_all_checks(
    Y: State, particle: Particle, rng: np.random.Generator | None = None
) -> list[ResidualReport]:
    """Every identity of the audit on one state, in reporting order."""
    rng = rng if rng is not None else np.random.default_rng(0)
    Yc = to_comoving(Y)
    reports = [
        verify_gauge(Y),
        verify_gauss(Y, particle),
        verify_structure(Y, particle, rng),
        verify_gradient(Y, particle, rng),
        verify_form_equivalence(Y, particle),
        verify_canonical_transform(Y, particle),
        verify_momentum_map(Yc, rng=rng),
        verify_definitional(Yc),
        verify_rotation_invariance(Yc, particle),
        verify_classical_identity(Y, particle),
        verify_lie_derivative(Yc, particle),
        verify_newton_lorentz(Y, particle),
    ]
    for report in reports:
        logger.debug("%s: worst residual %.3e", report.name, report.worst)
    return reports
