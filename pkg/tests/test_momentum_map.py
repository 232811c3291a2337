"""
Tests for the momentum map, the classical invariants and the residual audit.

Validates:
- J_xi, its analytic differential and the flow it generates
- Hamiltonian against classical linear and angular momentum
- Background corrections and the seam warning
- Rotation invariance and the Lie derivative of the comoving Hamiltonian
- Invariant observer records and the full audit
- Gauss-law and Poisson rows of the audit
"""

import numpy as np
import pytest

from src.charge_model.profile import make_profile
from src.comoving.transform import to_comoving
from src.errors import SeamWarning
from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import centered_coordinate
from src.hamiltonian_core.hamiltonian import hamiltonian
from src.hamiltonian_core.state import Particle, State
from src.momentum_map.invariants import (
    InvariantObserver,
    angular_momentum,
    background_correction,
    j_xi,
    lab_angular_momentum,
    pi_reading_discrepancy,
    total_momentum,
)
from src.momentum_map.star import angular_star_inner, grad_star_inner
from src.momentum_map.verification import (
    ResidualReport,
    lie_derivative_H,
    run_all_checks,
    verify_classical_identity,
    verify_definitional,
    verify_gauss,
    verify_lie_derivative,
    verify_momentum_map,
    verify_rotation_invariance,
)


@pytest.fixture
def comoving_state(shifted_state):
    return to_comoving(shifted_state)


class TestStarPairings:
    """Test suite for the starred field pairings."""

    def test_grad_star_inner_of_constant_field(self, localized_state, grid):
        """Test <Pi, ∇_* c> = 0 for a constant c."""
        c = VectorField3.constant(grid, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(grad_star_inner(localized_state.Pi, c), 0.0, atol=1e-13)

    def test_grad_star_inner_is_antisymmetric(self, localized_state):
        """Test <Pi, ∂_n A> = -<A, ∂_n Pi>."""
        Y = localized_state
        np.testing.assert_allclose(
            grad_star_inner(Y.Pi, Y.A), -grad_star_inner(Y.A, Y.Pi), rtol=1e-12, atol=1e-13
        )

    def test_angular_star_inner_is_translation_covariant(self, localized_state, grid):
        """Test that moving the centre with a grid-node roll leaves the pairing unchanged."""
        Y = localized_state
        q = np.array([2, 0, -1]) * grid.h
        rolled = [np.roll(F.values, shift=(2, 0, -1), axis=(1, 2, 3)) for F in (Y.A, Y.Pi)]
        moved = angular_star_inner(VectorField3(grid, rolled[0]), VectorField3(grid, rolled[1]), q)
        np.testing.assert_allclose(moved, angular_star_inner(Y.A, Y.Pi), atol=1e-13)

    def test_angular_star_inner_is_antisymmetric(self, shifted_state):
        """Test <((x-q)∧∇)_n A, Pi> = -<A, ((x-q)∧∇)_n Pi> for localized fields."""
        Y = shifted_state
        forward = angular_star_inner(Y.A, Y.Pi, Y.q)
        backward = angular_star_inner(Y.Pi, Y.A, Y.q)
        assert np.linalg.norm(forward + backward) <= 1e-8 * np.linalg.norm(forward)

    def test_radial_profile_has_no_angular_pairing(self, grid):
        """Test ((x-q)∧∇) annihilates g(|x|) c for a radial g."""
        x = centered_coordinate(grid).values
        g = np.exp(-0.5 * np.sum(x**2, axis=0) / 0.7**2)
        A = VectorField3(grid, np.array([1.0, -2.0, 0.5]).reshape(3, 1, 1, 1) * g[None])
        Pi = VectorField3(grid, np.array([0.3, 0.1, 1.0]).reshape(3, 1, 1, 1) * g[None])
        np.testing.assert_allclose(angular_star_inner(A, Pi), 0.0, atol=1e-10)


class TestMomentumMap:
    """Test suite for J_xi and the angular momentum vector."""

    def test_total_momentum_without_fields(self, grid):
        zero = VectorField3.zeros(grid)
        Y = State(zero, zero, [1.0, 0.0, 0.0], [0.5, -0.5, 2.0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(total_momentum(Y), [0.5, -0.5, 2.0])

    def test_j_xi_is_linear_in_xi(self, comoving_state):
        J = angular_momentum(comoving_state)
        xi = np.array([0.4, -1.1, 0.25])
        assert j_xi(comoving_state, xi) == pytest.approx(float(J @ xi), rel=1e-12)

    def test_particle_only_momentum(self, grid):
        """Test J = q∧P + pi without fields."""
        zero = VectorField3.zeros(grid)
        Yc = to_comoving(State(zero, zero, [1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.5]))
        np.testing.assert_allclose(angular_momentum(Yc), [0.0, 0.0, 2.5])

    def test_definitional(self, comoving_state):
        """Test J·e_k = J_{e_k}."""
        report = verify_definitional(comoving_state)
        assert report.passed(1e-12), report.residuals

    def test_flow_and_differential(self, comoving_state):
        """Test J(Y) DJ_xi = v_xi and DJ_xi against central differences."""
        axes = (*np.eye(3), np.array([0.3, -0.7, 0.5]))
        report = verify_momentum_map(comoving_state, axes, np.random.default_rng(9))
        flow = {k: v for k, v in report.residuals.items() if k.startswith("flow")}
        assert max(flow.values()) <= 1e-12
        assert report.passed(1e-8), report.residuals
        assert len(report.residuals) == 4 * 6

    def test_flow_is_exact_without_fields(self, grid):
        """Test that the q, P and pi blocks of J(Y) DJ_xi - v_xi vanish exactly."""
        zero = VectorField3.zeros(grid)
        Yc = to_comoving(State(zero, zero, [0.4, -0.1, 0.2], [1.0, 0.5, -0.3], [0.2, 0.0, 0.7]))
        report = verify_momentum_map(Yc, rng=np.random.default_rng(1))
        for block in ("A", "Pi", "q", "p", "pi"):
            for k in (1, 2, 3):
                assert report.residuals[f"flow_{block}_{k}"] == 0.0

    def test_lab_frame_reading(self, shifted_state):
        """Test J from lab fields with x - q equals J from comoving fields."""
        np.testing.assert_allclose(
            lab_angular_momentum(shifted_state),
            angular_momentum(to_comoving(shifted_state)),
            rtol=1e-12,
            atol=1e-14,
        )


class TestClassicalInvariants:
    """Test suite for the classical linear and angular momentum."""

    @pytest.mark.parametrize("state_name", ["localized_state", "shifted_state"])
    def test_classical_identity(self, request, particle, state_name):
        """Test P = P_c and J = J_c once background terms are restored."""
        Y = request.getfixturevalue(state_name)
        report = verify_classical_identity(Y, particle)
        assert report.residuals["P"] <= 1e-10
        assert report.residuals["poynting"] <= 1e-10
        assert report.residuals["J"] <= 1e-6

    def test_linear_background_term(self, grid, particle):
        """Test rho_bar ∫A = Q c for a constant A = c."""
        c = np.array([0.2, -0.1, 0.4])
        A = VectorField3.constant(grid, c)
        zero = VectorField3.zeros(grid)
        Y = State(A, zero, [0.0, 0.0, 0.0], c, [0.0, 0.0, 0.0])
        dP, _ = background_correction(Y, particle)
        np.testing.assert_allclose(dP, c, rtol=1e-12)

    def test_uniform_potential_needs_correction(self, localized_state, grid, particle):
        """Test that a uniform part of A only balances P once rho_bar ∫A is added back."""
        Y = localized_state
        A = Y.A + VectorField3.constant(grid, [0.05, 0.0, -0.05])
        with pytest.warns(SeamWarning):
            report = verify_classical_identity(State(A, Y.Pi, Y.q, Y.p, Y.pi), particle)
        assert report.residuals["P"] <= 1e-10
        assert report.info["P_raw"] > 1e-3

    def test_field_free_identity(self, grid, particle):
        """Test J = J_c and P = P_c without fields."""
        zero = VectorField3.zeros(grid)
        Y = State(zero, zero, [0.4, -0.1, 0.2], [1.0, 0.5, -0.3], [0.2, 0.0, 0.7])
        report = verify_classical_identity(Y, particle)
        assert report.worst <= 1e-14

    def test_report_carries_raw_residuals(self, localized_state, particle):
        report = verify_classical_identity(localized_state, particle)
        assert set(report.info) == {"P_raw", "J_raw", "pi_reading"}

    def test_pi_reading_row_away_from_origin(self, shifted_state, particle):
        """Test that the literal spin-coupling reading shows up in info but not in worst."""
        report = verify_classical_identity(shifted_state, particle)
        assert report.info["pi_reading"] > 1e-8
        assert "pi_reading" not in report.residuals


class TestInvariance:
    """Test suite for rotation invariance of the comoving Hamiltonian."""

    def test_cubic_rotations(self, comoving_state, particle):
        report = verify_rotation_invariance(comoving_state, particle)
        assert report.passed(1e-11), report.residuals

    def test_grad_star_pairing_is_covariant(self, comoving_state, particle):
        """Test <R bPi R^-1, ∇_* R bA R^-1> = R <bPi, ∇_* bA> on its own row."""
        report = verify_rotation_invariance(comoving_state, particle)
        assert "grad_star_covariance" in report.residuals
        assert report.residuals["grad_star_covariance"] <= 1e-12

    def test_lie_derivative(self, comoving_state, particle):
        """Test <DH_c, v_xi> ≈ 0 at the bump-sampling accuracy."""
        report = verify_lie_derivative(comoving_state, particle)
        assert report.passed(1e-5), report.residuals

    def test_lie_derivative_is_linear_in_xi(self, comoving_state, particle):
        xi = np.array([0.5, 0.0, -1.5])
        combined = lie_derivative_H(comoving_state, particle, xi)
        parts = 0.5 * lie_derivative_H(comoving_state, particle, [1.0, 0.0, 0.0])
        parts -= 1.5 * lie_derivative_H(comoving_state, particle, [0.0, 0.0, 1.0])
        assert combined == pytest.approx(parts, rel=1e-9, abs=1e-14)


class TestObserverAndAudit:
    """Test suite for the invariant observer and the full audit."""

    def test_observer_record(self, shifted_state, particle):
        record = InvariantObserver(particle)(0.25, shifted_state)
        assert record.t == 0.25
        assert record.H == pytest.approx(hamiltonian(shifted_state, particle))
        np.testing.assert_allclose(record.P, total_momentum(shifted_state))
        np.testing.assert_allclose(record.J, angular_momentum(to_comoving(shifted_state)))
        assert record.pi_norm == pytest.approx(np.linalg.norm(shifted_state.pi))
        assert record.div_A_max <= 1e-10
        assert record.gauss_residual <= 1e-10

    def test_pi_reading_agrees_at_origin(self, localized_state, particle):
        readings = pi_reading_discrepancy(localized_state, particle)
        np.testing.assert_allclose(readings["difference"], 0.0, atol=1e-12)

    def test_pi_reading_differs_away_from_origin(self, shifted_state, particle):
        """Test that pairing against the unshifted density gives a different moment."""
        readings = pi_reading_discrepancy(shifted_state, particle)
        assert np.linalg.norm(readings["difference"]) > 1e-8
        np.testing.assert_allclose(
            readings["shifted"], particle.profile.moment_inner(shifted_state.A, shifted_state.q)
        )

    def test_run_all_checks_order(self, shifted_state, particle, rng):
        reports = run_all_checks(shifted_state, particle, rng)
        assert all(isinstance(r, ResidualReport) for r in reports)
        assert [r.name for r in reports] == [
            "gauge",
            "gauss",
            "structure",
            "gradient",
            "form_equivalence",
            "canonical",
            "momentum_map",
            "definitional",
            "rotation",
            "classical",
            "lie_derivative",
            "newton_lorentz",
        ]

    def test_report_worst(self):
        report = ResidualReport("demo", {"a": 1e-9, "b": 3e-7})
        assert report.worst == 3e-7
        assert report.passed(1e-6)
        assert not report.passed(1e-7)
        assert ResidualReport("empty").worst == 0.0


class TestGaussReport:
    """Test suite for the Gauss-law and Poisson rows."""

    def test_gauss_and_poisson_hold(self, shifted_state, particle):
        report = verify_gauss(shifted_state, particle)
        assert set(report.residuals) == {"gauss", "poisson"}
        assert report.passed(1e-10), report.residuals

    def test_neutral_particle_has_empty_rows(self, localized_state, grid):
        neutral = Particle(make_profile(2.0, 0.0, grid), m=1.0, I=1.0)
        report = verify_gauss(localized_state, neutral)
        assert report.residuals["poisson"] == 0.0
