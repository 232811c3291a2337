"""
Tests for RK4 time stepping.

Validates:
- RunConfig validation and step counting
- Straight-line motion of a free particle
- Fourth-order convergence of the energy error
- Observer cadence and blow-up reporting
- Conservation of H, P and J along runs
- Accelerations rebuilt from saved trajectories
"""

import logging

import numpy as np
import pytest

from src.charge_model.profile import make_profile
from src.cli_runner.config import parse_config
from src.cli_runner.initial_conditions import initial_state
from src.errors import BlowUpError
from src.grid_fields.grid import VectorField3
from src.grid_fields.random_fields import localized_solenoidal_field
from src.hamiltonian_core.hamiltonian import hamiltonian, implied_acceleration, velocities
from src.hamiltonian_core.physics import lorentz_force_torque
from src.hamiltonian_core.state import Particle, State
from src.integrator import runge_kutta
from src.integrator.runge_kutta import RunConfig, evolve, stability_bound, step_rk4
from src.momentum_map.invariants import InvariantObserver, lab_angular_momentum, relative_drift


@pytest.fixture
def coarse_particle(coarse_grid):
    return Particle(make_profile(1.5, 1.0, coarse_grid), m=1.0, I=0.5)


@pytest.fixture
def coarse_state(coarse_grid):
    rng = np.random.default_rng(7)
    A = localized_solenoidal_field(coarse_grid, rng, envelope_radius=1.0, amplitude=0.3)
    Pi = localized_solenoidal_field(coarse_grid, rng, envelope_radius=1.0, amplitude=0.3)
    return State(A, Pi, [0.0, 0.0, 0.0], [0.2, 0.0, -0.1], [0.0, 0.1, 0.05])


def energy_error(Y0, particle, dt, T):
    records = evolve(Y0, RunConfig(dt=dt, T=T), particle, [lambda t, Y: hamiltonian(Y, particle)])
    return abs(records[-1][0] - records[0][0])


class TestRunConfig:
    """Test suite for run parameters."""

    def test_step_count(self):
        assert RunConfig(dt=0.1, T=1.0).n_steps == 10
        assert RunConfig(dt=0.1, T=0.0).n_steps == 0

    def test_last_step_is_shortened(self):
        """Test that T = 1 with dt = 0.3 takes a final step of 0.1."""
        cfg = RunConfig(dt=0.3, T=1.0)
        assert cfg.n_steps == 4
        assert cfg.step_time(3) == pytest.approx(0.9)
        assert cfg.step_time(4) == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dt": 0.0, "T": 1.0},
            {"dt": -0.1, "T": 1.0},
            {"dt": 0.1, "T": -1.0},
            {"dt": 0.1, "T": 1.0, "observe_every": 0},
            {"dt": 0.1, "T": 1.0, "observe_every": 1.5},
        ],
    )
    def test_invalid_values(self, kwargs):
        with pytest.raises(ValueError):
            RunConfig(**kwargs)

    def test_stability_bound(self):
        """Test dt_max = 2 sqrt(2) h / (sqrt(3) pi)."""
        assert stability_bound(1.0) == pytest.approx(0.5198, abs=1e-4)
        assert stability_bound(0.5) == pytest.approx(0.5 * stability_bound(1.0))


class TestStepping:
    """Test suite for single steps and full runs."""

    def test_free_particle_moves_straight(self, coarse_grid):
        """Test q(T) = q0 + T p/m for an uncharged particle without fields."""
        neutral = Particle(make_profile(1.5, 0.0, coarse_grid), m=2.0, I=1.0)
        zero = VectorField3.zeros(coarse_grid)
        Y0 = State(zero, zero, [0.1, 0.0, -0.2], [1.0, -0.5, 0.0], [0.3, 0.0, 0.4])
        records = evolve(Y0, RunConfig(dt=0.1, T=1.0), neutral, [lambda t, Y: Y])
        Y = records[-1][0]
        np.testing.assert_allclose(Y.q, [0.6, -0.25, -0.2], atol=1e-13)
        np.testing.assert_allclose(Y.p, Y0.p, atol=1e-14)
        np.testing.assert_allclose(Y.pi, Y0.pi, atol=1e-14)

    def test_run_ends_at_final_time(self, coarse_grid):
        """Test that a T not divisible by dt is still reached and observed."""
        neutral = Particle(make_profile(1.5, 0.0, coarse_grid), m=2.0, I=1.0)
        zero = VectorField3.zeros(coarse_grid)
        Y0 = State(zero, zero, [0.1, 0.0, -0.2], [1.0, -0.5, 0.0], [0.0, 0.0, 0.0])
        cfg = RunConfig(dt=0.3, T=1.0, observe_every=2)
        records = evolve(Y0, cfg, neutral, [lambda t, Y: t, lambda t, Y: Y.q.copy()])
        assert [r[0] for r in records] == pytest.approx([0.0, 0.6, 1.0])
        np.testing.assert_allclose(records[-1][1], [0.6, -0.25, -0.2], atol=1e-13)

    def test_step_keeps_gauge(self, coarse_state, coarse_particle):
        """Test that reprojection leaves divergence at round-off."""
        Y = step_rk4(coarse_state, 0.05, coarse_particle, reproject_gauge=True)
        div_A, div_Pi = Y.max_divergence()
        assert div_A <= 1e-12
        assert div_Pi <= 1e-12

    def test_energy_conserved(self, coarse_state, coarse_particle):
        H0 = hamiltonian(coarse_state, coarse_particle)
        assert energy_error(coarse_state, coarse_particle, 0.05, 1.0) <= 1e-3 * abs(H0)

    def test_time_reversal(self, coarse_state, coarse_particle):
        """Test that stepping back with -dt recovers the initial state."""
        Y = coarse_state
        for _ in range(10):
            Y = step_rk4(Y, 0.01, coarse_particle)
        for _ in range(10):
            Y = step_rk4(Y, -0.01, coarse_particle)
        assert (Y - coarse_state).norm() <= 1e-8 * coarse_state.norm()

    def test_gauge_preserved_over_run(self, coarse_state, coarse_particle):
        records = evolve(
            coarse_state,
            RunConfig(dt=0.05, T=0.5, observe_every=2),
            coarse_particle,
            [lambda t, Y: max(Y.max_divergence())],
        )
        assert max(r[0] for r in records) <= 1e-9

    @pytest.mark.slow
    def test_energy_error_converges_at_fourth_order(self, coarse_state, coarse_particle):
        """Test that halving dt reduces the energy error by at least a factor 8."""
        coarse = energy_error(coarse_state, coarse_particle, 0.1, 1.0)
        fine = energy_error(coarse_state, coarse_particle, 0.05, 1.0)
        assert fine > 0.0
        assert coarse / fine >= 8.0


class TestEvolve:
    """Test suite for observers and failure reporting."""

    def test_observer_cadence(self, coarse_state, coarse_particle):
        """Test observations at t = 0, every observe_every steps and at T."""
        steps = []
        cfg = RunConfig(dt=0.1, T=0.5, observe_every=2)
        records = evolve(
            coarse_state,
            cfg,
            coarse_particle,
            [lambda t, Y: t],
            on_step=lambda step, t, Y: steps.append(step),
        )
        assert [r[0] for r in records] == pytest.approx([0.0, 0.2, 0.4, 0.5])
        assert steps == [1, 2, 3, 4, 5]

    def test_several_observers(self, coarse_state, coarse_particle):
        records = evolve(
            coarse_state,
            RunConfig(dt=0.1, T=0.1),
            coarse_particle,
            [lambda t, Y: t, lambda t, Y: Y.q.copy()],
        )
        assert len(records) == 2
        assert len(records[0]) == 2

    def test_warns_above_stability_bound(self, coarse_state, coarse_particle, caplog):
        dt = 1.1 * stability_bound(coarse_state.grid.h)
        with caplog.at_level(logging.WARNING, logger="src.integrator.runge_kutta"):
            evolve(coarse_state, RunConfig(dt=dt, T=0.0), coarse_particle)
        assert "stability bound" in caplog.text

    def test_blow_up_reports_time(self, coarse_state, coarse_particle, monkeypatch):
        """Test that non-finite values become BlowUpError carrying the failing time."""
        calls = {"n": 0}
        real_rhs = runge_kutta.rhs

        def failing_rhs(Y, particle):
            calls["n"] += 1
            if calls["n"] > 4:
                raise FloatingPointError("non-finite")
            return real_rhs(Y, particle)

        monkeypatch.setattr(runge_kutta, "rhs", failing_rhs)
        with pytest.raises(BlowUpError) as excinfo:
            evolve(coarse_state, RunConfig(dt=0.1, T=1.0), coarse_particle)
        assert excinfo.value.t == pytest.approx(0.2)
        assert "reduce dt" in str(excinfo.value)


def reconstructed_acceleration(states, dt, particle):
    """Centered differences of m v and I omega across three consecutive saved states."""
    (v0, w0), _, (v2, w2) = (velocities(Y, particle) for Y in states)
    return particle.m * (v2 - v0) / (2 * dt), particle.I * (w2 - w0) / (2 * dt)


def momentum_drift(Y0, particle, dt, T):
    cfg = RunConfig(dt=dt, T=T, observe_every=1000)
    rows = evolve(Y0, cfg, particle, [InvariantObserver(particle)])
    return relative_drift([row[0] for row in rows])


class TestConservation:
    """Test suite for H, P and J along trajectories."""

    @pytest.mark.slow
    def test_linear_momentum_drift_is_a_time_error(self, localized_state, particle):
        """Test that halving dt reduces the drift of P by at least a factor 8."""
        coarse = momentum_drift(localized_state, particle, 0.1, 1.0)["P"]
        fine = momentum_drift(localized_state, particle, 0.05, 1.0)["P"]
        assert fine > 0.0
        assert coarse / fine >= 8.0

    @pytest.mark.slow
    def test_angular_momentum_along_run(self, localized_state, particle):
        """Test that J and its lab-frame reading stay conserved."""
        rows = evolve(
            localized_state,
            RunConfig(dt=0.1, T=1.0, observe_every=2),
            particle,
            [InvariantObserver(particle), lambda t, Y: lab_angular_momentum(Y)],
        )
        assert relative_drift([row[0] for row in rows])["J"] <= 1e-3
        lab = np.array([row[1] for row in rows])
        assert np.max(np.linalg.norm(lab - lab[0], axis=1)) <= 1e-3 * np.linalg.norm(lab[0])
        np.testing.assert_allclose(lab[0], rows[0][0].J, rtol=1e-10, atol=1e-12)

    @pytest.mark.slow
    def test_default_run_drift(self):
        """
        Test the drift of the default run (N = 48, dt = 0.1 h, T = 5).

        H and P stay near 1e-6; J holds to about 1e-5 until the radiation reaches the
        wrap seam after t = 4 and then degrades to the 1e-3 level.
        """
        cfg = parse_config("{}")
        particle = cfg.build_particle()
        Y0 = initial_state(cfg, particle)
        rows = evolve(Y0, cfg.run_config(), particle, [InvariantObserver(particle)])
        records = [row[0] for row in rows]
        assert records[-1].t == pytest.approx(5.0)
        drift = relative_drift(records)
        assert drift["H"] <= 2e-6
        assert drift["P"] <= 5e-6
        assert drift["J"] <= 1e-2
        assert relative_drift(records, until=4.0)["J"] <= 5e-5


class TestTrajectoryNewtonLorentz:
    """Test suite for accelerations rebuilt from saved states."""

    def test_reconstruction_converges_at_second_order(self, coarse_state, coarse_particle):
        """Test that halving dt divides the centered-difference error by about 4."""
        p = coarse_particle
        errors = []
        for dt in (0.1, 0.05):
            k = round(0.2 / dt)
            rows = evolve(coarse_state, RunConfig(dt=dt, T=(k + 1) * dt), p, [lambda t, Y: Y])
            states = [row[0] for row in rows[k - 1 : k + 2]]
            mq, Iw = reconstructed_acceleration(states, dt, p)
            qddot, omegadot = implied_acceleration(states[1], p)
            errors.append(np.linalg.norm(np.concatenate([mq - p.m * qddot, Iw - p.I * omegadot])))
        assert 3.0 <= errors[0] / errors[1] <= 5.0

    def test_reconstruction_matches_force_and_torque(self, localized_state, particle):
        """Test m qddot and I omegadot from the trajectory against the Lorentz force and torque."""
        dt = 0.005
        rows = evolve(localized_state, RunConfig(dt=dt, T=2 * dt), particle, [lambda t, Y: Y])
        states = [row[0] for row in rows]
        assert len(states) == 3
        mq, Iw = reconstructed_acceleration(states, dt, particle)
        force, torque = lorentz_force_torque(states[1], particle)
        norm = np.linalg.norm
        assert norm(mq - force) <= 2e-3 * (norm(force) + norm(mq))
        assert norm(Iw - torque) <= 2e-3 * (norm(torque) + norm(Iw))
