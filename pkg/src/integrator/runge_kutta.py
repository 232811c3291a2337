"""Classical RK4 stepping of Ydot = J(Y) DH(Y) with observer hooks."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

from src.errors import BlowUpError
from src.grid_fields.operators import leray_project
from src.hamiltonian_core.hamiltonian import rhs
from src.hamiltonian_core.state import Particle, State

logger = logging.getLogger(__name__)

Observer = Callable[[float, State], Any]


@dataclass(frozen=True)
class RunConfig:
    """Time step, final time, observation cadence and gauge hygiene switch."""

    dt: float
    T: float
    observe_every: int = 1
    reproject_gauge: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.T >= 0:
            raise ValueError(f"T must be non-negative, got {self.T}")
        if int(self.observe_every) != self.observe_every or self.observe_every < 1:
            raise ValueError(f"observe_every must be an integer >= 1, got {self.observe_every}")

    @property
    def n_steps(self) -> int:
        """Steps needed to reach T; the last one is shortened when T is not a multiple of dt."""
        # Tolerate T/dt landing a hair above an integer.
        return max(0, math.ceil(self.T / self.dt - 1e-9))

    def step_time(self, step: int) -> float:
        """Time reached after `step` steps; the final step lands on T exactly."""
        return self.T if step >= self.n_steps else step * self.dt


def stability_bound(h: float) -> float:
    """
    Largest dt for which RK4 keeps the spectral wave operator stable.

    The highest resolved frequency is sqrt(3) pi / h and RK4 is stable on the imaginary
    axis up to 2 sqrt(2).
    """
    return 2.0 * math.sqrt(2.0) * h / (math.sqrt(3.0) * math.pi)


def step_rk4(Y: State, dt: float, particle: Particle, reproject_gauge: bool = False) -> State:
    """
    Advance one classical Runge-Kutta step.

    Raises:
        BlowUpError: if any entry of the new state is not finite
    """
    try:
        k1 = rhs(Y, particle)
        k2 = rhs(Y.combine(k1, 1.0, 0.5 * dt), particle)
        k3 = rhs(Y.combine(k2, 1.0, 0.5 * dt), particle)
        k4 = rhs(Y.combine(k3, 1.0, dt), particle)
        increment = k1.combine(k2, 1.0, 2.0).combine(k3, 1.0, 2.0).combine(k4)
        Y_new = Y.combine(increment, 1.0, dt / 6.0)
        if reproject_gauge:
            Y_new = State(
                leray_project(Y_new.A), leray_project(Y_new.Pi), Y_new.q, Y_new.p, Y_new.pi
            )
    except FloatingPointError as exc:
        raise BlowUpError() from exc
    return Y_new


def evolve(
    Y0: State,
    cfg: RunConfig,
    particle: Particle,
    observers: Sequence[Observer] = (),
    on_step: Callable[[int, float, State], None] | None = None,
) -> list[tuple[Any, ...]]:
    """
    Integrate from t = 0 to cfg.T, calling every observer at t = 0, every
    `observe_every` steps and after the final step.

    Returns:
        list: one tuple of observer outputs per observation time, in time order

    Raises:
        BlowUpError: with the time of the failing step attached
    """
    if cfg.dt > stability_bound(particle.grid.h):
        logger.warning(
            "dt=%.3g exceeds the RK4 stability bound %.3g", cfg.dt, stability_bound(particle.grid.h)
        )

    records = [tuple(obs(0.0, Y0) for obs in observers)]
    Y = Y0
    n_steps = cfg.n_steps
    logger.info("Evolving %d steps of dt=%.4g", n_steps, cfg.dt)
    t = 0.0
    for step in range(1, n_steps + 1):
        t_prev, t = t, cfg.step_time(step)
        try:
            dt = cfg.dt if step < n_steps else t - t_prev
            Y = step_rk4(Y, dt, particle, cfg.reproject_gauge)
        except BlowUpError as exc:
            raise BlowUpError(t) from exc
        if on_step is not None:
            on_step(step, t, Y)
        if step % cfg.observe_every == 0 or step == n_steps:
            records.append(tuple(obs(t, Y) for obs in observers))
            logger.debug("Observed step %d (t=%.4g)", step, t)
    return records
