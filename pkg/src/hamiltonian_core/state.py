"""Phase-space vectors Y = (A, Pi, q, p, pi) and their linear algebra."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TypeVar

import numpy as np

from src.charge_model.profile import ChargeProfile
from src.grid_fields.grid import GridSpec, VectorField3
from src.grid_fields.operators import divergence, inner_product

V = TypeVar("V", bound="PhaseVector")


def _vec3(x) -> np.ndarray:
    out = np.array(x, dtype=float).reshape(3)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("phase vector contains non-finite values")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Two divergence-free fields plus three vectors in R^3."""

    A: VectorField3
    Pi: VectorField3
    q: np.ndarray
    p: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        self.A.grid.check_same(self.Pi.grid)
        for name in ("q", "p", "pi"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))

    @property
    def grid(self) -> GridSpec:
        return self.A.grid

    @classmethod
    def zeros(cls: type[V], grid: GridSpec) -> V:
        zero = VectorField3.zeros(grid)
        return cls(zero, zero, np.zeros(3), np.zeros(3), np.zeros(3))

    def combine(self: V, other: PhaseVector, a: float = 1.0, b: float = 1.0) -> V:
        """a*self + b*other, keeping the type of self."""
        return type(self)(
            a * self.A + b * other.A,
            a * self.Pi + b * other.Pi,
            a * self.q + b * other.q,
            a * self.p + b * other.p,
            a * self.pi + b * other.pi,
        )

    def scaled(self: V, c: float) -> V:
        return type(self)(c * self.A, c * self.Pi, c * self.q, c * self.p, c * self.pi)

    def __add__(self: V, other: PhaseVector) -> V:
        return self.combine(other)

    def __sub__(self: V, other: PhaseVector) -> V:
        return self.combine(other, 1.0, -1.0)

    def norm(self) -> float:
        return float(np.sqrt(pairing(self, self)))

    def max_divergence(self) -> tuple[float, float]:
        return divergence(self.A).max_abs(), divergence(self.Pi).max_abs()


class State(PhaseVector):
    """Phase point: vector potential, field momentum, centre, linear and angular momenta."""


class CotangentVector(PhaseVector):
    """Gradient DH(Y) laid out like a State."""


class TangentVector(PhaseVector):
    """Right-hand side vector laid out like a State."""


@dataclass(frozen=True)
class Particle:
    """Parameters of the extended particle: charge profile, mass and moment of inertia."""

    profile: ChargeProfile
    m: float = 1.0
    I: float = 1.0  # noqa: E741

    def __post_init__(self):
        if self.m <= 0 or self.I <= 0:
            raise ValueError(f"mass and inertia must be positive, got m={self.m}, I={self.I}")

    @property
    def grid(self) -> GridSpec:
        return self.profile.grid


def pairing(Z1: PhaseVector, Z2: PhaseVector) -> float:
    """Field inner products plus dot products of the finite-dimensional blocks."""
    return (
        inner_product(Z1.A, Z2.A)
        + inner_product(Z1.Pi, Z2.Pi)
        + float(Z1.q @ Z2.q + Z1.p @ Z2.p + Z1.pi @ Z2.pi)
    )
