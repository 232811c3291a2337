"""Grid geometry and field containers for the periodic cubic box."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as sfft

from src.errors import GridMismatchError

logger = logging.getLogger(__name__)


def fft_workers() -> int:
    """Worker count for scipy.fft, capped by MLSPIN_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("MLSPIN_THREADS", "1")))
    except ValueError:
        logger.warning("Ignoring non-integer MLSPIN_THREADS=%r", os.environ["MLSPIN_THREADS"])
        return 1


@dataclass(frozen=True)
class GridSpec:
    """
    Periodic cubic box [-L/2, L/2)^3 sampled with N points per axis.

    Nodes are x_i = -L/2 + i*h. Wavenumbers are 2*pi/L * m with m in [-N/2, N/2);
    the Nyquist mode m = -N/2 is zeroed in every differentiation multiplier.
    """

    L: float
    N: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"box length must be positive, got L={self.L}")
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 8, got N={self.N}")
        object.__setattr__(self, "N", int(self.N))
        logger.debug("Grid created: L=%s, N=%s, h=%s", self.L, self.N, self.h)

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.N, self.N, self.N)

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def volume(self) -> float:
        return self.L**3

    @cached_property
    def nodes_1d(self) -> np.ndarray:
        return -self.L / 2 + self.h * np.arange(self.N)

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (3, N, N, N)."""
        x = self.nodes_1d
        return np.stack(np.meshgrid(x, x, x, indexing="ij"))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Differentiation wavenumbers on the rfft layout, shape (3, N, N, N//2+1)."""
        k_full = 2 * np.pi / self.L * np.fft.fftfreq(self.N, d=1.0 / self.N)
        k_full[self.N // 2] = 0.0
        k_half = 2 * np.pi / self.L * np.arange(self.N // 2 + 1)
        k_half[-1] = 0.0
        return np.stack(np.meshgrid(k_full, k_full, k_half, indexing="ij"))

    @cached_property
    def k_squared(self) -> np.ndarray:
        return np.sum(self.wavenumbers**2, axis=0)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """False on every mode that carries a Nyquist index along some axis."""
        n = self.N
        full = np.ones(n, dtype=bool)
        full[n // 2] = False
        half = np.ones(n // 2 + 1, dtype=bool)
        half[-1] = False
        return full[:, None, None] & full[None, :, None] & half[None, None, :]

    def wrap(self, x: np.ndarray | float) -> np.ndarray:
        """Wrap coordinates into the half-open interval [-L/2, L/2)."""
        return np.mod(np.asarray(x, dtype=float) + self.L / 2, self.L) - self.L / 2

    def check_same(self, other: GridSpec) -> None:
        if self != other:
            raise GridMismatchError()


def forward(values: np.ndarray) -> np.ndarray:
    """Real FFT over the last three axes."""
    return sfft.rfftn(values, axes=(-3, -2, -1), workers=fft_workers())


def backward(coeffs: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Inverse of `forward`, returning real samples."""
    return sfft.irfftn(coeffs, s=grid.shape, axes=(-3, -2, -1), workers=fft_workers())


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"{what} contains non-finite values")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples of a scalar function at all N^3 nodes."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(f"scalar field must have shape {self.grid.shape}, got {values.shape}")
        _check_finite(values, "scalar field")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> ScalarField:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_hat(cls, grid: GridSpec, coeffs: np.ndarray) -> ScalarField:
        return cls(grid, backward(coeffs, grid))

    @cached_property
    def hat(self) -> np.ndarray:
        return forward(self.values)

    def mean(self) -> float:
        return float(np.mean(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: ScalarField) -> ScalarField:
        self.grid.check_same(other.grid)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: ScalarField) -> ScalarField:
        self.grid.check_same(other.grid)
        return ScalarField(self.grid, self.values - other.values)

    def __neg__(self) -> ScalarField:
        return ScalarField(self.grid, -self.values)

    def __mul__(self, c: float) -> ScalarField:
        return ScalarField(self.grid, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VectorField3:
    """Three real components sharing one grid, stored as an array of shape (3, N, N, N)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (3, *self.grid.shape):
            raise ValueError(
                f"vector field must have shape {(3, *self.grid.shape)}, got {values.shape}"
            )
        _check_finite(values, "vector field")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> VectorField3:
        return cls(grid, np.zeros((3, *grid.shape)))

    @classmethod
    def constant(cls, grid: GridSpec, c) -> VectorField3:
        c = np.asarray(c, dtype=float).reshape(3, 1, 1, 1)
        return cls(grid, np.broadcast_to(c, (3, *grid.shape)).copy())

    @classmethod
    def from_components(cls, *components: ScalarField) -> VectorField3:
        grid = components[0].grid
        for comp in components[1:]:
            grid.check_same(comp.grid)
        return cls(grid, np.stack([comp.values for comp in components]))

    @classmethod
    def from_hat(cls, grid: GridSpec, coeffs: np.ndarray) -> VectorField3:
        return cls(grid, backward(coeffs, grid))

    @cached_property
    def hat(self) -> np.ndarray:
        return forward(self.values)

    def component(self, j: int) -> ScalarField:
        return ScalarField(self.grid, self.values[j])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: VectorField3) -> VectorField3:
        self.grid.check_same(other.grid)
        return VectorField3(self.grid, self.values + other.values)

    def __sub__(self, other: VectorField3) -> VectorField3:
        self.grid.check_same(other.grid)
        return VectorField3(self.grid, self.values - other.values)

    def __neg__(self) -> VectorField3:
        return VectorField3(self.grid, -self.values)

    def __mul__(self, c: float) -> VectorField3:
        return VectorField3(self.grid, c * self.values)

    __rmul__ = __mul__
