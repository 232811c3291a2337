"""Spectral vector calculus: inner products, derivatives, Poisson solve, Leray projection."""

from __future__ import annotations

import warnings

import numpy as np

from src.errors import SeamWarning
from src.grid_fields.grid import GridSpec, ScalarField, VectorField3, backward


def inner_product(F: VectorField3, G: VectorField3) -> float:
    """L2 pairing h^3 * sum over nodes and components of F_j G_j."""
    F.grid.check_same(G.grid)
    return float(np.sum(F.values * G.values) * F.grid.cell_volume)


def norm(F: VectorField3) -> float:
    return float(np.sqrt(inner_product(F, F)))


def integral(F: VectorField3) -> np.ndarray:
    """Componentwise integral over the box."""
    return np.sum(F.values, axis=(1, 2, 3)) * F.grid.cell_volume


def cross(F: VectorField3, G: VectorField3) -> VectorField3:
    """Pointwise F ∧ G."""
    F.grid.check_same(G.grid)
    return VectorField3(F.grid, np.cross(F.values, G.values, axis=0))


def cross_const(c: np.ndarray, F: VectorField3) -> VectorField3:
    """Pointwise c ∧ F for a constant vector c."""
    c = np.broadcast_to(np.asarray(c, dtype=float).reshape(3, 1, 1, 1), F.values.shape)
    return VectorField3(F.grid, np.cross(c, F.values, axis=0))


def curl(F: VectorField3) -> VectorField3:
    k = F.grid.wavenumbers
    F_hat = F.hat
    curl_hat = 1j * np.stack(
        [
            k[1] * F_hat[2] - k[2] * F_hat[1],
            k[2] * F_hat[0] - k[0] * F_hat[2],
            k[0] * F_hat[1] - k[1] * F_hat[0],
        ]
    )
    return VectorField3.from_hat(F.grid, curl_hat)


def divergence(F: VectorField3) -> ScalarField:
    k = F.grid.wavenumbers
    return ScalarField.from_hat(F.grid, 1j * np.sum(k * F.hat, axis=0))


def gradient(f: ScalarField) -> VectorField3:
    return VectorField3.from_hat(f.grid, 1j * f.grid.wavenumbers * f.hat[None])


def jacobian(F: VectorField3) -> np.ndarray:
    """Array J[n, m] = ∂_n F_m, shape (3, 3, N, N, N)."""
    k = F.grid.wavenumbers
    return backward(1j * k[:, None] * F.hat[None, :], F.grid)


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField.from_hat(f.grid, -f.grid.k_squared * f.hat)


def vector_laplacian(F: VectorField3) -> VectorField3:
    return VectorField3.from_hat(F.grid, -F.grid.k_squared * F.hat)


def laplacian_inverse(f: ScalarField) -> ScalarField:
    """
    Solve Δg = f - mean(f) with mean(g) = 0.

    Modes whose Nyquist-zeroed |k|^2 vanishes (k = 0 and pure Nyquist modes) are set to zero.
    """
    k2 = f.grid.k_squared
    safe = np.where(k2 > 0, k2, 1.0)
    return ScalarField.from_hat(f.grid, np.where(k2 > 0, -f.hat / safe, 0.0))


def leray_project(F: VectorField3) -> VectorField3:
    """Divergence-free part F_hat - k (k·F_hat)/|k|^2; modes with |k| = 0 pass through."""
    k = F.grid.wavenumbers
    k2 = F.grid.k_squared
    F_hat = F.hat
    safe = np.where(k2 > 0, k2, 1.0)
    longitudinal = np.where(k2 > 0, np.sum(k * F_hat, axis=0) / safe, 0.0)
    return VectorField3.from_hat(F.grid, F_hat - k * longitudinal[None])


def phase(grid: GridSpec, d) -> np.ndarray:
    """Multiplier exp(-i k·d) translating samples by +d, Nyquist modes removed."""
    k = grid.wavenumbers
    d = np.asarray(d, dtype=float)
    arg = k[0] * d[0] + k[1] * d[1] + k[2] * d[2]
    return np.where(grid.nyquist_mask, np.exp(-1j * arg), 0.0)


def shift(F: VectorField3, d) -> VectorField3:
    """Spectral translation F(x - d); exact for band-limited, Nyquist-free fields."""
    return VectorField3.from_hat(F.grid, F.hat * phase(F.grid, d)[None])


def centered_coordinate(grid: GridSpec, q=(0.0, 0.0, 0.0)) -> VectorField3:
    """Component j at node x is x_j - q_j wrapped into [-L/2, L/2)."""
    q = np.asarray(q, dtype=float).reshape(3, 1, 1, 1)
    return VectorField3(grid, grid.wrap(grid.coordinates - q))


def directional_derivative(u: VectorField3, F: VectorField3) -> VectorField3:
    """(u·∇)F with u multiplied in physical space and derivatives taken spectrally."""
    u.grid.check_same(F.grid)
    return VectorField3(F.grid, np.einsum("nxyz,nmxyz->mxyz", u.values, jacobian(F)))


def seam_leakage(values: np.ndarray, grid: GridSpec, margin: float | None = None) -> float:
    """Largest |values| within `margin` (default 2h) of the seam, relative to the global max."""
    margin = 2 * grid.h if margin is None else margin
    x = grid.coordinates
    near = np.any(np.abs(x) >= grid.L / 2 - margin, axis=0)
    values = np.abs(np.asarray(values)).reshape(-1, *grid.shape)
    peak = float(values.max())
    if peak == 0.0:
        return 0.0
    return float(values[:, near].max() / peak)


def warn_if_near_seam(F: VectorField3, what: str, tolerance: float = 1e-8) -> None:
    leak = seam_leakage(F.values, F.grid)
    if leak > tolerance:
        warnings.warn(
            f"{what} reaches the wrap seam (relative amplitude {leak:.2e}); "
            "moment integrals lose accuracy",
            SeamWarning,
            stacklevel=3,
        )
