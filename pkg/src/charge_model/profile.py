"""Spherically symmetric bump charge density and its shifted pairings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from src.errors import ChargeSupportError
from src.grid_fields.grid import GridSpec, ScalarField, VectorField3, backward, forward
from src.grid_fields.operators import centered_coordinate, laplacian_inverse, phase

logger = logging.getLogger(__name__)

# Index pairs (j, m) with epsilon_{n j m} = +1 for n = 0, 1, 2.
_LEVI_CIVITA_PAIRS = ((1, 2), (2, 0), (0, 1))


def bump(r: np.ndarray, R_rho: float) -> np.ndarray:
    """Unnormalized exp(-R^2 / (R^2 - r^2)) inside r < R, zero outside."""
    r = np.asarray(r, dtype=float)
    inside = r < R_rho
    out = np.zeros_like(r)
    out[inside] = np.exp(-(R_rho**2) / (R_rho**2 - r[inside] ** 2))
    return out


def antisymmetric_part(pairs: np.ndarray) -> np.ndarray:
    """Vector n -> sum_{jm} eps_{njm} pairs[j, m] for a 3x3 array."""
    return np.array([pairs[j, m] - pairs[m, j] for j, m in _LEVI_CIVITA_PAIRS])


@dataclass(frozen=True, eq=False)
class ChargeProfile:
    """
    Charge density rho(y) = C * bump(|y|) sampled at the origin-centred nodes.

    Off-grid centres are handled by Fourier phase shifts of the precomputed kernels
    rho, y_j rho and y_i y_j rho. All kernels have their Nyquist content removed so
    that shifts stay real and the charge pairings are exact derivatives of each other.
    """

    R_rho: float
    Q: float
    grid: GridSpec
    normalization: float
    rho: ScalarField = field(repr=False)
    moment_kernels: VectorField3 = field(repr=False)
    second_moments: np.ndarray = field(repr=False)

    @property
    def rho_hat(self) -> np.ndarray:
        return self.rho.hat

    @property
    def moment_hat(self) -> np.ndarray:
        return self.moment_kernels.hat

    @property
    def background_density(self) -> float:
        """Neutralizing background Q / L^3."""
        return self.Q / self.grid.volume

    @property
    def radius_of_gyration_sq(self) -> float:
        """<r^2>_rho = h^3 sum |y|^2 rho / Q."""
        if self.Q == 0:
            return 0.0
        return float(np.trace(self._second_moment_totals()) / self.Q)

    def _second_moment_totals(self) -> np.ndarray:
        return np.sum(self.second_moments, axis=(2, 3, 4)) * self.grid.cell_volume

    @lru_cache(maxsize=4)  # noqa: B019
    def _kernels_at(self, q: tuple[float, float, float]) -> np.ndarray:
        """Samples of rho(x - q) and y_j rho(x - q), shape (4, N, N, N)."""
        hats = np.concatenate([self.rho_hat[None], self.moment_hat])
        out = backward(hats * phase(self.grid, q)[None], self.grid)
        out.setflags(write=False)
        return out

    @lru_cache(maxsize=4)  # noqa: B019
    def _kernel_gradients_at(self, q: tuple[float, float, float]) -> np.ndarray:
        """Samples of (d_n K)(x - q) for K in (rho, y_j rho), shape (3, 4, N, N, N)."""
        k = self.grid.wavenumbers
        hats = np.concatenate([self.rho_hat[None], self.moment_hat])
        shifted = hats * phase(self.grid, q)[None]
        out = backward(1j * k[:, None] * shifted[None], self.grid)
        out.setflags(write=False)
        return out

    def shifted_density(self, q) -> np.ndarray:
        return self._kernels_at(_as_key(q))[0]

    def shifted_moments(self, q) -> np.ndarray:
        return self._kernels_at(_as_key(q))[1:]

    def shifted_density_gradient(self, q) -> np.ndarray:
        return self._kernel_gradients_at(_as_key(q))[:, 0]

    def shifted_moment_gradient(self, q) -> np.ndarray:
        """Array G[n, j] = (d_n (y_j rho))(x - q)."""
        return self._kernel_gradients_at(_as_key(q))[:, 1:]

    def shifted_second_moments(self, q) -> np.ndarray:
        """Array S[i, j] = (y_i y_j rho)(x - q)."""
        hats = forward(self.second_moments)
        return backward(hats * phase(self.grid, q), self.grid)

    def charge_inner(self, F: VectorField3, q) -> np.ndarray:
        """<F(x), rho(x - q)> componentwise."""
        self.grid.check_same(F.grid)
        rho_q = self.shifted_density(q)
        return np.einsum("jxyz,xyz->j", F.values, rho_q) * self.grid.cell_volume

    def moment_pairs(self, F: VectorField3, q) -> np.ndarray:
        """Array P[j, m] = <F_m, (y_j rho)(x - q)>."""
        self.grid.check_same(F.grid)
        moments = self.shifted_moments(q)
        return np.einsum("jxyz,mxyz->jm", moments, F.values) * self.grid.cell_volume

    def moment_inner(self, F: VectorField3, q) -> np.ndarray:
        """<(x - q) ∧ F(x), rho(x - q)> from the shifted moment kernels."""
        return antisymmetric_part(self.moment_pairs(F, q))

    def coulomb_potential(self, q) -> ScalarField:
        """Phi with ΔPhi = -(rho(x - q) - Q/L^3) and zero mean."""
        rho_q = ScalarField(self.grid, self.shifted_density(q))
        return laplacian_inverse(-rho_q)


def _as_key(q) -> tuple[float, float, float]:
    q = np.asarray(q, dtype=float).reshape(3)
    return (float(q[0]), float(q[1]), float(q[2]))


def make_profile(R_rho: float, Q: float, grid: GridSpec) -> ChargeProfile:
    """
    Build the normalized bump profile on `grid`.

    Args:
        R_rho: Support radius of the charge
        Q: Total charge
        grid: Periodic grid the profile is sampled on

    Returns:
        ChargeProfile: profile with h^3 * sum(rho) == Q

    Raises:
        ChargeSupportError: if 2 * R_rho >= L/2
    """
    if R_rho <= 0:
        raise ValueError(f"support radius must be positive, got R_rho={R_rho}")
    if 2 * R_rho >= grid.L / 2:
        raise ChargeSupportError()

    y = centered_coordinate(grid).values
    r = np.sqrt(np.sum(y**2, axis=0))
    raw = bump(r, R_rho)
    total = float(np.sum(raw) * grid.cell_volume)
    if total == 0.0:
        raise ChargeSupportError("charge support not resolved by the grid")
    normalization = Q / total
    density = normalization * raw

    mask = grid.nyquist_mask

    def _clean(values: np.ndarray) -> np.ndarray:
        return backward(forward(values) * mask, grid)

    rho = ScalarField(grid, _clean(density))
    moments = VectorField3(grid, _clean(y * density[None]))
    second = _clean(y[:, None] * y[None, :] * density[None, None])
    second.setflags(write=False)

    profile = ChargeProfile(
        R_rho=R_rho,
        Q=Q,
        grid=grid,
        normalization=normalization,
        rho=rho,
        moment_kernels=moments,
        second_moments=second,
    )
    logger.debug(
        "Charge profile built: R_rho=%s, Q=%s, C=%.6e, h=%s, <r^2>=%.4f",
        R_rho,
        Q,
        normalization,
        grid.h,
        profile.radius_of_gyration_sq,
    )
    return profile
