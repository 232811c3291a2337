"""Smooth, localized, divergence-free random fields for initial data and test directions."""

from __future__ import annotations

import numpy as np

from src.grid_fields.grid import GridSpec, VectorField3
from src.grid_fields.operators import centered_coordinate, curl


def localized_solenoidal_field(
    grid: GridSpec,
    rng: np.random.Generator,
    envelope_radius: float = 1.0,
    amplitude: float = 1.0,
    centre=(0.0, 0.0, 0.0),
) -> VectorField3:
    """
    Curl of a Gaussian envelope times a random quadratic polynomial per component.

    The result is divergence-free, has no Nyquist content and is scaled so that its
    largest component magnitude equals `amplitude`.
    """
    if envelope_radius <= 0:
        raise ValueError(f"envelope radius must be positive, got {envelope_radius}")
    y = centered_coordinate(grid, centre).values / envelope_radius
    envelope = np.exp(-0.5 * np.sum(y**2, axis=0))

    constant = rng.standard_normal(3)
    linear = rng.standard_normal((3, 3))
    quadratic = rng.standard_normal((3, 3, 3))
    poly = (
        constant.reshape(3, 1, 1, 1)
        + np.einsum("ja,axyz->jxyz", linear, y)
        + 0.5 * np.einsum("jab,axyz,bxyz->jxyz", quadratic, y, y)
    )
    field = curl(VectorField3(grid, poly * envelope[None]))
    field = VectorField3.from_hat(grid, field.hat * grid.nyquist_mask[None])
    peak = field.max_abs()
    if peak == 0.0:
        return field
    return (amplitude / peak) * field
