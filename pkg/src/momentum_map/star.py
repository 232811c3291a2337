"""The starred pairings <Pi, ∇_* A> and <((x-q)∧∇)_* A, Pi>."""

from __future__ import annotations

import numpy as np

from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import centered_coordinate, jacobian


def grad_star_inner(Pi: VectorField3, A: VectorField3) -> np.ndarray:
    """Component n is <Pi, ∂_n A> = sum_j <Pi_j, ∂_n A_j>."""
    Pi.grid.check_same(A.grid)
    dA = jacobian(A)
    return np.einsum("mxyz,nmxyz->n", Pi.values, dA) * A.grid.cell_volume


def rotation_generator_pairs(A: VectorField3, Pi: VectorField3, q=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Array G[i, j] = <(x-q)_i ∂_j A, Pi>, the building block of every angular pairing."""
    A.grid.check_same(Pi.grid)
    y = centered_coordinate(A.grid, q).values
    dA = jacobian(A)
    weighted = np.einsum("mxyz,jmxyz->jxyz", Pi.values, dA)
    return np.einsum("ixyz,jxyz->ij", y, weighted) * A.grid.cell_volume


def angular_star_inner(A: VectorField3, Pi: VectorField3, q=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Component n is <((x-q)∧∇)_n A, Pi> with ((x-q)∧∇)_n = eps_{nij} (x-q)_i ∂_j."""
    G = rotation_generator_pairs(A, Pi, q)
    return np.array([G[1, 2] - G[2, 1], G[2, 0] - G[0, 2], G[0, 1] - G[1, 0]])
