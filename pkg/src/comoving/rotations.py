"""SO(3) action on comoving states, the hat map and the deformation vector field."""

from __future__ import annotations

import itertools
import logging
from functools import lru_cache

import numpy as np
from scipy.ndimage import map_coordinates

from src.comoving.transform import ComovingState
from src.errors import RotationError
from src.grid_fields.grid import VectorField3
from src.grid_fields.operators import centered_coordinate, cross_const, directional_derivative
from src.hamiltonian_core.state import TangentVector

logger = logging.getLogger(__name__)


def hat(xi) -> np.ndarray:
    """Skew matrix with hat(xi) @ u == xi ∧ u."""
    x1, x2, x3 = np.asarray(xi, dtype=float).reshape(3)
    return np.array([[0.0, -x3, x2], [x3, 0.0, -x1], [-x2, x1, 0.0]])


@lru_cache(maxsize=1)
def cubic_rotations() -> tuple[np.ndarray, ...]:
    """The 24 proper rotations mapping the cube (and the grid) onto itself."""
    rotations = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            R = np.zeros((3, 3))
            for row, (col, sign) in enumerate(zip(perm, signs, strict=True)):
                R[row, col] = sign
            if np.isclose(np.linalg.det(R), 1.0):
                R.setflags(write=False)
                rotations.append(R)
    return tuple(rotations)


def is_cubic_rotation(R: np.ndarray) -> bool:
    return any(np.array_equal(R, C) for C in cubic_rotations())


def _check_rotation(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise RotationError(f"rotation must be 3x3, got shape {R.shape}")
    if not np.allclose(R.T @ R, np.eye(3), atol=1e-12) or not np.isclose(np.linalg.det(R), 1.0):
        raise RotationError("matrix is not a proper orthogonal rotation")
    return R


def _source_indices(R: np.ndarray, n: int) -> np.ndarray:
    """Grid index (possibly fractional) of R^{-1} y for every node y, shape (3, n, n, n)."""
    centre = n // 2
    idx = np.indices((n, n, n)).reshape(3, -1) - centre
    return (R.T @ idx + centre).reshape(3, n, n, n)


def rotate_field(
    R: np.ndarray, F: VectorField3, approximate: bool = False, order: int = 1
) -> VectorField3:
    """y -> R F(R^{-1} y), exact on the cubic group, periodic spline of `order` otherwise."""
    n = F.grid.N
    src = _source_indices(R, n)
    if not approximate:
        src = np.mod(np.rint(src).astype(int), n)
        pulled = F.values[:, src[0], src[1], src[2]]
    else:
        pulled = np.stack(
            [map_coordinates(F.values[m], src, order=order, mode="grid-wrap") for m in range(3)]
        )
    return VectorField3(F.grid, np.einsum("ij,jxyz->ixyz", R, pulled))


def rotate_state(
    R, Yc: ComovingState, approximate: bool = False, order: int = 1
) -> ComovingState:
    """
    Action T(R)Y = (R bA(R^{-1} y), R bPi(R^{-1} y), R q, R P, R pi).

    Cubic-group rotations permute grid nodes and are exact. Any other rotation needs
    `approximate=True` and is resampled with a periodic spline of `order` (1 is trilinear,
    3 and 5 are accurate enough to differentiate in the angle).

    Raises:
        RotationError: if R is not a rotation, or not cubic without `approximate`
    """
    R = _check_rotation(R)
    cubic = is_cubic_rotation(np.rint(R)) and np.allclose(R, np.rint(R))
    if cubic:
        R = np.rint(R)
    elif not approximate:
        raise RotationError("exact mode needs one of the 24 cubic rotations")
    else:
        logger.debug("Approximate rotation with order-%d spline resampling", order)
    use_interp = not cubic
    return ComovingState(
        rotate_field(R, Yc.bA, use_interp, order),
        rotate_field(R, Yc.bPi, use_interp, order),
        R @ Yc.q,
        R @ Yc.P,
        R @ Yc.pi,
    )


def rotation_matrix(xi, s: float = 1.0) -> np.ndarray:
    """exp(s * hat(xi)) by Rodrigues' formula."""
    K = hat(xi)
    theta = s * float(np.linalg.norm(xi))
    if theta == 0.0:
        return np.eye(3)
    K = K / np.linalg.norm(xi)
    return np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * (K @ K)


def field_deformation(xi, F: VectorField3) -> VectorField3:
    """xi ∧ F - ((xi ∧ y)·∇) F."""
    u = cross_const(xi, centered_coordinate(F.grid))
    return cross_const(xi, F) - directional_derivative(u, F)


def deformation_field(xi, Yc: ComovingState) -> TangentVector:
    """Generator v_xi of the rotation action along exp(s hat(xi))."""
    xi = np.asarray(xi, dtype=float)
    return TangentVector(
        field_deformation(xi, Yc.bA),
        field_deformation(xi, Yc.bPi),
        np.cross(xi, Yc.q),
        np.cross(xi, Yc.P),
        np.cross(xi, Yc.pi),
    )
