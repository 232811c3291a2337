"""Binary state snapshots.

Layout: magic b"MLSPIN1\\0", then little-endian float64 values L, N, q(3), p(3), pi(3),
followed by A and Pi, each component-major with the x index varying fastest.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from src.errors import MLSpinError
from src.grid_fields.grid import GridSpec, VectorField3
from src.hamiltonian_core.state import State

MAGIC = b"MLSPIN1\x00"
_F8 = np.dtype("<f8")
_HEADER_FLOATS = 11


def _field_block(F: VectorField3) -> np.ndarray:
    return np.concatenate([F.values[j].ravel(order="F") for j in range(3)])


def _field_from_block(block: np.ndarray, grid: GridSpec) -> VectorField3:
    n = grid.N
    comps = block.reshape(3, n**3)
    return VectorField3(grid, np.stack([c.reshape((n, n, n), order="F") for c in comps]))


def write_snapshot(Y: State, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = Y.grid
    header = np.concatenate([[grid.L, float(grid.N)], Y.q, Y.p, Y.pi])
    payload = np.concatenate([header, _field_block(Y.A), _field_block(Y.Pi)]).astype(_F8)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(payload.tobytes())


def read_snapshot(path: str | Path) -> State:
    """
    Load a snapshot written by write_snapshot.

    Raises:
        MLSpinError: if the magic or the payload length is wrong
    """
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise MLSpinError(f"{path} is not an MLSPIN1 snapshot")
    data = np.frombuffer(raw[len(MAGIC):], dtype=_F8)
    if data.size < _HEADER_FLOATS:
        raise MLSpinError(f"{path} is truncated")
    L, N = float(data[0]), int(data[1])
    grid = GridSpec(L=L, N=N)
    expected = _HEADER_FLOATS + 6 * N**3
    if data.size != expected:
        raise MLSpinError(f"{path} holds {data.size} values, expected {expected}")
    q, p, pi = data[2:5], data[5:8], data[8:11]
    fields = data[_HEADER_FLOATS:]
    half = 3 * N**3
    A = _field_from_block(fields[:half], grid)
    Pi = _field_from_block(fields[half:], grid)
    return State(A, Pi, q, p, pi)
