"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np

from .discretization import PhysicalParams, SaddleState
from .grid import StaggeredGrid


def check_n_cells(n, coarsest: int = 4) -> int:
    """Return ``n`` as an int if it equals ``coarsest * 2^k``, else raise ``ValueError``."""
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise TypeError(f"grid size must be an integer, got {n!r}")
    n = int(n)
    m, rem = divmod(n, coarsest)
    if n < coarsest or rem or m & (m - 1):
        raise ValueError(f"grid size must be {coarsest} * 2^k, got {n}")
    return n


def check_params(epsilon, nu) -> PhysicalParams:
    return PhysicalParams(float(epsilon), float(nu))


def check_damping(value, name: str = "omega") -> float:
    value = float(value)
    if not 0.0 < value < 2.0:
        raise ValueError(f"{name} must lie in (0, 2), got {value}")
    return value


def check_vector(x, grid: StaggeredGrid, name: str = "x") -> np.ndarray:
    """Flatten ``x`` (a :class:`SaddleState` or array) into a stacked float vector."""
    if isinstance(x, SaddleState):
        if x.grid != grid:
            raise ValueError(
                f"{name} lives on N={x.grid.n_cells}, expected N={grid.n_cells}"
            )
        return x.to_vector()
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != grid.n_total:
        raise ValueError(
            f"{name} must be a vector of length {grid.n_total} for N={grid.n_cells}, "
            f"got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr
