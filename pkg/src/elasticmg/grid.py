"""Staggered (MAC) grid geometry on the unit square.

Three DOF families live on a uniform ``N x N`` cell grid with ``h = 1/N``:

* ``UFACE``  -- x-displacement at vertical edge midpoints ``(i h, (j+1/2) h)``
* ``VFACE``  -- y-displacement at horizontal edge midpoints ``((i+1/2) h, j h)``
* ``CENTER`` -- pressure at cell centers ``((i+1/2) h, (j+1/2) h)``

Normal displacement components on the walls are homogeneous Dirichlet values
and are eliminated, so ``u`` has ``(N-1) N`` unknowns, ``v`` has ``N (N-1)``
and ``p`` has ``N^2``.  Storage is flat with the x index running fastest and
the y level slowest; 2D views have shape ``(ny, nx)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = ["DofFamily", "StaggeredGrid", "StaggeredField", "dof_count", "linear_index"]


class DofFamily(enum.Enum):
    UFACE = "u"
    VFACE = "v"
    CENTER = "p"


@dataclass(frozen=True)
class StaggeredGrid:
    """Uniform MAC grid with ``n_cells`` cells per dimension."""

    n_cells: int

    def __post_init__(self):
        n = self.n_cells
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"n_cells must be an integer, got {type(n).__name__}")
        if n < 2:
            raise ValueError(f"n_cells must be >= 2, got {n}")
        object.__setattr__(self, "n_cells", int(n))

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    def shape(self, family: DofFamily) -> tuple[int, int]:
        """2D storage shape ``(ny, nx)`` of a family."""
        n = self.n_cells
        if family is DofFamily.UFACE:
            return (n, n - 1)
        if family is DofFamily.VFACE:
            return (n - 1, n)
        return (n, n)

    @property
    def n_u(self) -> int:
        return dof_count(self, DofFamily.UFACE)

    @property
    def n_v(self) -> int:
        return dof_count(self, DofFamily.VFACE)

    @property
    def n_p(self) -> int:
        return dof_count(self, DofFamily.CENTER)

    @property
    def n_velocity(self) -> int:
        return self.n_u + self.n_v

    @property
    def n_total(self) -> int:
        return self.n_u + self.n_v + self.n_p

    def coordinates(self, family: DofFamily) -> tuple[np.ndarray, np.ndarray]:
        """Physical ``(x, y)`` of every DOF of ``family`` in flat storage order."""
        n, h = self.n_cells, self.h
        if family is DofFamily.UFACE:
            xs = np.arange(1, n) * h
            ys = (np.arange(n) + 0.5) * h
        elif family is DofFamily.VFACE:
            xs = (np.arange(n) + 0.5) * h
            ys = np.arange(1, n) * h
        else:
            xs = (np.arange(n) + 0.5) * h
            ys = (np.arange(n) + 0.5) * h
        x, y = np.meshgrid(xs, ys)
        return x.ravel(), y.ravel()

    def coarsen(self) -> "StaggeredGrid":
        if self.n_cells % 2:
            raise ValueError(f"cannot coarsen a grid with odd n_cells={self.n_cells}")
        return StaggeredGrid(self.n_cells // 2)


def dof_count(grid: StaggeredGrid, family: DofFamily) -> int:
    ny, nx = grid.shape(family)
    return ny * nx


def linear_index(grid: StaggeredGrid, family: DofFamily, i: int, j: int) -> int:
    """Position of a DOF in flat storage, using the 1-based labels of the vec ordering.

    For ``UFACE``, ``i`` in ``1..N-1`` is the x node and ``j`` in ``1..N`` picks
    the y level ``j - 1/2``.  For ``VFACE``, ``i`` in ``1..N`` picks the x level
    ``i - 1/2`` and ``j`` in ``1..N-1`` is the y node.  For ``CENTER`` both run
    over ``1..N``.
    """
    ny, nx = grid.shape(family)
    if not (1 <= i <= nx and 1 <= j <= ny):
        raise IndexError(
            f"({i}, {j}) outside the {family.name} index range 1..{nx} x 1..{ny}"
        )
    return (i - 1) + nx * (j - 1)


@dataclass
class StaggeredField:
    """Values of one DOF family on a grid, stored flat in vec order."""

    family: DofFamily
    grid: StaggeredGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = dof_count(self.grid, self.family)
        if self.values.shape != (expected,):
            raise ValueError(
                f"{self.family.name} field on N={self.grid.n_cells} needs {expected} "
                f"values, got shape {self.values.shape}"
            )

    @classmethod
    def zeros(cls, grid: StaggeredGrid, family: DofFamily) -> "StaggeredField":
        return cls(family, grid, np.zeros(dof_count(grid, family)))

    def as_2d(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape(self.family))
