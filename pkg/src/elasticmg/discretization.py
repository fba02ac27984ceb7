"""MAC discretization of the mixed displacement-pressure elasticity system.

The discrete system has the saddle-point form::

    [ A   B^T ] [u]   [f]
    [ B   -C  ] [p] = [0]

with ``A = -eps * Laplacian`` on each displacement component, ``B`` the
``tau``-scaled discrete divergence and ``C = (tau / lam) I``.  Tangential
Dirichlet values are imposed through a ghost value ``u_ghost = -u_interior``,
so rows next to a wall in the staggered direction carry ``5 eps / h^2`` on
the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .grid import DofFamily, StaggeredField, StaggeredGrid

__all__ = [
    "PhysicalParams",
    "SaddleState",
    "SaddleOperator",
    "assemble_saddle",
    "apply_saddle",
    "manufactured_solution",
    "assemble_rhs",
    "error_norms",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Shear modulus ``epsilon`` and Poisson ratio ``nu``.

    ``lam = 2 nu / (1 - 2 nu)`` and ``tau = (lam + epsilon) / lam``.
    """

    epsilon: float = 1.0
    nu: float = 0.45

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.nu < 0.5:
            raise ValueError(f"nu must lie in (0, 1/2), got {self.nu}")

    @property
    def lam(self) -> float:
        return 2.0 * self.nu / (1.0 - 2.0 * self.nu)

    @property
    def tau(self) -> float:
        return (self.lam + self.epsilon) / self.lam

    @property
    def c_coef(self) -> float:
        """Diagonal of the pressure block, ``tau / lam``."""
        return self.tau / self.lam


@dataclass
class SaddleState:
    """Displacement and pressure values on one grid, each stored flat."""

    grid: StaggeredGrid
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for fam, name in ((DofFamily.UFACE, "u"), (DofFamily.VFACE, "v"), (DofFamily.CENTER, "p")):
            # StaggeredField does the length check
            setattr(self, name, StaggeredField(fam, self.grid, getattr(self, name)).values)

    @classmethod
    def zeros(cls, grid: StaggeredGrid) -> "SaddleState":
        return cls(grid, np.zeros(grid.n_u), np.zeros(grid.n_v), np.zeros(grid.n_p))

    @classmethod
    def from_vector(cls, grid: StaggeredGrid, x: np.ndarray) -> "SaddleState":
        x = np.asarray(x, dtype=float)
        if x.shape != (grid.n_total,):
            raise ValueError(f"expected vector of length {grid.n_total}, got shape {x.shape}")
        nu, nv = grid.n_u, grid.n_v
        return cls(grid, x[:nu].copy(), x[nu:nu + nv].copy(), x[nu + nv:].copy())

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u, self.v, self.p])

    def field(self, family: DofFamily) -> StaggeredField:
        values = {DofFamily.UFACE: self.u, DofFamily.VFACE: self.v, DofFamily.CENTER: self.p}
        return StaggeredField(family, self.grid, values[family])


def _dirichlet_1d(m: int) -> sp.csr_matrix:
    # second difference on m interior nodes, boundary nodes eliminated
    return sp.diags([-np.ones(m - 1), 2.0 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1], format="csr")


def _reflected_1d(m: int) -> sp.csr_matrix:
    # second difference on m half-offset nodes with ghost = -first/last value
    d = 2.0 * np.ones(m)
    d[0] = d[-1] = 3.0
    return sp.diags([-np.ones(m - 1), d, -np.ones(m - 1)], [-1, 0, 1], format="csr")


def _face_difference_1d(n: int) -> sp.csr_matrix:
    # cell c <- face c+1 minus face c, faces 1..n-1 kept (0 and n are walls)
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 0], shape=(n, n - 1), format="csr")


def scalar_laplacians(grid: StaggeredGrid) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Boundary-modified ``-Laplacian`` (unscaled by epsilon) on the u and v grids."""
    n, h2 = grid.n_cells, grid.h ** 2
    eye_n, eye_m = sp.identity(n, format="csr"), sp.identity(n - 1, format="csr")
    # flat index = ix + nx * iy  ->  kron(y-operator, x-operator)
    lap_u = sp.kron(eye_n, _dirichlet_1d(n - 1)) + sp.kron(_reflected_1d(n), eye_m)
    lap_v = sp.kron(eye_m, _reflected_1d(n)) + sp.kron(_dirichlet_1d(n - 1), eye_n)
    return (lap_u / h2).tocsr(), (lap_v / h2).tocsr()


class SaddleOperator:
    """One discretization level: assembled blocks plus a matrix-free apply."""

    def __init__(self, grid: StaggeredGrid, params: PhysicalParams):
        self.grid = grid
        self.params = params
        n, h = grid.n_cells, grid.h
        eps, tau = params.epsilon, params.tau

        lap_u, lap_v = scalar_laplacians(grid)
        self.A = sp.block_diag([eps * lap_u, eps * lap_v], format="csr")

        diff = _face_difference_1d(n)
        eye_n = sp.identity(n, format="csr")
        bx = sp.kron(eye_n, diff)
        by = sp.kron(diff, eye_n)
        self.B = ((tau / h) * sp.hstack([bx, by])).tocsr()
        self.C = params.c_coef * sp.identity(grid.n_p, format="csr")

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Full ``[[A, B^T], [B, -C]]`` in CSR form."""
        return sp.bmat([[self.A, self.B.T], [self.B, -self.C]], format="csr")

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Matrix-free product with the full saddle matrix on a stacked vector."""
        g = self.grid
        n, h = g.n_cells, g.h
        eps, tau, c = self.params.epsilon, self.params.tau, self.params.c_coef
        nu, nv = g.n_u, g.n_v
        if x.shape != (g.n_total,):
            raise ValueError(f"expected vector of length {g.n_total}, got shape {x.shape}")
        U = x[:nu].reshape(n, n - 1)
        V = x[nu:nu + nv].reshape(n - 1, n)
        P = x[nu + nv:].reshape(n, n)

        # zero walls for the normal component, reflected ghosts for the tangential one
        Ue = np.zeros((n + 2, n + 1))
        Ue[1:-1, 1:-1] = U
        Ue[0, 1:-1] = -U[0]
        Ue[-1, 1:-1] = -U[-1]
        Ve = np.zeros((n + 1, n + 2))
        Ve[1:-1, 1:-1] = V
        Ve[1:-1, 0] = -V[:, 0]
        Ve[1:-1, -1] = -V[:, -1]

        out = np.empty_like(x)
        s = eps / h ** 2
        ou = s * (4.0 * U - Ue[1:-1, :-2] - Ue[1:-1, 2:] - Ue[:-2, 1:-1] - Ue[2:, 1:-1])
        ou += (tau / h) * (P[:, :-1] - P[:, 1:])
        ov = s * (4.0 * V - Ve[1:-1, :-2] - Ve[1:-1, 2:] - Ve[:-2, 1:-1] - Ve[2:, 1:-1])
        ov += (tau / h) * (P[:-1, :] - P[1:, :])
        div = (Ue[1:-1, 1:] - Ue[1:-1, :-1]) + (Ve[1:, 1:-1] - Ve[:-1, 1:-1])
        op = (tau / h) * div - c * P
        out[:nu] = ou.ravel()
        out[nu:nu + nv] = ov.ravel()
        out[nu + nv:] = op.ravel()
        return out

    def residual(self, x: np.ndarray, b: np.ndarray) -> np.ndarray:
        return b - self.apply(x)


def assemble_saddle(grid: StaggeredGrid, params: PhysicalParams) -> SaddleOperator:
    return SaddleOperator(grid, params)


def apply_saddle(op: SaddleOperator, x: SaddleState) -> SaddleState:
    if x.grid != op.grid:
        raise ValueError(
            f"state lives on N={x.grid.n_cells}, operator on N={op.grid.n_cells}"
        )
    return SaddleState.from_vector(op.grid, op.apply(x.to_vector()))


def exact_displacement(x, y, params: PhysicalParams):
    """Closed-form ``(u, v)`` of the benchmark problem."""
    bump = np.sin(np.pi * x) * np.sin(np.pi * y) / (1.0 + params.lam)
    u = (-1.0 + np.cos(2 * np.pi * x)) * np.sin(2 * np.pi * y) + bump
    v = (1.0 - np.cos(2 * np.pi * y)) * np.sin(2 * np.pi * x) + bump
    return u, v


def exact_pressure(x, y, params: PhysicalParams):
    # lam * div(u) collapses to a single sine
    lam = params.lam
    return lam * np.pi / (1.0 + lam) * np.sin(np.pi * (x + y))


def source_term(x, y, params: PhysicalParams):
    """``f = -eps Lap(u) - (lam + eps) grad(div u)`` for the benchmark solution."""
    eps, lam = params.epsilon, params.lam
    pi2 = np.pi ** 2
    a = (lam + 3 * eps) * pi2 / (1 + lam) * np.sin(np.pi * x) * np.sin(np.pi * y)
    b = (lam + eps) * pi2 / (1 + lam) * np.cos(np.pi * x) * np.cos(np.pi * y)
    f1 = (a + 8 * pi2 * eps * np.sin(2 * np.pi * y) * np.cos(2 * np.pi * x)
          - 4 * pi2 * eps * np.sin(2 * np.pi * y) - b)
    f2 = (a - 8 * pi2 * eps * np.cos(2 * np.pi * y) * np.sin(2 * np.pi * x)
          + 4 * pi2 * eps * np.sin(2 * np.pi * x) - b)
    return f1, f2


def manufactured_solution(grid: StaggeredGrid, params: PhysicalParams) -> SaddleState:
    xu, yu = grid.coordinates(DofFamily.UFACE)
    xv, yv = grid.coordinates(DofFamily.VFACE)
    xp, yp = grid.coordinates(DofFamily.CENTER)
    u, _ = exact_displacement(xu, yu, params)
    _, v = exact_displacement(xv, yv, params)
    return SaddleState(grid, u, v, exact_pressure(xp, yp, params))


def assemble_rhs(grid: StaggeredGrid, params: PhysicalParams) -> SaddleState:
    xu, yu = grid.coordinates(DofFamily.UFACE)
    xv, yv = grid.coordinates(DofFamily.VFACE)
    f1, _ = source_term(xu, yu, params)
    _, f2 = source_term(xv, yv, params)
    return SaddleState(grid, f1, f2, np.zeros(grid.n_p))


def error_norms(approx: SaddleState, exact: SaddleState) -> tuple[float, float, float]:
    """Discrete L2 errors ``sqrt(sum(diff^2) h^2)`` for u, v and p."""
    if approx.grid != exact.grid:
        raise ValueError("states live on different grids")
    h = approx.grid.h
    return tuple(
        float(h * np.linalg.norm(getattr(approx, k) - getattr(exact, k))) for k in "uvp"
    )
