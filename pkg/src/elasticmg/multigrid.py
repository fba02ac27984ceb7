"""Geometric multigrid for the MAC saddle system.

Coarse levels are rediscretized at ``2h``.  Velocity restriction uses six
fine points: full weighting ``(1, 2, 1)/4`` along the direction in which the
coarse DOF sits on a fine DOF line, and a two-point average ``(1, 1)/2``
across the staggered direction.  Pressure uses the four-cell average.
Prolongation is ``4 R^T`` for every family.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretization import PhysicalParams, SaddleOperator, SaddleState, assemble_saddle
from .grid import StaggeredGrid
from .smoother import BraessSarazinSmoother, SmootherConfig

__all__ = [
    "CycleKind",
    "CycleConfig",
    "TransferOps",
    "Level",
    "Hierarchy",
    "SolveResult",
    "build_transfer",
    "restrict",
    "prolong",
    "build_hierarchy",
    "cycle",
    "solve",
]

COARSEST_N = 4


class CycleKind(enum.Enum):
    TWO_GRID = "two-grid"
    V = "v"
    W = "w"


@dataclass(frozen=True)
class CycleConfig:
    kind: CycleKind = CycleKind.V
    nu_pre: int = 1
    nu_post: int = 1
    smoother: SmootherConfig = field(default_factory=SmootherConfig)
    tol: float = 1e-10
    max_iter: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", CycleKind(self.kind))
        if self.nu_pre < 0 or self.nu_post < 0 or self.nu_pre + self.nu_post < 1:
            raise ValueError(
                f"need nu_pre, nu_post >= 0 with at least one smoothing step, "
                f"got ({self.nu_pre}, {self.nu_post})"
            )
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def _full_weighting_1d(n_fine: int) -> sp.csr_matrix:
    # nodes 1..n_fine-1 -> coarse nodes 1..n_fine/2-1, weights (1, 2, 1)/4
    nc = n_fine // 2 - 1
    rows = np.repeat(np.arange(nc), 3)
    centers = 2 * np.arange(1, nc + 1) - 1  # 0-based fine index of node 2I
    cols = (centers[:, None] + np.array([-1, 0, 1])).ravel()
    vals = np.tile([0.25, 0.5, 0.25], nc)
    return sp.csr_matrix((vals, (rows, cols)), shape=(nc, n_fine - 1))


def _pair_average_1d(n_fine: int) -> sp.csr_matrix:
    # half-levels 0..n_fine-1 -> coarse half-levels, children 2J and 2J+1
    nc = n_fine // 2
    rows = np.repeat(np.arange(nc), 2)
    cols = np.arange(n_fine)
    return sp.csr_matrix((np.full(n_fine, 0.5), (rows, cols)), shape=(nc, n_fine))


@dataclass
class TransferOps:
    """Restriction from ``fine`` to ``fine.coarsen()``, one block per family."""

    fine: StaggeredGrid
    R_u: sp.csr_matrix
    R_v: sp.csr_matrix
    R_p: sp.csr_matrix

    @cached_property
    def R(self) -> sp.csr_matrix:
        return sp.block_diag([self.R_u, self.R_v, self.R_p], format="csr")

    @cached_property
    def P(self) -> sp.csr_matrix:
        return (4.0 * self.R.T).tocsr()

    @property
    def coarse(self) -> StaggeredGrid:
        return self.fine.coarsen()


def build_transfer(fine: StaggeredGrid) -> TransferOps:
    n = fine.n_cells
    if n % 2:
        raise ValueError(f"transfer operators need an even n_cells, got {n}")
    fw, avg = _full_weighting_1d(n), _pair_average_1d(n)
    # flat index = ix + nx * iy  ->  kron(y-rule, x-rule)
    R_u = sp.kron(avg, fw, format="csr")
    R_v = sp.kron(fw, avg, format="csr")
    R_p = sp.kron(avg, avg, format="csr")
    return TransferOps(fine, R_u, R_v, R_p)


def restrict(fine: SaddleState, ops: TransferOps) -> SaddleState:
    if fine.grid != ops.fine:
        raise ValueError("state and transfer operators live on different grids")
    return SaddleState(ops.coarse, ops.R_u @ fine.u, ops.R_v @ fine.v, ops.R_p @ fine.p)


def prolong(coarse: SaddleState, ops: TransferOps) -> SaddleState:
    if coarse.grid != ops.coarse:
        raise ValueError("state and transfer operators live on different grids")
    return SaddleState(
        ops.fine,
        4.0 * (ops.R_u.T @ coarse.u),
        4.0 * (ops.R_v.T @ coarse.v),
        4.0 * (ops.R_p.T @ coarse.p),
    )


class Level:
    """Operator, smoother and transfer to the next-coarser grid for one level."""

    def __init__(self, op: SaddleOperator, smoother_cfg: SmootherConfig, coarsest: bool):
        self.op = op
        self.grid = op.grid
        self.smoother_cfg = smoother_cfg
        self.transfer = None if coarsest else build_transfer(op.grid)
        self._smoother = None
        self._lu = None

    @property
    def smoother(self) -> BraessSarazinSmoother:
        if self._smoother is None:
            self._smoother = BraessSarazinSmoother(self.op, self.smoother_cfg)
        return self._smoother

    def direct_solve(self, b: np.ndarray) -> np.ndarray:
        if self._lu is None:
            self._lu = spla.splu(self.op.matrix.tocsc())
        return self._lu.solve(b)


class Hierarchy:
    """Levels from finest (index 0) down to the ``4 x 4`` coarsest mesh."""

    def __init__(self, levels: list[Level], params: PhysicalParams, smoother_cfg: SmootherConfig):
        self.levels = levels
        self.params = params
        self.smoother_cfg = smoother_cfg

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, k) -> Level:
        return self.levels[k]

    @property
    def finest(self) -> Level:
        return self.levels[0]


def _check_n0(n0: int) -> int:
    n = int(n0)
    if n != n0 or n < COARSEST_N:
        raise ValueError(f"N0 must be 4 * 2^k, got {n0}")
    m = n // COARSEST_N
    if n % COARSEST_N or m & (m - 1):
        raise ValueError(f"N0 must be 4 * 2^k, got {n0}")
    return n


def build_hierarchy(
    n0: int,
    params: PhysicalParams,
    smoother_cfg: SmootherConfig | None = None,
    coarsest: int = COARSEST_N,
) -> Hierarchy:
    n0 = _check_n0(n0)
    smoother_cfg = smoother_cfg or SmootherConfig()
    levels = []
    n = n0
    while True:
        last = n <= coarsest
        levels.append(Level(assemble_saddle(StaggeredGrid(n), params), smoother_cfg, last))
        if last:
            break
        n //= 2
    return Hierarchy(levels, params, smoother_cfg)


def _cycle(hier: Hierarchy, k: int, x: np.ndarray, b: np.ndarray, cfg: CycleConfig) -> np.ndarray:
    level = hier[k]
    if k == len(hier) - 1:
        return level.direct_solve(b)
    for _ in range(cfg.nu_pre):
        x = level.smoother.step(x, b)

    rc = level.transfer.R @ level.op.residual(x, b)
    if cfg.kind is CycleKind.TWO_GRID or k + 1 == len(hier) - 1:
        ec = hier[k + 1].direct_solve(rc)
    else:
        ec = np.zeros_like(rc)
        for _ in range(2 if cfg.kind is CycleKind.W else 1):
            ec = _cycle(hier, k + 1, ec, rc, cfg)
    x = x + level.transfer.P @ ec

    for _ in range(cfg.nu_post):
        x = level.smoother.step(x, b)
    return x


def cycle(hier: Hierarchy, level: int, state, rhs, cfg: CycleConfig):
    """One TwoGrid, V or W cycle starting on ``level``.

    Accepts either :class:`SaddleState` objects or stacked vectors and
    returns the same kind.
    """
    if isinstance(state, SaddleState):
        x = _cycle(hier, level, state.to_vector(), rhs.to_vector(), cfg)
        return SaddleState.from_vector(hier[level].grid, x)
    return _cycle(hier, level, np.asarray(state, dtype=float), np.asarray(rhs, dtype=float), cfg)


@dataclass
class SolveResult:
    state: SaddleState
    iterations: int
    rho_hat: float
    converged: bool
    history: list[float]


def solve(hier: Hierarchy, rhs, cfg: CycleConfig, x0=None) -> SolveResult:
    """Cycle until ``||r_k|| / ||r_0|| <= tol`` from a seeded uniform random guess.

    ``history`` holds the relative residuals, starting with 1.0 for ``k = 0``.
    ``rho_hat = (||r_k|| / ||r_0||)^(1/k)`` at the last iteration performed.
    """
    level = hier.finest
    b = rhs.to_vector() if isinstance(rhs, SaddleState) else np.asarray(rhs, dtype=float)
    if x0 is None:
        x = np.random.default_rng(cfg.rng_seed).random(level.grid.n_total)
    else:
        x = x0.to_vector() if isinstance(x0, SaddleState) else np.array(x0, dtype=float)

    r0 = np.linalg.norm(level.op.residual(x, b))
    history = [1.0]
    if r0 == 0.0:
        return SolveResult(SaddleState.from_vector(level.grid, x), 0, 0.0, True, history)

    k, rel = 0, 1.0
    while k < cfg.max_iter:
        x = _cycle(hier, 0, x, b, cfg)
        k += 1
        rel = np.linalg.norm(level.op.residual(x, b)) / r0
        history.append(float(rel))
        if rel <= cfg.tol or not np.isfinite(rel):
            break
    converged = bool(rel <= cfg.tol)
    rho = float(rel ** (1.0 / k)) if np.isfinite(rel) else float("inf")
    return SolveResult(SaddleState.from_vector(level.grid, x), k, rho, converged, history)
