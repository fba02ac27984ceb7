"""Braess-Sarazin relaxation for the MAC saddle-point system.

One sweep applies ``y <- y + omega * M^{-1} (b - L y)`` with::

    M = [ eps D   B^T ]
        [ B       -C  ]

where ``eps D`` is a cheap stand-in for the displacement block.  ``D^{-1}``
is the inverse diagonal (Jacobi), the bilinear mass stencil (Mass), or the
additive element-wise Vanka stencil (Vanka).  ``M^{-1}`` is applied in two
steps through the Schur complement ``S = C + B (eps D)^{-1} B^T``, solved
either directly or with a few weighted-Jacobi sweeps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretization import SaddleOperator, SaddleState, scalar_laplacians
from .grid import StaggeredGrid

__all__ = [
    "Scheme",
    "SchurMode",
    "SmootherConfig",
    "DInverse",
    "SchurSystem",
    "BraessSarazinSmoother",
    "mass_stencil",
    "vanka_stencil",
    "vanka_patch_matrix",
    "vanka_assemble",
    "build_d_inverse",
    "build_schur",
    "schur_solve",
    "bsr_step",
]


class Scheme(enum.Enum):
    JACOBI = "jacobi"
    MASS = "mass"
    VANKA = "vanka"


class SchurMode(enum.Enum):
    EXACT = "exact"
    WEIGHTED_JACOBI = "jacobi"


# smoothing-optimal damping and Schur-Jacobi weights per scheme
DEFAULT_OMEGA = {Scheme.JACOBI: 4 / 5, Scheme.MASS: 3 / 4, Scheme.VANKA: 24 / 25}
DEFAULT_OMEGA_J = {Scheme.JACOBI: 0.8, Scheme.MASS: 0.8, Scheme.VANKA: 1.0}


@dataclass(frozen=True)
class SmootherConfig:
    """Relaxation settings.  ``omega``/``omega_j`` of ``None`` pick the scheme defaults.

    ``schur_tol`` bounds the 2-norm of the Schur residual relative to the
    Schur right-hand side.  With ``schur_tol_relative=False`` it is an
    absolute bound instead; weighted-Jacobi then skips the pressure update
    entirely once residuals fall below ``schur_tol``, which stalls
    convergence to tight tolerances.
    """

    scheme: Scheme = Scheme.VANKA
    omega: float | None = None
    schur_mode: SchurMode = SchurMode.WEIGHTED_JACOBI
    omega_j: float | None = None
    max_sweeps: int = 3
    schur_tol: float = 0.1
    schur_tol_relative: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "schur_mode", SchurMode(self.schur_mode))
        if self.omega is None:
            object.__setattr__(self, "omega", DEFAULT_OMEGA[self.scheme])
        if self.omega_j is None:
            object.__setattr__(self, "omega_j", DEFAULT_OMEGA_J[self.scheme])
        if not 0.0 < self.omega < 2.0:
            raise ValueError(f"omega must lie in (0, 2), got {self.omega}")
        if not 0.0 < self.omega_j < 2.0:
            raise ValueError(f"omega_j must lie in (0, 2), got {self.omega_j}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.schur_tol < 0:
            raise ValueError(f"schur_tol must be non-negative, got {self.schur_tol}")


def mass_stencil(h: float) -> np.ndarray:
    return h ** 2 / 36.0 * np.array([[1.0, 4.0, 1.0], [4.0, 16.0, 4.0], [1.0, 4.0, 1.0]])


def vanka_stencil(h: float) -> np.ndarray:
    return h ** 2 / 96.0 * np.array([[1.0, 4.0, 1.0], [4.0, 28.0, 4.0], [1.0, 4.0, 1.0]])


def _mass_1d(m: int) -> sp.csr_matrix:
    return sp.diags([np.ones(m - 1), 4.0 * np.ones(m), np.ones(m - 1)], [-1, 0, 1], format="csr") / 6.0


def _mass_2d(shape: tuple[int, int], h: float) -> sp.csr_matrix:
    # tensor product of 1D masses == 3x3 stencil with out-of-range entries dropped
    ny, nx = shape
    return (h ** 2 * sp.kron(_mass_1d(ny), _mass_1d(nx))).tocsr()


def vanka_patch_matrix(h: float) -> np.ndarray:
    """4x4 five-point Laplacian restricted to a 2x2 node patch (ordering: lower-left,
    lower-right, upper-left, upper-right)."""
    return np.array(
        [[4.0, -1.0, -1.0, 0.0],
         [-1.0, 4.0, 0.0, -1.0],
         [-1.0, 0.0, 4.0, -1.0],
         [0.0, -1.0, -1.0, 4.0]]
    ) / h ** 2


def vanka_assemble(shape: tuple[int, int], h: float, weight: float = 0.25) -> sp.csr_matrix:
    """Additive element-wise Vanka operator ``sum_j V_j^T W_j A_j^{-1} V_j``.

    Sums over every 2x2 patch of an ``(ny, nx)`` nodal grid, so there are
    ``(ny - 1) (nx - 1)`` patches.  Interior rows reproduce
    ``h^2/96 [1 4 1; 4 28 4; 1 4 1]``.
    """
    ny, nx = shape
    block = weight * np.linalg.inv(vanka_patch_matrix(h))
    jy, jx = np.meshgrid(np.arange(ny - 1), np.arange(nx - 1), indexing="ij")
    base = (jx + nx * jy).ravel()
    local = np.array([0, 1, nx, nx + 1])
    idx = base[:, None] + local[None, :]
    rows = np.repeat(idx, 4, axis=1).ravel()
    cols = np.tile(idx, (1, 4)).ravel()
    vals = np.tile(block.ravel(), len(base))
    n = ny * nx
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class DInverse:
    """``D^{-1}`` on the stacked velocity unknowns (not yet divided by epsilon)."""

    scheme: Scheme
    matrix: sp.csr_matrix

    def apply(self, r: np.ndarray) -> np.ndarray:
        return self.matrix @ r


def build_d_inverse(grid: StaggeredGrid, scheme: Scheme | str) -> DInverse:
    scheme = Scheme(scheme)
    h = grid.h
    if scheme is Scheme.JACOBI:
        lap_u, lap_v = scalar_laplacians(grid)
        d = np.concatenate([lap_u.diagonal(), lap_v.diagonal()])
        mat = sp.diags(1.0 / d, format="csr")
    else:
        blocks = []
        for shape in ((grid.n_cells, grid.n_cells - 1), (grid.n_cells - 1, grid.n_cells)):
            q = _mass_2d(shape, h)
            if scheme is Scheme.VANKA:
                q = 0.375 * q + (h ** 2 / 8.0) * sp.identity(q.shape[0], format="csr")
            blocks.append(q)
        mat = sp.block_diag(blocks, format="csr")
    return DInverse(scheme, mat)


@dataclass
class SchurSystem:
    S: sp.csr_matrix
    diag: np.ndarray
    lu: object | None = None


def build_schur(op: SaddleOperator, d: DInverse, mode: SchurMode | str = SchurMode.EXACT) -> SchurSystem:
    """Assemble ``S = C + B (eps D)^{-1} B^T``; factorize it for exact solves."""
    mode = SchurMode(mode)
    S = (op.C + op.B @ (d.matrix / op.params.epsilon) @ op.B.T).tocsr()
    lu = spla.splu(S.tocsc()) if mode is SchurMode.EXACT else None
    return SchurSystem(S, S.diagonal().copy(), lu)


def schur_solve(
    sys: SchurSystem,
    rhs: np.ndarray,
    mode: SchurMode | str = SchurMode.EXACT,
    omega_j: float = 0.8,
    max_sweeps: int = 3,
    tol: float = 0.1,
    relative: bool = True,
) -> tuple[np.ndarray, int]:
    """Solve ``S dp = rhs``.  Returns ``(dp, sweeps)``; sweeps is 0 for exact solves.

    Weighted Jacobi starts from zero and stops as soon as the residual 2-norm
    drops below ``tol`` (times ``||rhs||`` when ``relative``), checked before
    every sweep, or after ``max_sweeps``.
    """
    mode = SchurMode(mode)
    if mode is SchurMode.EXACT:
        if sys.lu is None:
            sys.lu = spla.splu(sys.S.tocsc())
        return sys.lu.solve(rhs), 0

    dp = np.zeros_like(rhs)
    res = rhs.copy()
    bound = tol * np.linalg.norm(rhs) if relative else tol
    sweeps = 0
    while sweeps < max_sweeps and np.linalg.norm(res) >= bound:
        dp += omega_j * res / sys.diag
        res = rhs - sys.S @ dp
        sweeps += 1
    return dp, sweeps


class BraessSarazinSmoother:
    """Level-cached Braess-Sarazin relaxation acting on stacked vectors."""

    def __init__(
        self,
        op: SaddleOperator,
        config: SmootherConfig,
        d: DInverse | None = None,
        schur: SchurSystem | None = None,
    ):
        self.op = op
        self.config = config
        self.d = d if d is not None else build_d_inverse(op.grid, config.scheme)
        self.schur = schur if schur is not None else build_schur(op, self.d, config.schur_mode)
        self._dinv = (self.d.matrix / op.params.epsilon).tocsr()
        self.last_sweeps = 0

    def correction(self, r: np.ndarray) -> np.ndarray:
        """``M^{-1} r`` (exact for Exact mode, approximate for weighted Jacobi)."""
        cfg, nvel = self.config, self.op.grid.n_velocity
        ru, rp = r[:nvel], r[nvel:]
        dinv_ru = self._dinv @ ru
        dp, self.last_sweeps = schur_solve(
            self.schur, self.op.B @ dinv_ru - rp, cfg.schur_mode,
            cfg.omega_j, cfg.max_sweeps, cfg.schur_tol, cfg.schur_tol_relative,
        )
        du = dinv_ru - self._dinv @ (self.op.B.T @ dp)
        return np.concatenate([du, dp])

    def step(self, x: np.ndarray, b: np.ndarray) -> np.ndarray:
        return x + self.config.omega * self.correction(b - self.op.apply(x))


def bsr_step(
    op: SaddleOperator,
    d: DInverse,
    sys: SchurSystem,
    state: SaddleState,
    rhs: SaddleState,
    config: SmootherConfig,
) -> SaddleState:
    """One damped Braess-Sarazin sweep on a :class:`SaddleState`."""
    smoother = BraessSarazinSmoother(op, config, d, sys)
    out = smoother.step(state.to_vector(), rhs.to_vector())
    return SaddleState.from_vector(op.grid, out)
