"""scikit-learn style front end for the Braess-Sarazin multigrid solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .discretization import SaddleOperator, SaddleState
from .grid import StaggeredGrid
from .multigrid import CycleConfig, SolveResult, build_hierarchy, solve
from .smoother import SmootherConfig
from .validation import check_n_cells, check_params, check_vector


class BraessSarazinMultigrid(BaseEstimator):
    """Multigrid solver for the MAC elasticity system with Braess-Sarazin smoothing.

    Parameters
    ----------
    scheme : {'jacobi', 'mass', 'vanka'}, default='vanka'
        Approximation ``D`` of the displacement block inside the smoother.
    omega : float or None, default=None
        Smoother damping.  ``None`` uses the smoothing-optimal value of the
        scheme (4/5, 3/4, 24/25).
    schur : {'exact', 'jacobi'}, default='jacobi'
        Direct or weighted-Jacobi solve of the Schur complement system.
    omega_j : float or None, default=None
        Jacobi weight for the Schur solve (0.8, 0.8, 1.0 by default).
    cycle : {'two-grid', 'v', 'w'}, default='v'
    nu_pre, nu_post : int, default=1
        Pre- and post-smoothing steps.
    epsilon, nu : float
        Shear modulus and Poisson ratio.
    tol : float, default=1e-10
        Relative residual reduction that stops the iteration.
    max_iter : int, default=100
    max_sweeps : int, default=3
        Cap on Schur-Jacobi sweeps per smoothing step.
    schur_tol : float, default=0.1
    schur_tol_relative : bool, default=True
        Measure ``schur_tol`` relative to the Schur right-hand side norm.
    random_state : int, default=0
        Seed of the uniform random initial guess.

    Attributes
    ----------
    hierarchy_ : Hierarchy
    n_levels_ : int
    n_iter_, rho_hat_, converged_, residual_history_
        Set by :meth:`predict` / :meth:`solve`.

    Examples
    --------
    >>> from elasticmg import BraessSarazinMultigrid, assemble_rhs, StaggeredGrid, PhysicalParams
    >>> mg = BraessSarazinMultigrid(scheme="vanka", cycle="v").fit(16)
    >>> b = assemble_rhs(StaggeredGrid(16), PhysicalParams(1.0, 0.45))
    >>> x = mg.predict(b)
    >>> mg.converged_
    True
    """

    def __init__(
        self,
        scheme="vanka",
        omega=None,
        schur="jacobi",
        omega_j=None,
        cycle="v",
        nu_pre=1,
        nu_post=1,
        epsilon=1.0,
        nu=0.45,
        tol=1e-10,
        max_iter=100,
        max_sweeps=3,
        schur_tol=0.1,
        schur_tol_relative=True,
        random_state=0,
    ):
        self.scheme = scheme
        self.omega = omega
        self.schur = schur
        self.omega_j = omega_j
        self.cycle = cycle
        self.nu_pre = nu_pre
        self.nu_post = nu_post
        self.epsilon = epsilon
        self.nu = nu
        self.tol = tol
        self.max_iter = max_iter
        self.max_sweeps = max_sweeps
        self.schur_tol = schur_tol
        self.schur_tol_relative = schur_tol_relative
        self.random_state = random_state

    def _configs(self) -> tuple[SmootherConfig, CycleConfig]:
        smoother = SmootherConfig(
            scheme=self.scheme,
            omega=self.omega,
            schur_mode=self.schur,
            omega_j=self.omega_j,
            max_sweeps=self.max_sweeps,
            schur_tol=self.schur_tol,
            schur_tol_relative=self.schur_tol_relative,
        )
        cycle = CycleConfig(
            kind=self.cycle,
            nu_pre=self.nu_pre,
            nu_post=self.nu_post,
            smoother=smoother,
            tol=self.tol,
            max_iter=self.max_iter,
            rng_seed=self.random_state,
        )
        return smoother, cycle

    def fit(self, X, y=None):
        """Build the level hierarchy.

        ``X`` is the finest grid size ``N`` (``4 * 2^k``), a
        :class:`StaggeredGrid`, or a :class:`SaddleOperator`; in the last case
        its physical parameters replace ``epsilon`` and ``nu``.
        """
        if isinstance(X, SaddleOperator):
            params = X.params
            n = X.grid.n_cells
        else:
            params = check_params(self.epsilon, self.nu)
            n = X.n_cells if isinstance(X, StaggeredGrid) else X
        n = check_n_cells(n)
        smoother, self._cycle_config = self._configs()
        self.params_ = params
        self.hierarchy_ = build_hierarchy(n, params, smoother)
        self.n_levels_ = len(self.hierarchy_)
        return self

    def solve(self, b, x0=None) -> SolveResult:
        check_is_fitted(self, "hierarchy_")
        grid = self.hierarchy_.finest.grid
        rhs = check_vector(b, grid, "b")
        if x0 is not None:
            x0 = check_vector(x0, grid, "x0")
        result = solve(self.hierarchy_, rhs, self._cycle_config, x0=x0)
        self.n_iter_ = result.iterations
        self.rho_hat_ = result.rho_hat
        self.converged_ = result.converged
        self.residual_history_ = np.asarray(result.history)
        return result

    def predict(self, X):
        """Solve with right-hand side ``X``; returns the stacked solution vector."""
        return self.solve(X).state.to_vector()

    def fit_predict(self, X, b):
        return self.fit(X).predict(b)

    def residual(self, x, b) -> np.ndarray:
        check_is_fitted(self, "hierarchy_")
        grid = self.hierarchy_.finest.grid
        return self.hierarchy_.finest.op.residual(check_vector(x, grid, "x"), check_vector(b, grid, "b"))

    def to_state(self, x) -> SaddleState:
        check_is_fitted(self, "hierarchy_")
        return SaddleState.from_vector(self.hierarchy_.finest.grid, x)
