import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from elasticmg import (
    BraessSarazinMultigrid,
    PhysicalParams,
    SaddleState,
    StaggeredGrid,
    assemble_rhs,
    assemble_saddle,
    error_norms,
    manufactured_solution,
)


def test_get_set_params_and_clone():
    mg = BraessSarazinMultigrid(scheme="mass", nu=0.4999999)
    p = mg.get_params()
    assert p["scheme"] == "mass" and p["nu"] == 0.4999999 and p["cycle"] == "v"
    mg.set_params(cycle="w", nu_pre=2)
    c = clone(mg)
    assert c.get_params() == mg.get_params()
    assert not hasattr(c, "hierarchy_")


@pytest.mark.parametrize("X", [16, StaggeredGrid(16)])
def test_fit_accepts_size_or_grid(X):
    mg = BraessSarazinMultigrid().fit(X)
    assert mg.n_levels_ == 3
    assert mg.hierarchy_.finest.grid.n_cells == 16


def test_fit_from_operator_takes_its_params():
    op = assemble_saddle(StaggeredGrid(8), PhysicalParams(2.0, 0.3))
    mg = BraessSarazinMultigrid(epsilon=1.0, nu=0.45).fit(op)
    assert mg.params_ == PhysicalParams(2.0, 0.3)


@pytest.mark.parametrize("X,exc", [(12, ValueError), (2, ValueError), (16.0, TypeError), ("16", TypeError)])
def test_fit_rejects(X, exc):
    with pytest.raises(exc):
        BraessSarazinMultigrid().fit(X)


@pytest.mark.parametrize("kw", [{"scheme": "sor"}, {"omega": 3.0}, {"nu": 0.5}, {"epsilon": 0.0},
                                {"nu_pre": 0, "nu_post": 0}, {"cycle": "f"}])
def test_invalid_params_raise_at_fit(kw):
    with pytest.raises(ValueError):
        BraessSarazinMultigrid(**kw).fit(8)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        BraessSarazinMultigrid().predict(np.zeros(40))


@pytest.mark.parametrize("scheme", ["jacobi", "mass", "vanka"])
def test_predict_recovers_discrete_solution(scheme):
    params = PhysicalParams(1.0, 0.45)
    g = StaggeredGrid(32)
    b = assemble_rhs(g, params)
    mg = BraessSarazinMultigrid(scheme=scheme, cycle="w").fit(g)
    x = mg.predict(b)
    assert mg.converged_ and mg.n_iter_ == len(mg.residual_history_) - 1
    assert np.linalg.norm(mg.residual(x, b)) <= 1e-9 * np.linalg.norm(b.to_vector()) * 1e3
    eu, ev, ep = error_norms(mg.to_state(x), manufactured_solution(g, params))
    assert max(eu, ev) < 5e-3 and ep < 2e-3


def test_predict_shape_checks():
    mg = BraessSarazinMultigrid().fit(8)
    with pytest.raises(ValueError):
        mg.predict(np.zeros(10))
    with pytest.raises(ValueError):
        mg.predict(np.full(StaggeredGrid(8).n_total, np.nan))
    with pytest.raises(ValueError):
        mg.predict(SaddleState.zeros(StaggeredGrid(16)))


def test_fit_predict_and_x0():
    params = PhysicalParams(1.0, 0.45)
    b = assemble_rhs(StaggeredGrid(16), params)
    mg = BraessSarazinMultigrid()
    x = mg.fit_predict(16, b)
    res = mg.solve(b, x0=np.zeros_like(x))
    assert res.converged
    assert np.linalg.norm(res.state.to_vector() - x) <= 1e-8 * np.linalg.norm(x)


def test_random_state_controls_start():
    b = assemble_rhs(StaggeredGrid(16), PhysicalParams())
    h1 = BraessSarazinMultigrid(random_state=0).fit(16)
    h1.predict(b)
    h2 = BraessSarazinMultigrid(random_state=0).fit(16)
    h2.predict(b)
    np.testing.assert_array_equal(h1.residual_history_, h2.residual_history_)
