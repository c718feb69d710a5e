"""Estimator front end: sklearn conventions and the fit/predict path."""

import numpy as np
import pytest
from sklearn.base import clone

from heisenberg_neumann.estimator import NeumannSolver
from heisenberg_neumann.fields import make_field
from heisenberg_neumann.solver import CompatibilityError


def test_get_params_and_clone(ctx):
    est = NeumannSolver(n_r=24, n_theta=16, R=6.0, context=ctx)
    params = est.get_params()
    assert params["n_r"] == 24 and params["R"] == 6.0
    twin = clone(est)
    assert twin.get_params() == params
    assert not hasattr(twin, "density_")


def test_fit_predict_roundtrip(ctx):
    est = NeumannSolver(n_r=24, n_theta=16, R=6.0, context=ctx)
    out = est.fit(make_field("angular_mode"))
    assert out is est
    assert est.context_ is ctx
    assert est.density_.values.shape == (24 * 16,)
    u = est.predict([[0.5, 0.0, 1.0], [0.0, 0.3, 2.0]])
    assert u.shape == (2,) and np.all(np.isfinite(u))


def test_fit_rejects_incompatible_data(ctx):
    est = NeumannSolver(n_r=16, n_theta=8, R=4.0, context=ctx)
    with pytest.raises(CompatibilityError):
        est.fit(make_field("gaussian"))


def test_predict_before_fit_raises(ctx):
    est = NeumannSolver(context=ctx)
    with pytest.raises(RuntimeError, match="fit"):
        est.predict([[0.5, 0.0, 1.0]])


def test_predict_row_length_guard(ctx):
    est = NeumannSolver(n_r=16, n_theta=8, R=4.0, context=ctx)
    est.fit(np.zeros(16 * 8))
    with pytest.raises(ValueError, match="rows of length 3"):
        est.predict([[0.5, 0.0]])
