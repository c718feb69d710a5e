"""Scikit-learn style front end for the interior Neumann solve.

NeumannSolver bundles grid construction, kernel calibration, operator
assembly, and the constrained least-squares solve behind fit/predict.
``fit`` takes the boundary data (a ScalarField or node-value vector) and
stores the solved density; ``predict`` evaluates the single-layer solution
at interior points given as rows [Re zeta_1, ..., Im zeta_n, t].
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .group import HeisenbergPoint, ScalarField
from .quadrature import build_boundary_rule
from .solver import assemble, eval_solution, solve_interior_neumann
from .verification import calibrate

__all__ = ["NeumannSolver"]


class NeumannSolver(BaseEstimator):
    """Interior Neumann problem on the half-space, Nystrom + single layer.

    Parameters mirror the quadrature and solver knobs; the kernel constant
    is calibrated on first fit unless a calibrated ``context`` is supplied.
    """

    def __init__(self, n=1, n_r=80, n_theta=48, R=10.0, grading=3.0,
                 tol_compat=1e-6, context=None):
        self.n = n
        self.n_r = n_r
        self.n_theta = n_theta
        self.R = R
        self.grading = grading
        self.tol_compat = tol_compat
        self.context = context

    def fit(self, X, y=None):
        """Solve for the boundary density; X is the Neumann data g
        (ScalarField or an array of node values on the estimator's rule)."""
        self.context_ = self.context if self.context is not None \
            else calibrate(self.n)
        self.rule_ = build_boundary_rule(self.n, self.n_r, self.n_theta,
                                         self.R, self.grading)
        self.operator_ = assemble(self.context_, self.rule_, kind="Wtilde")
        self.density_, self.report_ = solve_interior_neumann(
            self.context_, X, self.rule_, tol_compat=self.tol_compat,
            operator=self.operator_)
        return self

    def _point(self, row):
        row = np.asarray(row, dtype=float)
        if row.shape != (2 * self.n + 1,):
            raise ValueError(f"expected rows of length {2 * self.n + 1}")
        zeta = row[:self.n] + 1j * row[self.n:2 * self.n]
        return HeisenbergPoint(zeta, float(row[-1]))

    def predict(self, X):
        """Evaluate the solution at interior points, one row per point."""
        if not hasattr(self, "density_"):
            raise RuntimeError("fit must be called before predict")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([eval_solution(self.context_, self.density_,
                                       self.rule_, self._point(row))
                         for row in X])
