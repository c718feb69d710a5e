"""Nystrom discretization of the boundary operators and the Neumann solves.

The double-layer operator is discretized on a boundary rule as a dense
matrix with off-diagonal entries dperp Psi(node_i, node_j) * w_j.  The
diagonal is closed by the subtraction identity, which forces each row sum
to the boundary flux constant -1; a ``direct`` diagonal built from
near-diagonal quadrature of the kernel is available as an independent
cross-check.  The adjoint operator is the transpose in the dsigma-weighted
inner product.

The interior Neumann solve is the rank-deficient system (I + Wt) phi = g
closed by the mean-zero constraint <phi, 1> = 0 in least squares; the
solution of the boundary-value problem is then the single layer of phi.
The inhomogeneous solve evaluates the reflection-kernel representation
u(beta) = int G f dnu - int G g dsigma for circular data.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .group import HeisenbergPoint, ScalarField, circular_average
from .kernels import (KernelContext, dperp_psi_nodes,
                      neumann_function_nodes)
from .quadrature import (BOUNDARY_POLE_FLUX, BoundaryQuadratureRule,
                         VolumeQuadratureRule, integrate_boundary,
                         integrate_volume, single_layer)

__all__ = [
    "DensityVector",
    "OperatorMatrix",
    "SolveReport",
    "CompatibilityError",
    "CircularityError",
    "assemble",
    "compatibility_check",
    "solve_interior_neumann",
    "eval_solution",
    "solve_inhomogeneous",
]


class CompatibilityError(ValueError):
    """Boundary (or volume) data violates the solvability condition."""


class CircularityError(ValueError):
    """Data is not invariant under the common phase rotation."""


@dataclass(frozen=True)
class DensityVector:
    """A boundary density sampled at the nodes of a quadrature rule."""

    values: np.ndarray
    rule: BoundaryQuadratureRule

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=float))
        if self.values.shape != (self.rule.m,):
            raise ValueError("density length does not match the rule")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("density values must be finite")

    @classmethod
    def from_field(cls, f: ScalarField, rule: BoundaryQuadratureRule):
        return cls(np.real(f.on_nodes(rule.zeta, np.zeros(rule.m))), rule)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Nystrom matrix of the double-layer operator or its adjoint."""

    entries: np.ndarray
    kind: str                       # "W" or "Wtilde"
    rule: BoundaryQuadratureRule
    diagonal: str = "subtraction"   # "subtraction" or "direct"

    def dump(self, path) -> None:
        """Documented binary layout: magic 'HNOP', uint32 node count, uint8
        kind (0 = W, 1 = Wtilde), then row-major little-endian float64."""
        with open(path, "wb") as fh:
            fh.write(b"HNOP")
            fh.write(struct.pack("<IB", self.rule.m,
                                 0 if self.kind == "W" else 1))
            fh.write(np.ascontiguousarray(self.entries, dtype="<f8").tobytes())


def _require_calibrated(ctx: KernelContext) -> None:
    if not getattr(ctx, "calibrated", False):
        raise ValueError("kernel context has not been calibrated; run "
                         "verification.calibrate first")


def _direct_diagonal(ctx: KernelContext, rule: BoundaryQuadratureRule,
                     sub: int = 16) -> np.ndarray:
    """Near-diagonal principal-value quadrature of the kernel over each
    node's own cell, on a symmetric subgrid that avoids the singular center."""
    if rule.n != 1:
        raise NotImplementedError("direct diagonal implemented for n = 1")
    diag = np.empty(rule.m)
    n_r, n_theta, R, g = rule.n_r, rule.n_theta, rule.R, rule.grading
    dtheta = 2.0 * np.pi / n_theta
    ss = (np.arange(sub) + 0.5) / sub / n_r
    tt = (np.arange(sub) + 0.5) / sub * dtheta - dtheta / 2.0
    for i in range(rule.m):
        k, mth = divmod(i, n_theta)
        s0 = k / n_r
        theta0 = mth * dtheta
        s = s0 + ss
        rho = R * s ** g
        wr = R * g * s ** (g - 1.0) / (n_r * sub)
        th = theta0 + tt
        z = (rho[:, None] * np.exp(1j * th)[None, :]).reshape(-1, 1)
        w = ((rho / 2.0) * rho * wr)[:, None] * (dtheta / sub)
        kern = dperp_psi_nodes(ctx, rule.node_point(i), z)
        diag[i] = float(np.sum(kern * np.broadcast_to(w, (sub, sub)).reshape(-1)))
    return diag


def assemble(ctx: KernelContext, rule: BoundaryQuadratureRule, kind: str = "W",
             diagonal: str = "subtraction") -> OperatorMatrix:
    """Dense Nystrom matrix of W (derivative in alpha) or its weighted adjoint.

    With the default diagonal each row of W sums exactly to the boundary
    flux constant -1, so W applied to the constant density is -1 by
    construction.  The adjoint is Wtilde = D^{-1} W^T D with D = diag(w).
    """
    _require_calibrated(ctx)
    if kind not in ("W", "Wtilde"):
        raise ValueError("kind must be 'W' or 'Wtilde'")
    if diagonal not in ("subtraction", "direct"):
        raise ValueError("diagonal must be 'subtraction' or 'direct'")
    m = rule.m
    A = np.empty((m, m))
    # the i = j evaluation hits the kernel pole; it is discarded just below
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(m):
            A[i] = dperp_psi_nodes(ctx, rule.node_point(i),
                                   rule.zeta) * rule.weights
    np.fill_diagonal(A, 0.0)
    if diagonal == "subtraction":
        np.fill_diagonal(A, BOUNDARY_POLE_FLUX - A.sum(axis=1))
    else:
        np.fill_diagonal(A, _direct_diagonal(ctx, rule))
    if kind == "Wtilde":
        A = (A.T * rule.weights[None, :]) / rule.weights[:, None]
    return OperatorMatrix(entries=A, kind=kind, rule=rule, diagonal=diagonal)


def compatibility_check(g, rule: BoundaryQuadratureRule) -> float:
    """int g dsigma over the rule (the solvability functional)."""
    if isinstance(g, DensityVector):
        return integrate_boundary(g.values, rule)
    return integrate_boundary(g, rule)


def compatibility_residual(g, rule: BoundaryQuadratureRule) -> float:
    """|int g dsigma| / int |g| dsigma (0/0 treated as 0)."""
    if isinstance(g, DensityVector):
        vals = g.values
    elif isinstance(g, ScalarField):
        vals = np.real(g.on_nodes(rule.zeta, np.zeros(rule.m)))
    else:
        vals = np.asarray(g, dtype=float)
    denom = float(np.sum(np.abs(vals) * rule.weights))
    if denom == 0.0:
        return 0.0
    return abs(float(np.sum(vals * rule.weights))) / denom


@dataclass(frozen=True)
class SolveReport:
    compatibility_residual: float
    linear_residual: float
    min_singular_value: float
    second_min_singular_value: float
    constant_mode_coefficient: float

    def to_json(self) -> str:
        return json.dumps({k: getattr(self, k) for k in (
            "compatibility_residual", "linear_residual",
            "min_singular_value", "second_min_singular_value",
            "constant_mode_coefficient")})


def solve_interior_neumann(ctx: KernelContext, g, rule: BoundaryQuadratureRule,
                           tol_compat: float = 1e-6,
                           operator: OperatorMatrix | None = None):
    """Solve (I + Wtilde) phi = g with the mean-zero constraint appended.

    The discrete system is rank-deficient by one; the constraint
    <phi, 1> = 0 in the dsigma pairing selects one representative.  Returns
    (phi, report).  Raises CompatibilityError when |int g| exceeds
    tol_compat * int |g|.
    """
    _require_calibrated(ctx)
    if isinstance(g, ScalarField):
        g = DensityVector.from_field(g, rule)
    elif not isinstance(g, DensityVector):
        g = DensityVector(g, rule)
    compat = compatibility_residual(g, rule)
    if compat > tol_compat:
        raise CompatibilityError(
            f"compatibility residual {compat:.3e} exceeds {tol_compat:.1e}")
    if operator is None or operator.kind != "Wtilde":
        operator = assemble(ctx, rule, kind="Wtilde")
    m = rule.m
    A = np.eye(m) + operator.entries
    scale = np.linalg.norm(A, ord=np.inf)
    aug = np.vstack([A, scale * rule.weights[None, :] / rule.total_weight()])
    rhs = np.concatenate([g.values, [0.0]])
    phi, *_ = np.linalg.lstsq(aug, rhs, rcond=None)
    sv = np.linalg.svd(np.eye(m) + assemble(ctx, rule, kind="W").entries,
                       compute_uv=False)
    resid = np.linalg.norm(A @ phi - g.values)
    gnorm = np.linalg.norm(g.values)
    report = SolveReport(
        compatibility_residual=compat,
        linear_residual=resid / gnorm if gnorm > 0 else resid,
        min_singular_value=float(sv[-1]),
        second_min_singular_value=float(sv[-2]),
        constant_mode_coefficient=float(np.sum(phi * rule.weights)
                                        / rule.total_weight()),
    )
    return DensityVector(phi, rule), report


def eval_solution(ctx: KernelContext, phi: DensityVector,
                  rule: BoundaryQuadratureRule, beta: HeisenbergPoint) -> float:
    """The solution field: the single-layer potential of the solved density."""
    if beta.t <= 0:
        raise ValueError("beta must lie in the open half-space t > 0")
    return single_layer(ctx, phi.values, rule, beta)


def _check_circular(f: ScalarField, name: str, samples, tol: float = 1e-8):
    avg = circular_average(f, n_theta=32)
    for zeta, t in samples:
        a = complex(avg.func(np.asarray(zeta)[np.newaxis, :], np.asarray([t]))[0])
        b = complex(f.func(np.asarray(zeta)[np.newaxis, :], np.asarray([t]))[0])
        if abs(a - b) > tol * max(1.0, abs(b)):
            raise CircularityError(f"{name} is not circular at zeta={zeta}, t={t}")


def solve_inhomogeneous(ctx: KernelContext, f: ScalarField, g: ScalarField,
                        rule: BoundaryQuadratureRule,
                        vol_rule: VolumeQuadratureRule,
                        beta_list, tol_compat: float = 1e-3) -> np.ndarray:
    """Representation-formula values u(beta) = int G f dnu - int G g dsigma.

    Both data must be circular; the compatibility condition
    int f dnu = int g dsigma is enforced relative to the data size.
    """
    _require_calibrated(ctx)
    samples = [((0.7 + 0.3j,), 0.5), ((1.1 - 0.2j,), 1.4), ((0.4 + 0.9j,), 0.2)]
    _check_circular(f, "f", samples)
    _check_circular(g, "g", [(z, 0.0) for z, _ in samples])
    vol_int = integrate_volume(f, vol_rule)
    bdry_int = integrate_boundary(g, rule)
    size = (abs(vol_int) + abs(bdry_int)
            + integrate_volume(lambda z, t: np.abs(f.on_nodes(z, t)), vol_rule))
    if abs(vol_int - bdry_int) > tol_compat * max(size, 1e-30):
        raise CompatibilityError(
            f"int f dnu = {vol_int:.6e} differs from int g dsigma = "
            f"{bdry_int:.6e} beyond tolerance")
    fv = np.real(f.on_nodes(vol_rule.zeta, vol_rule.t))
    gv = np.real(g.on_nodes(rule.zeta, np.zeros(rule.m)))
    out = np.empty(len(beta_list))
    for i, beta in enumerate(beta_list):
        Gv = neumann_function_nodes(ctx, beta, vol_rule.zeta, vol_rule.t)
        Gb = neumann_function_nodes(ctx, beta, rule.zeta, np.zeros(rule.m))
        out[i] = (float(np.sum(Gv * fv * vol_rule.weights))
                  - float(np.sum(Gb * gv * rule.weights)))
    return out
