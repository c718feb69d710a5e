"""Quadrature over the boundary plane t = 0 and the half-space volume.

The boundary carries the surface measure dsigma = (|zeta|/2) ds with ds the
Euclidean area element of the plane.  For n = 1 the rules are polar grids
with radial grading toward the characteristic point zeta = 0 (midpoint rule
in the graded radial parameter, trapezoid in the angle).  For n > 1 a
quasi-Monte-Carlo rule with the same weight function is provided and
flagged as lower accuracy.

The double-layer evaluation at a boundary point subtracts the density value
at the pole, which cancels the diagonal singularity; the subtracted term is
closed by the boundary flux constant of the kernel.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .group import HeisenbergPoint, ScalarField
from .kernels import KernelContext, dperp_psi_nodes, psi_nodes

__all__ = [
    "BoundaryQuadratureRule",
    "VolumeQuadratureRule",
    "build_boundary_rule",
    "integrate_boundary",
    "single_layer",
    "double_layer_subtracted",
    "build_volume_rule",
    "integrate_volume",
    "BOUNDARY_POLE_FLUX",
]

# Flux value of the subtracted double-layer identity at a boundary pole.
BOUNDARY_POLE_FLUX = -1.0


@dataclass(frozen=True)
class BoundaryQuadratureRule:
    """Nodes (zeta, t = 0) and weights encoding dsigma, truncated at |zeta| <= R."""

    n: int
    zeta: np.ndarray          # (m, n) complex
    weights: np.ndarray       # (m,) positive
    R: float
    n_r: int
    n_theta: int
    grading: float
    low_accuracy: bool = False

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("all weights must be positive")
        if np.any(np.all(self.zeta == 0, axis=-1)):
            raise ValueError("rule must exclude the characteristic point")

    @property
    def m(self) -> int:
        return self.weights.size

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def node_point(self, i: int) -> HeisenbergPoint:
        return HeisenbergPoint(self.zeta[i], 0.0)

    def to_json(self) -> str:
        nodes = np.column_stack([self.zeta.real, self.zeta.imag,
                                 self.weights[:, None]])
        return json.dumps({
            "schema": 1, "kind": "boundary", "n": self.n, "R": self.R,
            "n_r": self.n_r, "n_theta": self.n_theta, "grading": self.grading,
            "low_accuracy": self.low_accuracy,
            "nodes": nodes.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "BoundaryQuadratureRule":
        d = json.loads(text)
        if d.get("kind") != "boundary" or d.get("schema") != 1:
            raise ValueError("not a boundary rule document")
        nodes = np.asarray(d["nodes"], dtype=float)
        n = int(d["n"])
        zeta = nodes[:, :n] + 1j * nodes[:, n:2 * n]
        return cls(n=n, zeta=zeta, weights=nodes[:, -1], R=float(d["R"]),
                   n_r=int(d["n_r"]), n_theta=int(d["n_theta"]),
                   grading=float(d["grading"]),
                   low_accuracy=bool(d["low_accuracy"]))


@dataclass(frozen=True)
class VolumeQuadratureRule:
    """Interior nodes (zeta, t > 0) and weights for the Lebesgue measure."""

    n: int
    zeta: np.ndarray          # (m, n) complex
    t: np.ndarray             # (m,) positive
    weights: np.ndarray       # (m,) positive
    R_vol: float
    T_vol: float

    def __post_init__(self):
        if np.any(self.t <= 0):
            raise ValueError("volume nodes must have t > 0")
        if np.any(self.weights <= 0):
            raise ValueError("all weights must be positive")

    @property
    def m(self) -> int:
        return self.weights.size

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _graded_midpoint(n_cells: int, length: float, grading: float):
    """Midpoint nodes and jacobian weights of s -> length * s^grading on [0,1]."""
    s = (np.arange(n_cells) + 0.5) / n_cells
    x = length * s ** grading
    w = length * grading * s ** (grading - 1.0) / n_cells
    return x, w


def build_boundary_rule(n: int, n_r: int, n_theta: int, R: float,
                        grading: float = 3.0) -> BoundaryQuadratureRule:
    """Boundary rule on |zeta| <= R.

    For n = 1: polar grid zeta = rho_k e^{i theta_m}, radial nodes graded
    toward the origin, weights (rho/2) * rho drho dtheta.  For n > 1 a
    Halton rule on the 2n-ball with the same weight function.
    """
    if n_r < 4 or n_theta < 4:
        raise ValueError("n_r and n_theta must be at least 4")
    if R <= 0:
        raise ValueError("truncation radius must be positive")
    if grading < 1:
        raise ValueError("grading must be >= 1")
    if n == 1:
        rho, wr = _graded_midpoint(n_r, R, grading)
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        zeta = (rho[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
        w = ((rho / 2.0) * rho * wr)[:, None] * (2.0 * np.pi / n_theta)
        return BoundaryQuadratureRule(n=1, zeta=zeta,
                                      weights=np.broadcast_to(w, (n_r, n_theta)).reshape(-1).copy(),
                                      R=R, n_r=n_r, n_theta=n_theta,
                                      grading=grading)
    # n > 1: quasi-Monte-Carlo with dsigma weight; lower accuracy.
    from scipy.stats import qmc
    from scipy.special import gammaln

    m = n_r * n_theta
    sampler = qmc.Halton(d=2 * n + 1, scramble=True, seed=0)
    u = sampler.random(m)
    from scipy.special import ndtri
    directions = ndtri(u[:, :2 * n])
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = R * u[:, -1] ** (1.0 / (2 * n))
    pts = directions * radii[:, None]
    zeta = pts[:, :n] + 1j * pts[:, n:]
    ball_vol = np.exp(n * np.log(np.pi) + 2 * n * np.log(R) - gammaln(n + 1.0))
    az = np.sqrt(np.sum(np.abs(zeta) ** 2, axis=-1))
    weights = (az / 2.0) * ball_vol / m
    return BoundaryQuadratureRule(n=n, zeta=zeta, weights=weights, R=R,
                                  n_r=n_r, n_theta=n_theta, grading=grading,
                                  low_accuracy=True)


def _values_on_boundary(f, rule: BoundaryQuadratureRule) -> np.ndarray:
    if isinstance(f, ScalarField):
        if np.isfinite(f.decay_exponent) and f.decay_exponent <= 2 * rule.n + 1:
            warnings.warn(
                f"decay exponent {f.decay_exponent} <= 2n+1 = {2 * rule.n + 1}: "
                "the truncated boundary integral may converge slowly",
                RuntimeWarning, stacklevel=3)
        vals = f.on_nodes(rule.zeta, np.zeros(rule.m))
    elif callable(f):
        vals = np.asarray(f(rule.zeta, np.zeros(rule.m)))
    else:
        vals = np.asarray(f)
        if vals.shape != (rule.m,):
            raise ValueError("value array does not match the rule's node count")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite values in boundary integrand")
    return vals


def integrate_boundary(f, rule: BoundaryQuadratureRule) -> float:
    """sum f(node) * weight over the rule (pairwise summation)."""
    vals = _values_on_boundary(f, rule)
    return complex(np.sum(vals * rule.weights)).real


def single_layer(ctx: KernelContext, density, rule: BoundaryQuadratureRule,
                 beta: HeisenbergPoint) -> float:
    """V(beta) = sum density(alpha) Psi(beta, alpha) weight(alpha)."""
    vals = _values_on_boundary(density, rule)
    if beta.t == 0.0 and np.any(np.all(beta.zeta == rule.zeta, axis=-1)):
        raise ValueError("beta coincides with a quadrature node; use the "
                         "subtracted double-layer path for boundary traces")
    kern = psi_nodes(ctx, beta, rule.zeta, np.zeros(rule.m))
    return float(np.sum(vals * kern * rule.weights))


def double_layer_subtracted(ctx: KernelContext, density,
                            rule: BoundaryQuadratureRule,
                            beta: HeisenbergPoint,
                            psi_beta: float | None = None) -> float:
    """Double layer at a boundary pole via the subtraction identity:

        W psi (beta) = int [psi(alpha) - psi(beta)] dperp Psi(beta, alpha) dsigma
                       + psi(beta) * BOUNDARY_POLE_FLUX.

    The difference factor cancels the diagonal singularity, so plain
    quadrature converges; nodes coinciding with beta are skipped (their
    subtracted integrand vanishes there).
    """
    if beta.t != 0.0:
        raise ValueError("beta must lie on the boundary plane t = 0")
    vals = _values_on_boundary(density, rule)
    if psi_beta is None:
        if isinstance(density, ScalarField):
            psi_beta = float(np.real(density(beta)))
        else:
            hit = np.where(np.all(rule.zeta == beta.zeta, axis=-1))[0]
            if hit.size != 1:
                raise ValueError("psi_beta required when density is a sample "
                                 "vector and beta is not a node")
            psi_beta = float(vals[hit[0]])
    keep = ~np.all(rule.zeta == beta.zeta, axis=-1)
    kern = dperp_psi_nodes(ctx, beta, rule.zeta[keep])
    diff = vals[keep] - psi_beta
    return float(np.sum(diff * kern * rule.weights[keep])
                 + psi_beta * BOUNDARY_POLE_FLUX)


def build_volume_rule(n: int, R_vol: float, T_vol: float,
                      resolution) -> VolumeQuadratureRule:
    """Tensor rule over the truncated half-space |zeta| <= R_vol, 0 < t <= T_vol.

    ``resolution`` is (n_r, n_theta, n_t) (an int is used for all three).
    Radial and vertical nodes are graded toward zeta = 0 and t = 0.
    """
    if R_vol <= 0 or T_vol <= 0:
        raise ValueError("truncations must be positive")
    if isinstance(resolution, int):
        resolution = (resolution, resolution, resolution)
    n_r, n_theta, n_t = resolution
    if n != 1:
        raise NotImplementedError("volume rules are implemented for n = 1")
    rho, wr = _graded_midpoint(n_r, R_vol, 2.0)
    tt, wt = _graded_midpoint(n_t, T_vol, 2.0)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    Z = (rho[:, None] * np.exp(1j * theta)[None, :])[:, :, None] \
        * np.ones(n_t)[None, None, :]
    T = np.broadcast_to(tt[None, None, :], Z.shape)
    W = (rho * wr)[:, None, None] * (2.0 * np.pi / n_theta) \
        * wt[None, None, :] * np.ones(n_theta)[None, :, None]
    return VolumeQuadratureRule(n=1, zeta=Z.reshape(-1, 1),
                                t=T.reshape(-1).copy(),
                                weights=W.reshape(-1).copy(),
                                R_vol=R_vol, T_vol=T_vol)


def integrate_volume(f, rule: VolumeQuadratureRule) -> float:
    """sum f(node) * weight over the half-space rule."""
    if isinstance(f, ScalarField):
        vals = f.on_nodes(rule.zeta, rule.t)
    elif callable(f):
        vals = np.asarray(f(rule.zeta, rule.t))
    else:
        vals = np.asarray(f)
        if vals.shape != (rule.m,):
            raise ValueError("value array does not match the rule's node count")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite values in volume integrand")
    return complex(np.sum(vals * rule.weights)).real
