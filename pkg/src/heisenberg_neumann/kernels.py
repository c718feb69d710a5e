"""Closed-form kernels on the half-space t > 0 of H_n.

Everything is expressed through the pair

    C(beta, alpha) = |zeta|^2 + |zeta'|^2 + i (t' - t),
    Q(beta, alpha) = 2 zeta . conj(zeta'),

with alpha = (zeta, t) the integration variable and beta = (zeta', t') the
pole.  |C - Q| equals the squared gauge distance, so the fundamental
solution is c |C - Q|^{-n} and the modified kernel is Psi = 2 g.

The boundary-normal derivative of Psi in alpha on the plane t = 0 has the
closed form (A = C - Q)

    dperp Psi = -(2 n c / |zeta|) |A|^{-(n+2)} [2 |zeta|^2 Im A + Im(conj(A) Q)],

derived by applying i (E - Ebar)/|zeta| to |A|^{-n} using
E C = 2|zeta|^2, Ebar C = 0, E Q = Q, Ebar conj(Q) = conj(Q).

The phase-averaged kernel gbar and its normal derivative are hypergeometric
in z = |Q|^2 / |C|^2, and the reflection beta -> (zeta', -t') builds the
Neumann-function kernel G = gbar(beta) + gbar(beta*), whose boundary normal
derivative cancels identically on t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import HeisenbergPoint, gauge_norm, group_inverse, group_mul
from .hyp2f1 import hyp2f1_many

__all__ = [
    "KernelContext",
    "CQPair",
    "cq",
    "cq_nodes",
    "fundamental_solution",
    "psi",
    "psi_nodes",
    "dperp_psi",
    "dperp_psi_nodes",
    "gbar",
    "gbar_nodes",
    "dperp_gbar",
    "dperp_gbar_nodes",
    "reflect",
    "neumann_function",
    "neumann_function_nodes",
    "dperp_neumann_function",
    "dperp_neumann_function_nodes",
    "gauge_distance",
]

Z_DIAGONAL_MAX = 1.0 - 1e-13


@dataclass(frozen=True)
class KernelContext:
    """Dimension and calibrated kernel constants.

    ``c_fund`` is fixed by the flux calibration (see verification module),
    which also sets ``calibrated``; ``a0`` is tied to it, a0 = c_fund, since
    g = c p^{-2n} = c |C - Q|^{-n}.
    """

    n: int
    c_fund: float
    calibrated: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.c_fund <= 0:
            raise ValueError("c_fund must be positive")

    @property
    def a0(self) -> float:
        return self.c_fund


@dataclass(frozen=True)
class CQPair:
    C: complex
    Q: complex


def cq_nodes(beta: HeisenbergPoint, zeta, t):
    """C and Q for one pole beta against arrays of points (zeta (m,n), t (m,))."""
    zeta = np.asarray(zeta, dtype=complex)
    t = np.asarray(t, dtype=float)
    if zeta.shape[-1] != beta.n:
        raise ValueError("dimension mismatch between pole and nodes")
    s = np.sum(np.abs(zeta) ** 2, axis=-1)
    sp = float(np.sum(np.abs(beta.zeta) ** 2))
    C = s + sp + 1j * (beta.t - t)
    Q = 2.0 * np.sum(zeta * np.conj(beta.zeta), axis=-1)
    return C, Q


def cq(beta: HeisenbergPoint, alpha: HeisenbergPoint) -> CQPair:
    C, Q = cq_nodes(beta, alpha.zeta[np.newaxis, :], np.asarray([alpha.t]))
    return CQPair(complex(C[0]), complex(Q[0]))


def fundamental_solution(ctx: KernelContext, beta: HeisenbergPoint,
                         alpha: HeisenbergPoint) -> float:
    """c |C - Q|^{-n} = c gauge(beta^{-1} alpha)^{-2n}."""
    pair = cq(beta, alpha)
    d = abs(pair.C - pair.Q)
    if d == 0.0:
        raise ZeroDivisionError("fundamental solution evaluated at its pole")
    return ctx.c_fund * d ** (-ctx.n)


def psi(ctx: KernelContext, beta: HeisenbergPoint, alpha: HeisenbergPoint) -> float:
    """Psi(beta, alpha) = 2 g_beta(alpha)."""
    return 2.0 * fundamental_solution(ctx, beta, alpha)


def psi_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta, t):
    C, Q = cq_nodes(beta, zeta, t)
    return 2.0 * ctx.c_fund * np.abs(C - Q) ** (-ctx.n)


def dperp_psi_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta):
    """Boundary-normal derivative of Psi in alpha = (zeta, 0), vectorized."""
    zeta = np.asarray(zeta, dtype=complex)
    C, Q = cq_nodes(beta, zeta, np.zeros(zeta.shape[:-1]))
    A = C - Q
    az2 = np.sum(np.abs(zeta) ** 2, axis=-1)
    az = np.sqrt(az2)
    bracket = 2.0 * az2 * A.imag + (np.conj(A) * Q).imag
    return -(2.0 * ctx.n * ctx.c_fund / az) * np.abs(A) ** (-(ctx.n + 2)) * bracket


def dperp_psi(ctx: KernelContext, beta: HeisenbergPoint, alpha_zeta) -> float:
    """Scalar wrapper of :func:`dperp_psi_nodes`; alpha = (zeta, 0), |zeta| > 0."""
    z = np.atleast_1d(np.asarray(alpha_zeta, dtype=complex))
    if not np.any(z != 0):
        raise ValueError("characteristic point: route through the subtracted "
                         "quadrature path")
    return float(dperp_psi_nodes(ctx, beta, z[np.newaxis, :])[0])


def _z_ratio(C, Q):
    z = (np.abs(Q) / np.abs(C)) ** 2
    if np.any(z > Z_DIAGONAL_MAX):
        raise ValueError("point too close to the circular diagonal of the "
                         "averaged kernel; use the subtraction scheme")
    return z


def gbar_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta, t):
    """Phase-averaged fundamental solution a0 |C|^{-n} F(n/2, n/2; n; z)."""
    C, Q = cq_nodes(beta, zeta, t)
    z = _z_ratio(C, Q)
    F = hyp2f1_many(ctx.n / 2.0, ctx.n / 2.0, float(ctx.n), z)
    return ctx.a0 * np.abs(C) ** (-ctx.n) * F


def gbar(ctx: KernelContext, beta: HeisenbergPoint, alpha: HeisenbergPoint) -> float:
    return float(gbar_nodes(ctx, beta, alpha.zeta[np.newaxis, :],
                            np.asarray([alpha.t]))[0])


def dperp_gbar_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta):
    """Boundary-normal derivative of gbar at alpha = (zeta, 0):

    2 n |zeta| a0 (t - t') |C|^{-(n+2)} F(n/2+1, n/2; n; z)  with t = 0.
    """
    zeta = np.asarray(zeta, dtype=complex)
    C, Q = cq_nodes(beta, zeta, np.zeros(zeta.shape[:-1]))
    z = _z_ratio(C, Q)
    az = np.sqrt(np.sum(np.abs(zeta) ** 2, axis=-1))
    F = hyp2f1_many(ctx.n / 2.0 + 1.0, ctx.n / 2.0, float(ctx.n), z)
    return (2.0 * ctx.n * az * ctx.a0 * (0.0 - beta.t)
            * np.abs(C) ** (-(ctx.n + 2)) * F)


def dperp_gbar(ctx: KernelContext, beta: HeisenbergPoint, alpha_zeta) -> float:
    z = np.atleast_1d(np.asarray(alpha_zeta, dtype=complex))
    return float(dperp_gbar_nodes(ctx, beta, z[np.newaxis, :])[0])


def reflect(beta: HeisenbergPoint) -> HeisenbergPoint:
    """Reflection across the boundary plane: (zeta', t') -> (zeta', -t')."""
    return HeisenbergPoint(beta.zeta, -beta.t)


def neumann_function_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta, t):
    """G(beta, alpha) = gbar(beta, alpha) + gbar(beta*, alpha)."""
    return (gbar_nodes(ctx, beta, zeta, t)
            + gbar_nodes(ctx, reflect(beta), zeta, t))


def neumann_function(ctx: KernelContext, beta: HeisenbergPoint,
                     alpha: HeisenbergPoint) -> float:
    return float(neumann_function_nodes(ctx, beta, alpha.zeta[np.newaxis, :],
                                        np.asarray([alpha.t]))[0])


def dperp_neumann_function_nodes(ctx: KernelContext, beta: HeisenbergPoint, zeta):
    """dperp G on the boundary; identically zero by the reflection cancellation
    (|C(beta, .)| = |C(beta*, .)| on t = 0 and the (t - t'), (t + t') factors
    are opposite), computed as the explicit two-term sum."""
    return (dperp_gbar_nodes(ctx, beta, zeta)
            + dperp_gbar_nodes(ctx, reflect(beta), zeta))


def dperp_neumann_function(ctx: KernelContext, beta: HeisenbergPoint,
                           alpha_zeta) -> float:
    z = np.atleast_1d(np.asarray(alpha_zeta, dtype=complex))
    return float(dperp_neumann_function_nodes(ctx, beta, z[np.newaxis, :])[0])


def gauge_distance(beta: HeisenbergPoint, alpha: HeisenbergPoint) -> float:
    """gauge(beta^{-1} alpha); equals |C - Q|^{1/2}."""
    return gauge_norm(group_mul(group_inverse(beta), alpha))
