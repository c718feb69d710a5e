"""Numerical certification suite for the kernel calculus.

Covers: calibration of the kernel constant from the interior boundary-flux
target, the pole-location flux table, the jump relations of the layer
potentials across the boundary plane, the two Green identities on truncated
domains, the vanishing normal derivative of the reflection kernel, and the
hypergeometric oracles.  Each check produces a CheckResult with the
measured value, the expected value, and the tolerance it was held to.

The checks are faithful to the stated target values.  Where a target is
not reproduced, the check fails with the measured value on record; the
suite never adjusts a target to fit.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from .group import HeisenbergPoint, ScalarField, kohn_laplacian_nodes, \
    normal_derivative_nodes, vector_field_nodes
from .hyp2f1 import hyp2f1_many
from .kernels import (KernelContext, cq_nodes, dperp_neumann_function_nodes,
                      dperp_psi_nodes, psi_nodes)
from .quadrature import (BoundaryQuadratureRule, VolumeQuadratureRule,
                         build_boundary_rule, build_volume_rule,
                         double_layer_subtracted, integrate_boundary,
                         integrate_volume, _graded_midpoint)

__all__ = [
    "CheckResult",
    "calibrate",
    "check_lemma_values",
    "check_jump_relations",
    "check_green_identities",
    "check_neumann_bc",
    "check_hypergeometric",
    "run_all",
    "write_report",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    expected: float
    tolerance: float        # absolute unless relative=True
    passed: bool
    relative: bool = False
    refinement_order: float | None = None

    @staticmethod
    def make(name, measured, expected, tolerance, relative=False, order=None):
        err = abs(measured - expected)
        if relative:
            err /= max(abs(expected), abs(measured), 1e-300)
        return CheckResult(name=name, measured=float(measured),
                           expected=float(expected), tolerance=tolerance,
                           passed=bool(err <= tolerance), relative=relative,
                           refinement_order=order)


def boundary_flux(ctx: KernelContext, rule: BoundaryQuadratureRule,
                  beta: HeisenbergPoint) -> float:
    """int dperp Psi(beta, alpha) dsigma(alpha) over the truncated rule."""
    return float(np.sum(dperp_psi_nodes(ctx, beta, rule.zeta) * rule.weights))


def _default_rule_sequence(n: int):
    return [build_boundary_rule(n, n_r, 64, R)
            for n_r, R in ((96, 8.0), (128, 16.0), (192, 32.0))]


def calibrate(n: int, rule_sequence=None, return_diagnostics: bool = False):
    """Fix c_fund by the interior flux target.

    The raw flux at the reference pole beta0 = (0, 1) is computed on a
    sequence of rules of increasing radius and extrapolated in 1/R^2 (the
    truncation tail of the flux integrand is O(R^{-2})); c_fund is then the
    value that makes the extrapolated flux equal -2.
    """
    if rule_sequence is None:
        rule_sequence = _default_rule_sequence(n)
    if len(rule_sequence) < 3:
        raise ValueError("need at least three rules for the extrapolation")
    raw = KernelContext(n, 1.0)
    beta0 = HeisenbergPoint(np.zeros(n, dtype=complex), 1.0)
    fluxes = np.array([boundary_flux(raw, r, beta0) for r in rule_sequence])
    radii = np.array([r.R for r in rule_sequence])

    def extrap(i, j):
        Ri2, Rj2 = radii[i] ** 2, radii[j] ** 2
        return (fluxes[j] * Rj2 - fluxes[i] * Ri2) / (Rj2 - Ri2)

    L_prev = extrap(-3, -2)
    L = extrap(-2, -1)
    if not np.isfinite(L) or abs(L - L_prev) > 0.05 * abs(L):
        raise RuntimeError(
            f"flux extrapolation not convergent: {L_prev:.6f} vs {L:.6f}")
    c_fund = -2.0 / L
    ctx = KernelContext(n=n, c_fund=c_fund, calibrated=True)
    if return_diagnostics:
        diag = {
            "raw_fluxes": fluxes.tolist(),
            "radii": radii.tolist(),
            "extrapolated_raw_flux": L,
            "extrapolation_drift": abs(L - L_prev),
            "calibrated_flux_at_reference": c_fund * L,
        }
        return ctx, diag
    return ctx


def check_lemma_values(ctx: KernelContext, poles=None,
                       rule: BoundaryQuadratureRule | None = None):
    """Flux table: interior poles -> -2, boundary poles -> -1 (subtracted
    path), exterior poles -> 0, at the stated tolerances."""
    if rule is None:
        rule = build_boundary_rule(ctx.n, 192, 64, 32.0)
    if poles is None:
        z1 = np.zeros(ctx.n, dtype=complex)
        e1 = np.zeros(ctx.n, dtype=complex)
        e1[0] = 1.0
        poles = [HeisenbergPoint(z1, 1.0), HeisenbergPoint(z1, 4.0),
                 HeisenbergPoint(e1, 2.0), HeisenbergPoint(e1, 0.0),
                 HeisenbergPoint(z1, -1.0), HeisenbergPoint(z1, -4.0)]
    one = ScalarField(lambda z, t: np.ones(np.shape(t)),
                      decay_exponent=np.inf, circular=True)
    out = []
    for beta in poles:
        if beta.t > 0:
            val = boundary_flux(ctx, rule, beta)
            out.append(CheckResult.make(
                f"flux_interior_t={beta.t:g}", val, -2.0, 0.01, relative=True))
        elif beta.t == 0:
            val = double_layer_subtracted(ctx, one, rule, beta)
            out.append(CheckResult.make(
                f"flux_boundary_|zeta|={float(np.linalg.norm(beta.zeta)):g}",
                val, -1.0, 1e-12))
        else:
            val = boundary_flux(ctx, rule, beta)
            out.append(CheckResult.make(
                f"flux_exterior_t={beta.t:g}", val, 0.0, 0.02))
    return out


def centered_boundary_rule(center, n_r: int, n_theta: int, R_loc: float,
                           grading: float = 3.0) -> BoundaryQuadratureRule:
    """Polar rule centered at a boundary point zeta = center (n = 1).

    Grading concentrates nodes at the center, which is where layer-potential
    integrands peak when the evaluation point approaches the boundary there.
    """
    center = np.asarray(center, dtype=complex).reshape(1)
    rho, wr = _graded_midpoint(n_r, R_loc, grading)
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    zeta = center[None, None, :] + (rho[:, None] * np.exp(1j * theta)[None, :])[:, :, None]
    az = np.abs(zeta[:, :, 0])
    w = (az / 2.0) * rho[:, None] * wr[:, None] * (2.0 * np.pi / n_theta)
    return BoundaryQuadratureRule(n=1, zeta=zeta.reshape(-1, 1),
                                  weights=w.reshape(-1).copy(), R=R_loc,
                                  n_r=n_r, n_theta=n_theta, grading=grading)


def _dperp_beta_kernel(ctx: KernelContext, beta: HeisenbergPoint, zeta):
    """dperp of Psi taken in the *pole* slot, both points on the boundary.

    By the swap symmetry of Psi this is the closed form with the roles of
    the two points exchanged: conjugate C, Q and use |beta.zeta| in the
    prefactor.
    """
    C, Q = cq_nodes(HeisenbergPoint(beta.zeta, 0.0), zeta, np.zeros(np.asarray(zeta).shape[:-1]))
    A = C - Q
    bz2 = float(np.sum(np.abs(beta.zeta) ** 2))
    bz = np.sqrt(bz2)
    bracket = 2.0 * bz2 * np.conj(A).imag + (A * np.conj(Q)).imag
    return -(2.0 * ctx.n * ctx.c_fund / bz) * np.abs(A) ** (-(ctx.n + 2)) * bracket


def adjoint_double_layer_subtracted(ctx: KernelContext, density: ScalarField,
                                    rule: BoundaryQuadratureRule,
                                    beta: HeisenbergPoint) -> float:
    """Subtracted boundary value of the pole-slot-differentiated kernel,
    closed with the same boundary flux constant as the alpha-slot operator."""
    vals = np.real(density.on_nodes(rule.zeta, np.zeros(rule.m)))
    psi_beta = float(np.real(density(beta)))
    kern = _dperp_beta_kernel(ctx, beta, rule.zeta)
    return float(np.sum((vals - psi_beta) * kern * rule.weights) - psi_beta)


def _extrapolate(values: np.ndarray, ratio: float = 2.0):
    """Richardson limit of f(h_k) on a geometric h sequence with the given
    step ratio; the empirical order is fitted from the last three samples."""
    d = np.diff(values)
    if abs(d[-1]) < 1e-15:
        return float(values[-1]), None
    p = (np.log(abs(d[-2] / d[-1])) / np.log(ratio)
         if abs(d[-2]) > 0 else np.nan)
    p_use = p if np.isfinite(p) and 0.25 < p < 6 else 1.0
    limit = values[-1] + d[-1] / (ratio ** p_use - 1.0)
    return float(limit), float(p) if np.isfinite(p) else None


def check_jump_relations(ctx: KernelContext, psi_field: ScalarField,
                         beta_boundary: HeisenbergPoint, h_sequence=None):
    """Interior/exterior limits of the double layer and of dperp of the
    single layer at a non-characteristic boundary point, by offsetting the
    pole along the Euclidean t-axis and extrapolating in h.

    For circular densities (n = 1) the angular integral is carried out
    analytically through the averaged kernel, leaving an adaptive radial
    quadrature; this keeps the near-boundary evaluation accurate down to
    small h, where a fixed two-dimensional rule loses the singular
    cancellation.  Non-circular densities fall back to a centered polar
    rule and a moderate h window.
    """
    beta = beta_boundary
    if beta.t != 0.0 or not np.any(beta.zeta != 0):
        raise ValueError("need a non-characteristic boundary point")
    circular_path = psi_field.circular and ctx.n == 1
    if h_sequence is None:
        h_sequence = ([0.04 / 4 ** k for k in range(4)] if circular_path
                      else [0.64 / 2 ** k for k in range(5)])
    h_sequence = np.asarray(sorted(h_sequence, reverse=True), dtype=float)
    rule = centered_boundary_rule(beta.zeta, 260, 64, 8.0)
    psi_b = float(np.real(psi_field(beta)))

    if circular_path:
        from scipy.integrate import quad
        from .kernels import dperp_gbar_nodes, gbar_nodes
        b = float(np.abs(beta.zeta[0]))
        R_cut = 12.0

        def radial(r):
            return float(np.real(psi_field.func(
                np.array([[r + 0j]]), np.array([0.0]))[0]))

        def dlayer(t_off):
            gam = HeisenbergPoint(beta.zeta, t_off)

            def f(r):
                k = float(dperp_gbar_nodes(ctx, gam, np.array([[r + 0j]]))[0])
                return radial(r) * 2.0 * k * r * r / 2.0

            val = quad(f, 0.0, R_cut, points=[b], limit=400,
                       epsabs=1e-12, epsrel=1e-11)[0]
            return 2.0 * np.pi * val

        def single_layer_field(z, t):
            z = np.asarray(z, dtype=complex)
            t = np.asarray(t, dtype=float)
            out = np.empty(t.shape)
            for idx in np.ndindex(t.shape):
                gam = HeisenbergPoint(np.atleast_1d(z[idx]), float(t[idx]))

                def f(r):
                    k = float(gbar_nodes(ctx, gam, np.array([[r + 0j]]),
                                         np.array([0.0]))[0])
                    return radial(r) * 2.0 * k * r * r / 2.0

                out[idx] = 2.0 * np.pi * quad(f, 0.0, R_cut, points=[b],
                                              limit=400, epsabs=1e-12,
                                              epsrel=1e-11)[0]
            return out

        Vfield = ScalarField(single_layer_field, decay_exponent=np.inf,
                             circular=True)

        def slayer_dperp(t_off):
            return float(np.real(normal_derivative_nodes(
                Vfield, beta.zeta[np.newaxis, :], np.asarray([t_off]),
                abs(t_off) / 30.0, order=4)[0]))
    else:
        vals = np.real(psi_field.on_nodes(rule.zeta, np.zeros(rule.m)))

        def dlayer(t_off):
            k = dperp_psi_nodes(ctx, HeisenbergPoint(beta.zeta, t_off),
                                rule.zeta)
            return float(np.sum(vals * k * rule.weights))

        def slayer_dperp(t_off):
            def V(z, t):
                z = np.asarray(z, dtype=complex)
                t = np.asarray(t, dtype=float)
                out = np.empty(t.shape)
                for idx in np.ndindex(t.shape):
                    kern = psi_nodes(ctx, HeisenbergPoint(z[idx], t[idx]),
                                     rule.zeta, np.zeros(rule.m))
                    out[idx] = np.sum(vals * kern * rule.weights)
                return out

            fld = ScalarField(V, decay_exponent=np.inf, circular=False)
            return float(np.real(normal_derivative_nodes(
                fld, beta.zeta[np.newaxis, :], np.asarray([t_off]),
                abs(t_off) / 30.0, order=2)[0]))

    V_int = np.array([dlayer(+h) for h in h_sequence])
    V_ext = np.array([dlayer(-h) for h in h_sequence])
    dV_int = np.array([slayer_dperp(+h) for h in h_sequence])
    dV_ext = np.array([slayer_dperp(-h) for h in h_sequence])
    for name, seq in (("interior", V_int), ("exterior", V_ext)):
        d = np.abs(np.diff(seq))
        if np.any(np.diff(d) > 0):
            warnings.warn(f"non-monotone h convergence in the {name} "
                          "double-layer limit", RuntimeWarning, stacklevel=2)

    ratio = float(h_sequence[0] / h_sequence[1])
    W_b = double_layer_subtracted(ctx, psi_field, rule, beta)
    A_b = adjoint_double_layer_subtracted(ctx, psi_field, rule, beta)
    Li, p_i = _extrapolate(V_int, ratio)
    Le, p_e = _extrapolate(V_ext, ratio)
    Ldi, _ = _extrapolate(dV_int, ratio)
    Lde, _ = _extrapolate(dV_ext, ratio)
    # normal-derivative continuity of the double layer: one-sided difference
    # quotients from either side should share a limit
    D_int = np.diff(V_int[::-1]) / np.diff(h_sequence[::-1])
    D_ext = np.diff(V_ext[::-1]) / np.diff(-h_sequence[::-1])
    cont, _ = _extrapolate(D_int - D_ext, ratio)
    scale = max(abs(psi_b), 1e-12)
    return [
        CheckResult.make("jump_dlayer_interior", Li, W_b - psi_b, 1e-3,
                         relative=True, order=p_i),
        CheckResult.make("jump_dlayer_exterior", Le, W_b + psi_b, 1e-3,
                         relative=True, order=p_e),
        CheckResult.make("jump_dlayer_difference", Li - Le, -2.0 * psi_b,
                         1e-3, relative=True),
        CheckResult.make("jump_slayer_dperp_interior", Ldi, A_b + psi_b,
                         1e-3, relative=True),
        CheckResult.make("jump_slayer_dperp_exterior", Lde, A_b - psi_b,
                         1e-3, relative=True),
        CheckResult.make("dlayer_normal_derivative_continuity",
                         cont / max(abs(np.mean(D_int)), scale), 0.0, 1e-2),
    ]


def _boundary_dperp_values(f: ScalarField, rule: BoundaryQuadratureRule,
                           h: float = 1e-3):
    return np.real(normal_derivative_nodes(f, rule.zeta, np.zeros(rule.m),
                                           h, order=4))


def _volume_delta0(f: ScalarField, vol: VolumeQuadratureRule, h: float = 1e-3):
    return np.real(kohn_laplacian_nodes(f, vol.zeta, vol.t, h, order=4,
                                        normalized=True))


def _volume_grad_dot(f1: ScalarField, f2: ScalarField,
                     vol: VolumeQuadratureRule, h: float = 1e-3):
    acc = np.zeros(vol.m)
    for name in ("X", "Y"):
        for j in range(vol.n):
            a = vector_field_nodes(f1, name, j, vol.zeta, vol.t, h, order=4)
            b = vector_field_nodes(f2, name, j, vol.zeta, vol.t, h, order=4)
            acc += np.real(a) * np.real(b)
    return acc


def _tail(values, weights, mask):
    """Contribution of the outer region (mask) of a truncated integral."""
    return float(np.sum(values[mask] * weights[mask]))


def check_green_identities(ctx: KernelContext, f1: ScalarField,
                           f2: ScalarField,
                           rule: BoundaryQuadratureRule | None = None,
                           vol_rule: VolumeQuadratureRule | None = None):
    """Symmetric identity
        int (f1 D f2 - f2 D f1) dnu = int (f1 dperp f2 - f2 dperp f1) dsigma
    and the first identity
        int f2 dperp f1 dsigma = int (f2 D f1 - grad0 f2 . grad0 f1) dnu
    on the truncated domain, with the truncation tail reported and added to
    the tolerance budget."""
    if rule is None:
        rule = build_boundary_rule(1, 140, 48, 7.0, grading=2.0)
    if vol_rule is None:
        vol_rule = build_volume_rule(1, 7.0, 10.0, (90, 16, 90))
    d1 = _volume_delta0(f1, vol_rule)
    d2 = _volume_delta0(f2, vol_rule)
    v1 = np.real(f1.on_nodes(vol_rule.zeta, vol_rule.t))
    v2 = np.real(f2.on_nodes(vol_rule.zeta, vol_rule.t))
    b1 = np.real(f1.on_nodes(rule.zeta, np.zeros(rule.m)))
    b2 = np.real(f2.on_nodes(rule.zeta, np.zeros(rule.m)))
    n1 = _boundary_dperp_values(f1, rule)
    n2 = _boundary_dperp_values(f2, rule)
    gdot = _volume_grad_dot(f1, f2, vol_rule)

    sym_vol_density = v1 * d2 - v2 * d1
    sym_bdry_density = b1 * n2 - b2 * n1
    first_vol_density = v2 * d1 - gdot
    first_bdry_density = b2 * n1

    lhs_sym = float(np.sum(sym_vol_density * vol_rule.weights))
    rhs_sym = float(np.sum(sym_bdry_density * rule.weights))
    lhs_first = float(np.sum(first_bdry_density * rule.weights))
    rhs_first = float(np.sum(first_vol_density * vol_rule.weights))

    az_vol = np.sqrt(np.sum(np.abs(vol_rule.zeta) ** 2, axis=-1))
    az_b = np.sqrt(np.sum(np.abs(rule.zeta) ** 2, axis=-1))
    outer_v = (az_vol > vol_rule.R_vol / 2.0) | (vol_rule.t > vol_rule.T_vol / 2.0)
    outer_b = az_b > rule.R / 2.0
    tail_sym = (abs(_tail(sym_vol_density, vol_rule.weights, outer_v))
                + abs(_tail(sym_bdry_density, rule.weights, outer_b)))
    tail_first = (abs(_tail(first_vol_density, vol_rule.weights, outer_v))
                  + abs(_tail(first_bdry_density, rule.weights, outer_b)))

    scale_sym = max(abs(lhs_sym), abs(rhs_sym),
                    float(np.sum(np.abs(sym_vol_density) * vol_rule.weights)) * 0.01)
    scale_first = max(abs(lhs_first), abs(rhs_first), 1e-12)
    return [
        CheckResult.make("green_symmetric", lhs_sym - rhs_sym, 0.0,
                         0.01 * scale_sym + tail_sym),
        CheckResult.make("green_first", lhs_first - rhs_first, 0.0,
                         0.01 * scale_first + tail_first),
    ]


def check_neumann_bc(ctx: KernelContext, beta_list=None,
                     boundary_samples: int = 50):
    """max |dperp G(beta, .)| over boundary samples; zero by the reflection
    cancellation, so the tolerance is pure evaluation noise."""
    if beta_list is None:
        z0 = np.zeros(ctx.n, dtype=complex)
        e1 = np.zeros(ctx.n, dtype=complex)
        e1[0] = 1.0
        beta_list = [HeisenbergPoint(z0, 1.0), HeisenbergPoint(e1, 2.0),
                     HeisenbergPoint(0.5 * e1, 0.25)]
    rng = np.random.default_rng(7)
    out = []
    for beta in beta_list:
        r = rng.uniform(0.1, 4.0, boundary_samples)
        th = rng.uniform(0.0, 2.0 * np.pi, (boundary_samples, ctx.n))
        zeta = (r[:, None] / np.sqrt(ctx.n)) * np.exp(1j * th)
        vals = dperp_neumann_function_nodes(ctx, beta, zeta)
        out.append(CheckResult.make(
            f"neumann_bc_t={beta.t:g}", float(np.max(np.abs(vals))), 0.0,
            1e-10))
    return out


def check_hypergeometric():
    """The log and elliptic-integral oracles for the two series branches."""
    z = np.arange(0.1, 0.95, 0.1)
    f_log = hyp2f1_many(1.0, 1.0, 2.0, z)
    expect_log = -np.log1p(-z) / z
    # complete elliptic integral K by the arithmetic-geometric mean
    a, b = np.ones_like(z), np.sqrt(1.0 - z)
    for _ in range(60):
        a, b = (a + b) / 2.0, np.sqrt(a * b)
    f_ell = hyp2f1_many(0.5, 0.5, 1.0, z)
    expect_ell = 1.0 / a
    return [
        CheckResult.make("hyp2f1_log_oracle",
                         float(np.max(np.abs(f_log / expect_log - 1.0))),
                         0.0, 1e-10),
        CheckResult.make("hyp2f1_elliptic_oracle",
                         float(np.max(np.abs(f_ell / expect_ell - 1.0))),
                         0.0, 1e-10),
    ]


_CHECKS = ("lemma_values", "jump_relations", "green_identities",
           "neumann_bc", "hypergeometric")


def run_all(ctx: KernelContext | None = None, checks=None, n: int = 1):
    """Execute the selected checks; returns (results, all_passed)."""
    if checks is None:
        checks = list(_CHECKS)
    unknown = set(checks) - set(_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    if ctx is None and checks:
        ctx = calibrate(n)
    results: list[CheckResult] = []
    for name in checks:
        if name == "lemma_values":
            results += check_lemma_values(ctx)
        elif name == "jump_relations":
            field = ScalarField(
                lambda z, t: np.exp(-np.sum(np.abs(z) ** 2, axis=-1)),
                decay_exponent=np.inf, circular=True)
            e1 = np.zeros(ctx.n, dtype=complex)
            e1[0] = 1.0
            results += check_jump_relations(ctx, field,
                                            HeisenbergPoint(e1, 0.0))
        elif name == "green_identities":
            g1 = ScalarField(lambda z, t: np.exp(
                -(np.sum(np.abs(z) ** 2, axis=-1) ** 2 + np.asarray(t) ** 2)),
                decay_exponent=np.inf, circular=True)
            # t-shifted so the boundary terms are not identically zero
            g2 = ScalarField(lambda z, t: np.exp(
                -(np.sum(np.abs(z) ** 2, axis=-1) ** 2
                  + (np.asarray(t) - 1.0) ** 2) / 4.0),
                decay_exponent=np.inf, circular=True)
            results += check_green_identities(ctx, g1, g2)
        elif name == "neumann_bc":
            results += check_neumann_bc(ctx)
        elif name == "hypergeometric":
            results += check_hypergeometric()
    return results, all(r.passed for r in results)


def write_report(results, json_path=None, csv_path=None):
    """JSON array of CheckResult plus a CSV summary."""
    rows = [asdict(r) for r in results]
    if json_path is not None:
        with open(json_path, "w") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "measured", "expected", "tolerance",
                        "relative", "passed"])
            for r in results:
                w.writerow([r.name, repr(r.measured), repr(r.expected),
                            repr(r.tolerance), r.relative, r.passed])
