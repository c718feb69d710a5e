"""Group calculus on the Heisenberg group H_n.

Points are pairs (zeta, t) with zeta in C^n and t real, composed by the
twisted product (zeta, t)(eta, s) = (zeta + eta, t + s + 2 Im(zeta . conj(eta))).
Left-invariant vector fields X_j, Y_j, T and their complex combinations
Z_j, Zbar_j are applied to user-supplied scalar fields by central finite
differences.  The boundary-normal operator on the plane t = 0 is

    dperp = i (E - Ebar) / |zeta|,   E = sum_j zeta_j Z_j,

extended to the characteristic point zeta = 0 by evaluation on a small ring.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "HeisenbergPoint",
    "ScalarField",
    "StencilConfig",
    "group_mul",
    "group_inverse",
    "gauge_norm",
    "dilate",
    "apply_vector_field",
    "horizontal_gradient",
    "kohn_laplacian",
    "normal_derivative_boundary",
    "circular_average",
    "vector_field_nodes",
    "kohn_laplacian_nodes",
    "normal_derivative_nodes",
]


def _as_zeta(zeta) -> np.ndarray:
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if z.ndim != 1 or z.size < 1:
        raise ValueError("zeta must be a vector of at least one complex number")
    return z


@dataclass(frozen=True)
class HeisenbergPoint:
    """A point (zeta, t) of H_n; ``zeta`` is a length-n complex vector."""

    zeta: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "zeta", _as_zeta(self.zeta))
        object.__setattr__(self, "t", float(self.t))
        if not (np.all(np.isfinite(self.zeta)) and np.isfinite(self.t)):
            raise ValueError("point coordinates must be finite")

    @property
    def n(self) -> int:
        return self.zeta.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HeisenbergPoint)
            and self.n == other.n
            and bool(np.all(self.zeta == other.zeta))
            and self.t == other.t
        )


def _check_dims(p: HeisenbergPoint, q: HeisenbergPoint) -> None:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")


def group_mul(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    """Heisenberg product (zeta+eta, t+s+2 Im(zeta . conj(eta)))."""
    _check_dims(p, q)
    tw = 2.0 * float(np.imag(np.sum(p.zeta * np.conj(q.zeta))))
    return HeisenbergPoint(p.zeta + q.zeta, p.t + q.t + tw)


def group_inverse(p: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(-p.zeta, -p.t)


def gauge_norm(p: HeisenbergPoint) -> float:
    """Koranyi gauge (|zeta|^4 + t^2)^(1/4)."""
    s = float(np.sum(np.abs(p.zeta) ** 2))
    return (s * s + p.t * p.t) ** 0.25


def dilate(r: float, p: HeisenbergPoint) -> HeisenbergPoint:
    """Anisotropic dilation (r zeta, r^2 t); scales the gauge by r."""
    if r <= 0:
        raise ValueError("dilation factor must be positive")
    return HeisenbergPoint(r * p.zeta, r * r * p.t)


@dataclass(frozen=True)
class StencilConfig:
    """Central finite-difference stencil: step h (None = automatic) and order."""

    h: float | None = None
    order: int = 2

    def __post_init__(self):
        if self.h is not None and self.h <= 0:
            raise ValueError("stencil step must be positive")
        if self.order not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")

    def step_at(self, p: HeisenbergPoint) -> float:
        if self.h is not None:
            return self.h
        return 1e-4 * max(1.0, gauge_norm(p))


@dataclass(frozen=True)
class ScalarField:
    """A scalar function on H_n.

    ``func(zeta, t)`` must accept ``zeta`` of shape (..., n) complex and
    ``t`` of shape (...), broadcasting elementwise.  ``decay_exponent`` is
    the declared k with |f| = O(|zeta|^-k) at infinity; ``circular`` marks
    invariance under the common phase rotation zeta -> e^{i theta} zeta.
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    decay_exponent: float = 0.0
    circular: bool = False

    def __post_init__(self):
        if self.decay_exponent < 0:
            raise ValueError("decay_exponent must be nonnegative")

    def __call__(self, p: HeisenbergPoint) -> complex:
        return complex(self.func(p.zeta[np.newaxis, :], np.asarray([p.t]))[0])

    def on_nodes(self, zeta: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points; zeta shape (..., n), t shape (...)."""
        return np.asarray(self.func(zeta, np.asarray(t, dtype=float)))


# ---------------------------------------------------------------------------
# Finite-difference application of the left-invariant vector fields.
#
# The fields act through coordinate derivatives with point-dependent
# coefficients:  X_j = d/dx_j + 2 y_j d/dt,  Y_j = d/dy_j - 2 x_j d/dt,
# T = d/dt,  Z_j = (X_j - i Y_j)/2,  Zbar_j = (X_j + i Y_j)/2.
# All coordinate derivatives are central differences of the given order.
# ---------------------------------------------------------------------------

_STENCILS = {
    2: ((1.0, 0.5), (-1.0, -0.5)),
    4: ((1.0, 2.0 / 3.0), (-1.0, -2.0 / 3.0), (2.0, -1.0 / 12.0), (-2.0, 1.0 / 12.0)),
}


def _coord_derivative(func, zeta, t, h, order, which, j):
    """d/dx_j, d/dy_j or d/dt of an array-callable, central differences."""
    acc = 0.0
    for mult, coef in _STENCILS[order]:
        dz = np.zeros_like(zeta)
        dt = np.zeros_like(t, dtype=float)
        if which == "x":
            dz[..., j] = mult * h
        elif which == "y":
            dz[..., j] = 1j * mult * h
        else:
            dt = dt + mult * h
        acc = acc + coef * func(zeta + dz, t + dt)
    return acc / h


def _field_apply(func, name, j, zeta, t, h, order):
    """Apply one vector field to an array-callable at an array of points."""
    if name == "T":
        return _coord_derivative(func, zeta, t, h, order, "t", 0)
    x = zeta[..., j].real
    y = zeta[..., j].imag
    dt = _coord_derivative(func, zeta, t, h, order, "t", 0)
    if name == "X":
        return _coord_derivative(func, zeta, t, h, order, "x", j) + 2.0 * y * dt
    if name == "Y":
        return _coord_derivative(func, zeta, t, h, order, "y", j) - 2.0 * x * dt
    dx = _coord_derivative(func, zeta, t, h, order, "x", j)
    dy = _coord_derivative(func, zeta, t, h, order, "y", j)
    Xf = dx + 2.0 * y * dt
    Yf = dy - 2.0 * x * dt
    if name == "Z":
        return 0.5 * (Xf - 1j * Yf)
    if name == "Zbar":
        return 0.5 * (Xf + 1j * Yf)
    raise ValueError(f"unknown vector field {name!r}")


def vector_field_nodes(f: ScalarField, name: str, j: int, zeta, t, h, order=2):
    """Vectorized vector-field application at arrays of points."""
    return _field_apply(f.on_nodes, name, j, np.asarray(zeta, dtype=complex),
                        np.asarray(t, dtype=float), h, order)


def apply_vector_field(name: str, f: ScalarField, p: HeisenbergPoint,
                       cfg: StencilConfig = StencilConfig(), j: int = 0) -> complex:
    """Apply X_j, Y_j, T, Z_j or Zbar_j (name in {"X","Y","T","Z","Zbar"})."""
    h = cfg.step_at(p)
    val = _field_apply(f.on_nodes, name, j, p.zeta[np.newaxis, :],
                       np.asarray([p.t]), h, cfg.order)
    return complex(val[0])


def horizontal_gradient(f: ScalarField, p: HeisenbergPoint,
                        cfg: StencilConfig = StencilConfig()) -> np.ndarray:
    """(X_1 f, Y_1 f, ..., X_n f, Y_n f) at p."""
    out = np.empty(2 * p.n, dtype=complex)
    for j in range(p.n):
        out[2 * j] = apply_vector_field("X", f, p, cfg, j)
        out[2 * j + 1] = apply_vector_field("Y", f, p, cfg, j)
    return np.real_if_close(out, tol=1e6)


def kohn_laplacian(f: ScalarField, p: HeisenbergPoint,
                   cfg: StencilConfig = StencilConfig(),
                   normalized: bool = False) -> float:
    """-sum(X_j^2 + Y_j^2) f at p; with ``normalized`` the -(1/4)-scaled form."""
    val = kohn_laplacian_nodes(f, p.zeta[np.newaxis, :], np.asarray([p.t]),
                               h=cfg.step_at(p), order=cfg.order,
                               normalized=normalized)
    return float(np.real(val[0]))


def kohn_laplacian_nodes(f: ScalarField, zeta, t, h, order=2, normalized=False):
    """Vectorized finite-difference Kohn-Laplacian at arrays of points."""
    zeta = np.asarray(zeta, dtype=complex)
    t = np.asarray(t, dtype=float)
    n = zeta.shape[-1]
    acc = 0.0
    for j in range(n):
        for name in ("X", "Y"):
            def first(z2, t2, _name=name, _j=j):
                return _field_apply(f.on_nodes, _name, _j, z2, t2, h, order)

            acc = acc + _field_apply(first, name, j, zeta, t, h, order)
    lap = -acc
    if normalized:
        lap = -0.25 * lap
    return lap


def normal_derivative_nodes(f: ScalarField, zeta, t, h, order=2):
    """i (E - Ebar)/|zeta| applied to f at arrays of points (any t).

    E = sum_j zeta_j Z_j.  Valid only where |zeta| > 0.
    """
    zeta = np.asarray(zeta, dtype=complex)
    t = np.asarray(t, dtype=float)
    n = zeta.shape[-1]
    acc = 0.0
    for j in range(n):
        zf = _field_apply(f.on_nodes, "Z", j, zeta, t, h, order)
        zbf = _field_apply(f.on_nodes, "Zbar", j, zeta, t, h, order)
        acc = acc + zeta[..., j] * zf - np.conj(zeta[..., j]) * zbf
    az = np.sqrt(np.sum(np.abs(zeta) ** 2, axis=-1))
    return 1j * acc / az


def normal_derivative_boundary(f: ScalarField, zeta,
                               cfg: StencilConfig = StencilConfig()) -> float:
    """Boundary-normal derivative of f at (zeta, 0) on the plane t = 0.

    At the characteristic point (|zeta| <= h) the limit is approximated by
    evaluating on the ring |zeta| = 2h; a warning flags that branch.
    """
    z = _as_zeta(zeta)
    h = cfg.step_at(HeisenbergPoint(z, 0.0))
    az = float(np.sqrt(np.sum(np.abs(z) ** 2)))
    if az <= h:
        warnings.warn("characteristic point: normal derivative approximated "
                      "on the ring |zeta| = 2h", RuntimeWarning, stacklevel=2)
        if az > 0:
            direction = z / az
        else:
            direction = np.zeros(z.size, dtype=complex)
            direction[0] = 1.0
        z = 2.0 * h * direction
    val = normal_derivative_nodes(f, z[np.newaxis, :], np.asarray([0.0]), h, cfg.order)
    return float(np.real(val[0]))


def circular_average(f: ScalarField, n_theta: int = 64) -> ScalarField:
    """Average over the common phase rotation zeta -> e^{i theta} zeta.

    Trapezoid rule in theta, spectrally accurate for smooth fields.
    """
    if n_theta < 4:
        raise ValueError("n_theta must be at least 4")
    thetas = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)

    def avg(zeta, t):
        acc = 0.0
        for w in thetas:
            acc = acc + f.func(w * zeta, t)
        return acc / n_theta

    return ScalarField(avg, decay_exponent=f.decay_exponent, circular=True)
