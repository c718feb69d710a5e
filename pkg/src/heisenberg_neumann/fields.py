"""Built-in scalar fields used as boundary data and test functions.

Each family is addressed by name + parameters so configuration files can
select data without code changes.  All evaluators are vectorized over node
arrays (zeta of shape (..., n), t of shape (...)).
"""

from __future__ import annotations

import numpy as np

from .group import ScalarField

__all__ = ["make_field", "FIELD_NAMES"]


def _abs2(zeta):
    return np.sum(np.abs(zeta) ** 2, axis=-1)


def gaussian(scale: float = 1.0) -> ScalarField:
    """exp(-|zeta|^2 / scale^2); t-independent, circular, rapid decay."""
    s2 = scale * scale

    def f(zeta, t):
        return np.exp(-_abs2(zeta) / s2)

    return ScalarField(f, decay_exponent=np.inf, circular=True)


def gauge_gaussian(scale: float = 1.0) -> ScalarField:
    """exp(-(|zeta|^4 + t^2) / scale^4): smooth, circular, decays in the gauge."""
    s4 = scale ** 4

    def f(zeta, t):
        r2 = _abs2(zeta)
        return np.exp(-(r2 * r2 + np.asarray(t) ** 2) / s4)

    return ScalarField(f, decay_exponent=np.inf, circular=True)


def angular_mode(k: int = 1, scale: float = 1.0) -> ScalarField:
    """cos(k arg(zeta_1)) exp(-|zeta|^2 / scale^2): mean-zero angular mode."""
    s2 = scale * scale

    def f(zeta, t):
        th = np.angle(zeta[..., 0])
        return np.cos(k * th) * np.exp(-_abs2(zeta) / s2)

    return ScalarField(f, decay_exponent=np.inf, circular=False)


def radial_bump(r0: float = 1.0, width: float = 0.5) -> ScalarField:
    """Compactly supported circular bump around |zeta| = r0."""

    def f(zeta, t):
        u = (np.sqrt(_abs2(zeta)) - r0) / width
        out = np.zeros_like(u, dtype=float)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui * ui) + 1.0)
        return out

    return ScalarField(f, decay_exponent=np.inf, circular=True)


def power_decay(k: float = 4.0) -> ScalarField:
    """(1 + |zeta|^2)^(-k/2): circular with algebraic decay exponent k."""

    def f(zeta, t):
        return (1.0 + _abs2(zeta)) ** (-k / 2.0)

    return ScalarField(f, decay_exponent=k, circular=True)


_FACTORIES = {
    "gaussian": gaussian,
    "gauge_gaussian": gauge_gaussian,
    "angular_mode": angular_mode,
    "radial_bump": radial_bump,
    "power_decay": power_decay,
    "zero": lambda: ScalarField(lambda zeta, t: np.zeros(np.shape(t)),
                                decay_exponent=np.inf, circular=True),
    "one": lambda: ScalarField(lambda zeta, t: np.ones(np.shape(t)),
                               decay_exponent=0.0, circular=True),
}

FIELD_NAMES = sorted(_FACTORIES)


def make_field(name: str, **params) -> ScalarField:
    """Instantiate a named field family with keyword parameters."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown field {name!r}; choose from {FIELD_NAMES}") from None
    return factory(**params)
