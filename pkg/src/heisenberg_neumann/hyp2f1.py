"""Gauss hypergeometric function 2F1 on z in [0, 1).

Direct power series for z <= 1/2; connection formulas in w = 1 - z for
z > 1/2, including the logarithmic case c - a - b = 0 and negative-integer
cases mapped through the Euler transformation
F(a,b;c;z) = (1-z)^(c-a-b) F(c-a, c-b; c; z).

The two parameter families used by the half-space kernels are
(n/2, n/2; n) with c - a - b = 0 and (n/2+1, n/2; n) with c - a - b = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gamma

__all__ = ["Hyp2F1Request", "hyp2f1", "hyp2f1_many", "hyp2f1_family"]

DEFAULT_REL_TOL = 1e-12
MAX_TERMS = 100_000
Z_MAX = 1.0 - 1e-13


@dataclass(frozen=True)
class Hyp2F1Request:
    a: float
    b: float
    c: float
    z: float
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if not 0.0 <= self.z < 1.0:
            raise ValueError(f"z = {self.z} outside [0, 1)")
        if self.c <= 0 and self.c == int(self.c):
            raise ValueError("c must not be a nonpositive integer")
        if self.rel_tol < np.finfo(float).eps:
            raise ValueError("rel_tol below machine epsilon")


class Hyp2F1Error(RuntimeError):
    """Series failed to converge within the iteration cap."""


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < 1e-12


def _series(a, b, c, z, rel_tol):
    """Power series sum_k (a)_k (b)_k / ((c)_k k!) z^k, vectorized in z."""
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(MAX_TERMS):
        term = term * ((a + k) * (b + k)) / ((c + k) * (k + 1.0)) * z
        total = total + term
        if np.all(np.abs(term) <= rel_tol * np.abs(total)):
            return total
        if _is_nonpositive_int(a) and k >= -round(a):
            return total
        if _is_nonpositive_int(b) and k >= -round(b):
            return total
    raise Hyp2F1Error(f"series not converged for z max {z.max()}")


def _log_case(a, b, w, rel_tol):
    """A&S 15.3.10: F(a, b; a+b; 1-w) for 0 < w <= 1/2."""
    w = np.asarray(w, dtype=float)
    lw = np.log(w)
    pref = gamma(a + b) / (gamma(a) * gamma(b))
    term = np.ones_like(w)
    k = 0
    bracket = 2.0 * digamma(1.0) - digamma(a) - digamma(b)
    total = bracket - lw
    while True:
        coef = ((a + k) * (b + k)) / ((k + 1.0) ** 2)
        term = term * coef * w
        k += 1
        bracket = bracket + 2.0 / k - 1.0 / (a + k - 1.0) - 1.0 / (b + k - 1.0)
        add = term * (bracket - lw)
        total = total + add
        if np.all(np.abs(add) <= rel_tol * np.abs(total)):
            break
        if k > MAX_TERMS:
            raise Hyp2F1Error("logarithmic branch not converged")
    return pref * total


def _pole_case(a, b, m, w, rel_tol):
    """A&S 15.3.11: F(a, b; a+b+m; 1-w), m a positive integer, 0 < w <= 1/2."""
    w = np.asarray(w, dtype=float)
    c = a + b + m
    lw = np.log(w)
    # finite sum
    finite = np.zeros_like(w)
    term = np.ones_like(w)
    for k in range(m):
        if k > 0:
            term = term * ((a + k - 1.0) * (b + k - 1.0)) / (k * (1.0 - m + k - 1.0)) * w
        finite = finite + term
    finite = finite * gamma(m) * gamma(c) / (gamma(a + m) * gamma(b + m))
    # infinite sum with digamma bracket
    pref = ((-1.0) ** m) * gamma(c) / (gamma(a) * gamma(b)) * w ** m
    term = np.ones_like(w) / gamma(m + 1.0)
    k = 0
    bracket = (lw - digamma(1.0) - digamma(m + 1.0)
               + digamma(a + m) + digamma(b + m))
    total = term * bracket
    while True:
        term = term * ((a + m + k) * (b + m + k)) / ((k + 1.0) * (k + 1.0 + m)) * w
        k += 1
        bracket = (bracket - 1.0 / k - 1.0 / (m + k)
                   + 1.0 / (a + m + k - 1.0) + 1.0 / (b + m + k - 1.0))
        add = term * bracket
        total = total + add
        if np.all(np.abs(add) <= rel_tol * (np.abs(total) + np.abs(finite))):
            break
        if k > MAX_TERMS:
            raise Hyp2F1Error("pole branch not converged")
    return finite - pref * total


def _generic_connection(a, b, c, w, rel_tol):
    """A&S 15.3.6 for non-integer c - a - b."""
    s = c - a - b
    f1 = (gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b))
          * _series(a, b, a + b - c + 1.0, w, rel_tol))
    f2 = (gamma(c) * gamma(-s) / (gamma(a) * gamma(b))
          * np.asarray(w, dtype=float) ** s
          * _series(c - a, c - b, s + 1.0, w, rel_tol))
    return f1 + f2


def hyp2f1_many(a: float, b: float, c: float, z, rel_tol: float = DEFAULT_REL_TOL):
    """2F1(a, b; c; z) for an array of z in [0, 1), shared parameters."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z >= 1.0):
        raise ValueError("z outside [0, 1)")
    if np.any(z > Z_MAX):
        raise ValueError(f"z too close to 1 (max admissible {Z_MAX})")
    out = np.empty_like(z)
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _series(a, b, c, z, rel_tol)  # terminating, any z
    near = z > 0.5
    if np.any(~near):
        out[~near] = _series(a, b, c, z[~near], rel_tol)
    if np.any(near):
        w = 1.0 - z[near]
        s = c - a - b
        m = round(s)
        if abs(s - m) < 1e-12:
            if m == 0:
                out[near] = _log_case(a, b, w, rel_tol)
            elif m > 0:
                out[near] = _pole_case(a, b, m, w, rel_tol)
            else:
                # Euler transformation to a positive-integer gap
                inner = hyp2f1_many(c - a, c - b, c, z[near], rel_tol)
                out[near] = w ** s * inner
        else:
            out[near] = _generic_connection(a, b, c, w, rel_tol)
    return out


def hyp2f1(req: Hyp2F1Request) -> float:
    """2F1 for a single request; see :func:`hyp2f1_many`."""
    return float(hyp2f1_many(req.a, req.b, req.c, np.asarray([req.z]),
                             req.rel_tol)[0])


def hyp2f1_family(n: int, variant: str, z, rel_tol: float = DEFAULT_REL_TOL):
    """The two kernel families: ``average`` = (n/2, n/2; n),
    ``normal_derivative`` = (n/2 + 1, n/2; n)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if variant == "average":
        a, b = n / 2.0, n / 2.0
    elif variant == "normal_derivative":
        a, b = n / 2.0 + 1.0, n / 2.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    scalar = np.isscalar(z)
    vals = hyp2f1_many(a, b, float(n), np.atleast_1d(np.asarray(z, dtype=float)),
                       rel_tol)
    return float(vals[0]) if scalar else vals
