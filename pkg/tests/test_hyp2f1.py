"""Gauss 2F1 evaluator against closed-form and AGM oracles."""

import numpy as np
import pytest

from heisenberg_neumann.hyp2f1 import (Hyp2F1Request, hyp2f1, hyp2f1_family,
                                       hyp2f1_many)


def agm_K_E(m):
    """Complete elliptic integrals by the arithmetic-geometric mean."""
    a, b = np.ones_like(m), np.sqrt(1.0 - m)
    c2sum = 0.5 * m  # 2^{-1} c_0^2 with c_0^2 = a_0^2 - b_0^2 = m
    pw = 0.5
    for _ in range(60):
        c = (a - b) / 2.0
        pw *= 2.0
        c2sum = c2sum + pw * c * c
        a, b = (a + b) / 2.0, np.sqrt(a * b)
    K = np.pi / (2.0 * a)
    E = K * (1.0 - c2sum)
    return K, E


def test_log_oracle_both_branches():
    z = np.array([0.05, 0.2, 0.45, 0.5, 0.55, 0.8, 0.95, 0.999])
    vals = hyp2f1_many(1.0, 1.0, 2.0, z)
    assert np.max(np.abs(vals * z / (-np.log1p(-z)) - 1.0)) < 1e-11


def test_elliptic_K_oracle():
    z = np.arange(0.1, 0.95, 0.1)
    K, _ = agm_K_E(z)
    vals = hyp2f1_many(0.5, 0.5, 1.0, z)
    assert np.max(np.abs(vals / (2.0 * K / np.pi) - 1.0)) < 1e-11


def test_elliptic_E_oracle_for_negative_gap():
    # c - a - b = -1 family: F(3/2, 1/2; 1; z) = (2/pi) E(z) / (1 - z)
    z = np.arange(0.1, 0.95, 0.1)
    _, E = agm_K_E(z)
    vals = hyp2f1_many(1.5, 0.5, 1.0, z)
    assert np.max(np.abs(vals * (1.0 - z) / (2.0 * E / np.pi) - 1.0)) < 1e-11


def test_terminating_polynomial():
    z = np.array([0.3, 0.7, 0.95])
    vals = hyp2f1_many(-2.0, 1.0, 3.0, z)
    exact = 1.0 - 2.0 * z / 3.0 + z * z / 6.0
    assert np.allclose(vals, exact, rtol=1e-14)


def test_euler_transformation_identity():
    a, b, c = 0.7, 1.3, 2.4
    z = np.array([0.15, 0.6, 0.85])
    lhs = hyp2f1_many(a, b, c, z)
    rhs = (1.0 - z) ** (c - a - b) * hyp2f1_many(c - a, c - b, c, z)
    assert np.allclose(lhs, rhs, rtol=1e-11)


def test_continuity_across_branch_switch():
    eps = 1e-9
    for (a, b, c) in [(0.5, 0.5, 1.0), (1.5, 0.5, 1.0), (1.0, 1.0, 3.0)]:
        lo = hyp2f1_many(a, b, c, np.array([0.5 - eps]))[0]
        hi = hyp2f1_many(a, b, c, np.array([0.5 + eps]))[0]
        assert abs(hi - lo) < 1e-7 * abs(lo)


def test_derivative_contiguous_relation():
    a, b, c, z = 0.8, 1.1, 2.0, 0.37
    h = 1e-6
    fd = (hyp2f1_many(a, b, c, np.array([z + h]))[0]
          - hyp2f1_many(a, b, c, np.array([z - h]))[0]) / (2 * h)
    rel = a * b / c * hyp2f1_many(a + 1, b + 1, c + 1, np.array([z]))[0]
    assert abs(fd - rel) < 1e-7 * abs(rel)


def test_monotone_in_z_for_positive_parameters():
    z = np.linspace(0.0, 0.9, 40)
    vals = hyp2f1_many(0.5, 0.5, 1.0, z)
    assert np.all(np.diff(vals) > 0)


def test_against_mpmath_spot_checks():
    mp = pytest.importorskip("mpmath")
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = rng.uniform(0.3, 3.0, 2)
        c = rng.uniform(0.5, 4.0)
        z = rng.uniform(0.0, 0.999)
        mine = hyp2f1(Hyp2F1Request(a, b, c, z))
        ref = float(mp.hyp2f1(a, b, c, z))
        assert abs(mine - ref) < 1e-10 * max(1.0, abs(ref))


def test_family_dispatch():
    z = 0.3
    assert np.isclose(hyp2f1_family(2, "average", z),
                      hyp2f1(Hyp2F1Request(1.0, 1.0, 2.0, z)))
    assert np.isclose(hyp2f1_family(2, "normal_derivative", z),
                      hyp2f1(Hyp2F1Request(2.0, 1.0, 2.0, z)))
    with pytest.raises(ValueError):
        hyp2f1_family(1, "nope", z)


def test_request_validation_and_refusals():
    with pytest.raises(ValueError):
        Hyp2F1Request(1.0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        Hyp2F1Request(1.0, 1.0, 2.0, -0.1)
    with pytest.raises(ValueError):
        Hyp2F1Request(1.0, 1.0, -3.0, 0.5)
    with pytest.raises(ValueError):
        Hyp2F1Request(1.0, 1.0, 2.0, 0.5, rel_tol=1e-30)
    with pytest.raises(ValueError):
        hyp2f1_many(0.5, 0.5, 1.0, np.array([1.0 - 1e-15]))
