"""Named field families: values, symmetry flags, registry behavior."""

import numpy as np
import pytest

from heisenberg_neumann.fields import FIELD_NAMES, make_field
from heisenberg_neumann.group import HeisenbergPoint, circular_average


def test_registry_is_complete_and_sorted():
    assert FIELD_NAMES == sorted(FIELD_NAMES)
    for name in FIELD_NAMES:
        fld = make_field(name)
        p = HeisenbergPoint(np.array([0.4 + 0.3j]), 0.2)
        assert np.isfinite(float(np.real(fld(p))))


def test_unknown_name_raises():
    with pytest.raises(ValueError, match="unknown field"):
        make_field("not_a_field")


def test_gaussian_values_and_scale():
    fld = make_field("gaussian", scale=2.0)
    z = np.array([[1.0 + 1.0j]])
    assert np.isclose(fld.on_nodes(z, np.zeros(1))[0], np.exp(-0.5))
    assert fld.circular


def test_gauge_gaussian_dilation_profile():
    fld = make_field("gauge_gaussian", scale=1.5)
    z = np.array([[0.7 - 0.2j]])
    r2 = float(np.abs(z[0, 0]) ** 2)
    expected = np.exp(-(r2 * r2 + 0.3 ** 2) / 1.5 ** 4)
    assert np.isclose(fld.on_nodes(z, np.array([0.3]))[0], expected)


def test_angular_mode_has_zero_circular_average(rng):
    fld = make_field("angular_mode", k=3)
    assert not fld.circular
    avg = circular_average(fld)
    p = HeisenbergPoint(rng.normal(size=1) + 1j * rng.normal(size=1), 0.0)
    assert abs(float(np.real(avg(p)))) < 1e-13


def test_radial_bump_support():
    fld = make_field("radial_bump", r0=1.0, width=0.25)
    rr = np.array([0.5, 0.8, 1.0, 1.2, 1.5])
    vals = fld.on_nodes(rr[:, None].astype(complex), np.zeros(5))
    assert vals[2] == pytest.approx(1.0)
    assert vals[0] == 0.0 and vals[4] == 0.0
    assert 0 < vals[1] < 1 and 0 < vals[3] < 1


def test_power_decay_exponent_recorded():
    fld = make_field("power_decay", k=3.0)
    assert fld.decay_exponent == 3.0
    z = np.array([[2.0 + 0j]])
    assert np.isclose(fld.on_nodes(z, np.zeros(1))[0], 5.0 ** -1.5)


def test_zero_and_one():
    z = np.zeros((4, 1), dtype=complex) + 1.0
    t = np.zeros(4)
    assert np.all(make_field("zero").on_nodes(z, t) == 0.0)
    assert np.all(make_field("one").on_nodes(z, t) == 1.0)
