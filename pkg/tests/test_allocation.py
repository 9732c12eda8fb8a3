import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fwmav.allocation import (
    BeePlusCommand,
    BeePlusMixParams,
    RoboBeeCommand,
    RoboBeeMixParams,
    allocate,
    beeplus_default_mix,
    beeplus_forward,
    beeplus_inverse,
    beeplus_inverse_matrix,
    beeplus_matrix,
    robobee_forward,
    robobee_inverse,
    saturate,
)
from fwmav.dynamics import Wrench

UNIT = BeePlusMixParams(1.0, 1.0, 1.0, 1.0, 1.0)


def random_beeplus(rng):
    return BeePlusMixParams(*rng.uniform(0.1, 10.0, 5))


def random_robobee(rng):
    return RoboBeeMixParams(*rng.uniform(0.1, 10.0, 4))


def test_robobee_examples():
    unit = RoboBeeMixParams(1.0, 1.0, 1.0, 1.0)
    assert robobee_forward(RoboBeeCommand(0, 0, 0, 0), unit).as_array().tolist() == [0.0] * 4
    assert robobee_forward(RoboBeeCommand(1, 2, 3, 4), unit).as_array().tolist() == [1, 2, 3, 4]


def test_beeplus_examples():
    w = beeplus_forward(BeePlusCommand(1, 1, 1, 1), UNIT)
    assert w.thrust == 4.0
    np.testing.assert_array_equal(w.torque, 0.0)
    w = beeplus_forward(BeePlusCommand(0, 0, 1, 1), UNIT)
    assert w.thrust == 2.0
    np.testing.assert_array_equal(w.torque, [2.0, 0.0, 0.0])
    assert beeplus_inverse(Wrench(4.0), UNIT).as_array().tolist() == [1.0, 1.0, 1.0, 1.0]


def test_forward_matches_matrix(rng):
    for _ in range(50):
        p = random_beeplus(rng)
        v = rng.uniform(0, 1, 4)
        np.testing.assert_allclose(beeplus_forward(BeePlusCommand(*v), p).as_array(),
                                   beeplus_matrix(p) @ v, rtol=1e-14, atol=1e-15)


def test_closed_form_inverse_times_matrix_is_identity(rng):
    for _ in range(100):
        p = random_beeplus(rng)
        np.testing.assert_allclose(beeplus_inverse_matrix(p) @ beeplus_matrix(p), np.eye(4), atol=1e-12)
        np.testing.assert_allclose(beeplus_inverse_matrix(p), np.linalg.inv(beeplus_matrix(p)),
                                   rtol=1e-10, atol=1e-12)


def test_round_trips(rng):
    for _ in range(1000):
        pb, pr = random_beeplus(rng), random_robobee(rng)
        w = Wrench.from_array(rng.normal(size=4))
        c = rng.normal(size=4)
        np.testing.assert_allclose(beeplus_forward(beeplus_inverse(w, pb), pb).as_array(), w.as_array(), atol=1e-12)
        np.testing.assert_allclose(robobee_forward(robobee_inverse(w, pr), pr).as_array(), w.as_array(), atol=1e-12)
        np.testing.assert_allclose(beeplus_inverse(beeplus_forward(BeePlusCommand(*c), pb), pb).as_array(), c, atol=1e-12)
        np.testing.assert_allclose(robobee_inverse(robobee_forward(RoboBeeCommand(*c), pr), pr).as_array(), c, atol=1e-12)


coef = st.floats(-5.0, 5.0, allow_nan=False)
cmd = st.tuples(coef, coef, coef, coef)


@given(coef, coef, cmd, cmd)
def test_beeplus_forward_is_linear(a, b, c1, c2):
    p = BeePlusMixParams(2.0, 0.5, 0.3, 0.7, 1.1)
    mixed = BeePlusCommand(*(a * np.array(c1) + b * np.array(c2)))
    lhs = beeplus_forward(mixed, p).as_array()
    rhs = a * beeplus_forward(BeePlusCommand(*c1), p).as_array() + b * beeplus_forward(BeePlusCommand(*c2), p).as_array()
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("field", ["k_f", "k_s", "d1", "d2", "d3", "v_max"])
def test_beeplus_rejects_zero_coefficients(field):
    kw = dict(k_f=1.0, k_s=1.0, d1=1.0, d2=1.0, d3=1.0, v_max=1.0)
    kw[field] = 0.0
    with pytest.raises(ValueError):
        BeePlusMixParams(**kw)


def test_robobee_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        RoboBeeMixParams(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        RoboBeeMixParams(1.0, 1.0, 1.0, 1.0, limits=(1.0, 1.0, 0.0, 1.0))


def test_saturate_in_range_untouched():
    c = BeePlusCommand(0.1, 0.5, 0.9, 0.0)
    out, flags = saturate(c, 1.0)
    assert out == c
    assert flags == (False,) * 4


def test_saturate_clamp_example():
    out, flags = saturate(BeePlusCommand(-0.2, 0.5, 1.8, 1.0), 1.5)
    assert out.as_array().tolist() == [0.0, 0.5, 1.5, 1.0]
    assert [i for i, f in enumerate(flags) if f] == [0, 2]


def test_robobee_saturation_is_symmetric():
    p = RoboBeeMixParams(1.0, 1.0, 1.0, 1.0, limits=(1.0, 0.5, 0.5, 0.1))
    out, flags = saturate(RoboBeeCommand(1.2, -0.7, 0.2, 0.05), p)
    assert out.as_array().tolist() == [1.0, -0.5, 0.2, 0.05]
    assert flags == (True, True, False, False)


def test_saturated_hover_thrust():
    p = BeePlusMixParams(2e-4, 4e-5, 4e-3, 4e-3, 4e-3, v_max=1.0)
    cmd, flags, applied = allocate(Wrench(10 * 4 * p.k_f * p.v_max), p)
    assert all(flags)
    assert applied.thrust == pytest.approx(4 * p.k_f * p.v_max, rel=1e-15)
    np.testing.assert_allclose(applied.torque, 0.0, atol=1e-20)


def test_allocate_reports_applied_wrench(rng):
    p = beeplus_default_mix(95e-6 * 9.81)
    for _ in range(100):
        w = Wrench(rng.uniform(0, 2e-3), rng.normal(scale=2e-7, size=3))
        cmd, flags, applied = allocate(w, p)
        v = cmd.as_array()
        assert np.all((v >= 0) & (v <= p.v_max))
        np.testing.assert_allclose(applied.as_array(), beeplus_matrix(p) @ v, rtol=1e-12, atol=1e-20)
        if not any(flags):
            np.testing.assert_allclose(applied.as_array(), w.as_array(), rtol=1e-10, atol=1e-20)


def test_default_calibration_hovers_mid_range():
    weight = 95e-6 * 9.81
    p = beeplus_default_mix(weight, v_max=1.0)
    np.testing.assert_allclose(beeplus_inverse(Wrench(weight), p).as_array(), 0.5)
