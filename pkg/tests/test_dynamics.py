import math

import numpy as np
import pytest

from fwmav import quatmath as qm
from fwmav.dynamics import (
    IntegrationError,
    RigidBodyState,
    RobotParams,
    Wrench,
    flap_ripple,
    kinetic_energy_rot,
    rk4_flat,
    state_derivative,
    step_rk4,
)

DT = 1e-4
MASS = 75e-6


def params(inertia=(1.42e-9, 1.34e-9, 0.45e-9), **kw):
    return RobotParams(mass=MASS, inertia=inertia, **kw)


def integrate(s, w, p, n, dt=DT, callback=None):
    x = s.to_flat()
    plant = p._plant()
    tau = tuple(w.torque.tolist())
    for k in range(n):
        x = rk4_flat(x, k * dt, dt, w.thrust, tau, plant)
        if callback is not None:
            callback(x)
    return RigidBodyState.from_flat(x)


def test_hover_derivative_is_zero():
    p = params()
    d = state_derivative(RigidBodyState.at_rest(), Wrench(p.weight), p)
    for part in (d.r_dot, d.v_dot, d.q_dot, d.omega_dot):
        np.testing.assert_array_equal(part, 0.0)


def test_free_fall_derivative():
    p = params()
    d = state_derivative(RigidBodyState.at_rest(), Wrench(0.0), p)
    np.testing.assert_array_equal(d.v_dot, [0.0, 0.0, -p.gravity])


def test_tilted_thrust_direction():
    p = params()
    q = qm.from_axis_angle([1, 0, 0], math.pi / 2)
    d = state_derivative(RigidBodyState.at_rest(q=q), Wrench(p.weight), p)
    expected = qm.rotation_matrix(q) @ [0, 0, p.weight] / p.mass - [0, 0, p.gravity]
    np.testing.assert_allclose(d.v_dot, expected, atol=1e-12)
    # b3 maps to -y under a +90 deg roll.
    np.testing.assert_allclose(d.v_dot, [0.0, -p.gravity, -p.gravity], atol=1e-12)


def test_hover_is_fixed_point():
    p = params()
    s0 = RigidBodyState.at_rest(r=(0.1, -0.2, 0.3))
    s = integrate(s0, Wrench(p.weight), p, 1000)
    np.testing.assert_allclose(s.to_flat(), s0.to_flat(), atol=1e-12 * 1000)


def test_free_fall_one_second():
    p = params()
    s = integrate(RigidBodyState.at_rest(), Wrench(0.0), p, 10_000)
    assert abs(s.r[2] - (-0.5 * p.gravity)) < 1e-6
    assert abs(s.v[2] - (-p.gravity)) < 1e-9


def test_isotropic_spin_is_constant():
    p = params(inertia=(1e-9, 1e-9, 1e-9))
    w0 = np.array([1.0, -2.0, 0.5])
    s = integrate(RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, w0), Wrench(p.weight), p, 10_000)
    np.testing.assert_allclose(s.omega, w0, atol=1e-9)


def test_torque_free_anisotropic_conservation():
    # Energy and inertial angular momentum checked at every step over 5 s.
    J = np.diag([1.0, 2.0, 3.0]) * 1e-9
    p = params(inertia=np.diag(J))
    w0 = np.array([1.0, 1.0, 1.0])
    s0 = RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, w0)
    e0 = kinetic_energy_rot(w0, J)
    h0 = qm.rotation_matrix(s0.q) @ J @ w0
    worst = {"e": 0.0, "h": 0.0, "hvec": 0.0, "norm": 0.0}

    def check(x):
        w = np.array(x[10:13])
        q = np.array(x[6:10])
        h = qm.rotation_matrix(q) @ (J @ w)
        worst["e"] = max(worst["e"], abs(kinetic_energy_rot(w, J) - e0) / e0)
        worst["h"] = max(worst["h"], abs(np.linalg.norm(h) - np.linalg.norm(h0)) / np.linalg.norm(h0))
        worst["hvec"] = max(worst["hvec"], np.linalg.norm(h - h0) / np.linalg.norm(h0))
        worst["norm"] = max(worst["norm"], abs(np.linalg.norm(q) - 1.0))

    integrate(s0, Wrench(0.0), p, 50_000, callback=check)
    assert worst["e"] < 1e-6
    assert worst["h"] < 1e-6
    assert worst["hvec"] < 1e-6
    assert worst["norm"] < 1e-9


def test_quaternion_norm_after_each_step():
    p = params()
    x = RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, (30.0, -20.0, 50.0)).to_flat()
    plant = p._plant()
    for k in range(2000):
        x = rk4_flat(x, k * DT, DT, 0.0, (1e-9, 0.0, -1e-9), plant)
        assert abs(math.sqrt(sum(c * c for c in x[6:10])) - 1.0) <= 1e-9


def _smooth_trajectory(dt, T=0.2):
    # Tumbling body with a constant body torque and tilted thrust.
    p = params()
    s = RigidBodyState(np.zeros(3), (0.1, 0.0, 0.0), qm.from_axis_angle([1, 1, 0], 0.3),
                       (5.0, -3.0, 8.0))
    return integrate(s, Wrench(1.2 * p.weight, (2e-9, -1e-9, 5e-10)), p, int(round(T / dt)), dt=dt)


def test_convergence_order_is_four():
    dt = 1e-3
    ref = _smooth_trajectory(dt / 8).to_flat()
    err = [np.max(np.abs(np.subtract(_smooth_trajectory(h).to_flat(), ref))) for h in (dt, dt / 2)]
    order = math.log2(err[0] / err[1])
    assert 3.5 <= order <= 4.5, order


def test_step_rk4_wrapper_matches_flat():
    p = params()
    s = RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, (1.0, 2.0, 3.0))
    w = Wrench(p.weight, (1e-9, 0, 0))
    a = step_rk4(s, w, p, DT)
    b = integrate(s, w, p, 1)
    np.testing.assert_array_equal(a.to_flat(), b.to_flat())
    with pytest.raises(ValueError):
        step_rk4(s, w, p, 2e-3)


def test_blowup_raises_with_time():
    p = params()
    s = RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, np.zeros(3))
    with pytest.raises(IntegrationError) as info:
        step_rk4(s, Wrench(float("nan")), p, DT, t=0.5)
    assert info.value.t == pytest.approx(0.5 + DT)


def test_params_validation():
    with pytest.raises(ValueError):
        params(inertia=(1e-9, -1e-9, 1e-9))
    with pytest.raises(ValueError):
        RobotParams(mass=0.0, inertia=(1e-9, 1e-9, 1e-9))
    with pytest.raises(ValueError):
        params(flap_freq=0.0)
    np.testing.assert_array_equal(params(inertia=(1, 2, 3)).inertia, np.diag([1.0, 2.0, 3.0]))


def test_ripple_examples():
    assert flap_ripple(0.3, params()).as_array().tolist() == [0.0] * 4
    p = params(ripple_torque_amp=(1e-7, 2e-7, 0.0), ripple_force_amp=1e-4)
    np.testing.assert_allclose(flap_ripple(0.0, p).as_array(), 0.0, atol=1e-20)


def test_ripple_zero_mean_and_frequencies():
    p = params(ripple_torque_amp=(0.0, 1e-7, 0.0), ripple_force_amp=1e-4, flap_freq=120.0)
    period = 1.0 / p.flap_freq
    ts = np.linspace(0.0, period, 2001)
    samples = np.array([flap_ripple(t, p).as_array() for t in ts])
    mean = np.trapezoid(samples, ts, axis=0) / period if hasattr(np, "trapezoid") \
        else np.trapz(samples, ts, axis=0) / period
    np.testing.assert_allclose(mean, 0.0, atol=1e-12)
    # Torque peaks once per stroke, thrust twice.
    assert np.argmax(samples[:, 2]) == pytest.approx(500, abs=1)
    assert np.argmax(samples[:1001, 0]) == pytest.approx(250, abs=1)


def test_full_and_diagonal_inertia_paths_agree(rng):
    from fwmav.dynamics import _stage_diag, _stage_full
    J = np.array([1.42e-9, 1.34e-9, 0.45e-9])
    Jm = np.diag(J)
    for _ in range(100):
        args = (*rng.normal(size=10), 1.2, *rng.normal(scale=1e-9, size=3), 9.81)
        a = _stage_diag(*args, tuple(J))
        b = _stage_full(*args, (tuple(Jm.ravel()), tuple(np.linalg.inv(Jm).ravel())))
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_non_diagonal_inertia_conserves_energy():
    R = qm.rotation_matrix(qm.from_axis_angle([1, 2, 3], 0.7))
    J = R @ np.diag([1.0, 2.0, 3.0]) @ R.T * 1e-9
    J = 0.5 * (J + J.T)
    p = params(inertia=J)
    assert p._plant()[7] is None
    w0 = np.array([2.0, -1.0, 0.5])
    s = integrate(RigidBodyState(np.zeros(3), np.zeros(3), qm.IDENTITY, w0), Wrench(0.0), p, 10_000)
    e0 = kinetic_energy_rot(w0, J)
    assert abs(kinetic_energy_rot(s.omega, J) - e0) / e0 < 1e-6
    h0 = J @ w0
    h1 = qm.rotation_matrix(s.q) @ J @ s.omega
    np.testing.assert_allclose(h1, h0, rtol=1e-6, atol=1e-6 * np.linalg.norm(h0))
