import math

import numpy as np
import pytest
from hypothesis import given

from fwmav import quatmath as qm

from conftest import random_unit_quats, unit_quaternions, vectors

S45 = math.sqrt(0.5)


def left_matrix(a):
    # Independent oracle: a * b == L(a) @ b for the Hamilton product.
    w, x, y, z = a
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def test_identity_left_multiplication():
    q = qm.normalize(np.array([0.3, -0.1, 0.8, 0.2]))
    np.testing.assert_array_equal(qm.quat_mul(qm.IDENTITY, q), q)
    np.testing.assert_array_equal(qm.quat_mul(q, qm.IDENTITY), q)


def test_i_times_j_is_k():
    i, j = qm.quat(0, 1, 0, 0), qm.quat(0, 0, 1, 0)
    np.testing.assert_array_equal(qm.quat_mul(i, j), [0, 0, 0, 1])
    np.testing.assert_array_equal(qm.quat_mul(j, i), [0, 0, 0, -1])


def test_product_matches_matrix_form(rng):
    for a, b in zip(random_unit_quats(rng, 200), random_unit_quats(rng, 200)):
        p = qm.quat_mul(a, b)
        np.testing.assert_allclose(p, left_matrix(a) @ b, atol=1e-15)
        assert abs(np.linalg.norm(p) - 1.0) < 1e-12


def test_associativity(rng):
    qs = random_unit_quats(rng, 300).reshape(100, 3, 4)
    for a, b, c in qs:
        lhs = qm.quat_mul(qm.quat_mul(a, b), c)
        rhs = qm.quat_mul(a, qm.quat_mul(b, c))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_conjugate_examples(rng):
    np.testing.assert_array_equal(qm.quat_conjugate(qm.IDENTITY), qm.IDENTITY)
    np.testing.assert_array_equal(qm.quat_conjugate(qm.quat(0, 1, 0, 0)), [0, -1, 0, 0])
    for q in random_unit_quats(rng, 100):
        np.testing.assert_allclose(qm.quat_mul(q, qm.quat_conjugate(q)), qm.IDENTITY, atol=1e-12)


def test_inverse_of_non_unit_quaternion():
    q = qm.quat(2.0, 0.0, 1.0, 0.0)
    np.testing.assert_allclose(qm.quat_mul(q, qm.quat_inverse(q)), qm.IDENTITY, atol=1e-15)
    with pytest.raises(qm.QuaternionError):
        qm.quat_inverse(np.zeros(4))


def test_rotate_examples():
    np.testing.assert_allclose(qm.rotate_vector(qm.IDENTITY, [1, 2, 3]), [1, 2, 3])
    qz = qm.from_axis_angle([0, 0, 1], math.pi / 2)
    np.testing.assert_allclose(qm.rotate_vector(qz, [1, 0, 0]), [0, 1, 0], atol=1e-15)


def test_rotate_matches_sandwich_product(rng):
    for q in random_unit_quats(rng, 100):
        u = rng.normal(size=3)
        sandwich = qm.quat_mul(qm.quat_mul(q, qm.pure(u)), qm.quat_conjugate(q))
        np.testing.assert_allclose(qm.rotate_vector(q, u), sandwich[1:], atol=1e-12)
        np.testing.assert_allclose(qm.rotation_matrix(q) @ u, sandwich[1:], atol=1e-12)


@given(unit_quaternions(), vectors)
def test_rotation_preserves_norm(q, u):
    assert abs(np.linalg.norm(qm.rotate_vector(q, u)) - np.linalg.norm(u)) <= 1e-12 * max(1.0, np.linalg.norm(u))


@given(unit_quaternions(), vectors)
def test_double_cover_rotates_identically(q, u):
    np.testing.assert_allclose(qm.rotate_vector(q, u), qm.rotate_vector(-q, u), atol=1e-12)


def test_body_z_is_third_matrix_column(rng):
    for q in random_unit_quats(rng, 50):
        np.testing.assert_allclose(qm.body_z(q), qm.rotation_matrix(q)[:, 2], atol=1e-15)


def test_matrix_to_quaternion_examples():
    np.testing.assert_array_equal(qm.quat_from_rotation_matrix(np.eye(3)), qm.IDENTITY)
    rx180 = np.diag([1.0, -1.0, -1.0])
    np.testing.assert_allclose(qm.quat_from_rotation_matrix(rx180), [0, 1, 0, 0], atol=1e-15)


@pytest.mark.parametrize("axis", [[0, 1, 0], [0, 0, 1], [1, 1, 0]])
def test_matrix_to_quaternion_half_turns(axis):
    q = qm.from_axis_angle(axis, math.pi)
    back = qm.quat_from_rotation_matrix(qm.rotation_matrix(q))
    assert min(np.abs(back - q).max(), np.abs(back + q).max()) < 1e-12


def test_matrix_round_trip_10k(rng):
    qs = random_unit_quats(rng, 10_000)
    worst = 0.0
    for q in qs:
        back = qm.quat_from_rotation_matrix(qm.rotation_matrix(q))
        assert back[0] >= 0.0
        worst = max(worst, min(np.abs(back - q).max(), np.abs(back + q).max()))
    assert worst < 1e-12


def test_matrix_to_quaternion_rejects_non_rotations():
    with pytest.raises(qm.QuaternionError):
        qm.quat_from_rotation_matrix(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(qm.QuaternionError):
        qm.quat_from_rotation_matrix(2.0 * np.eye(3))
    with pytest.raises(qm.QuaternionError):
        qm.quat_from_rotation_matrix(np.full((3, 3), np.nan))


def test_normalize_and_zero_norm():
    np.testing.assert_allclose(qm.normalize([2.0, 0, 0, 0]), qm.IDENTITY)
    with pytest.raises(qm.QuaternionError):
        qm.normalize(np.zeros(4))
    with pytest.raises(qm.QuaternionError):
        qm.normalize([1e-14, 0, 0, 0])
    assert qm.is_unit(qm.IDENTITY)
    assert not qm.is_unit([1.0 + 1e-6, 0, 0, 0])


def test_axis_angle_round_trip(rng):
    for q in random_unit_quats(rng, 100):
        angle, axis = qm.axis_angle(q)
        assert 0.0 <= angle <= math.pi
        back = qm.from_axis_angle(axis, angle)
        assert min(np.abs(back - q).max(), np.abs(back + q).max()) < 1e-12
    assert qm.axis_angle(qm.IDENTITY)[0] == 0.0


def test_euler_round_trip(rng):
    for roll, pitch, yaw in rng.uniform([-3, -1.5, -3], [3, 1.5, 3], size=(100, 3)):
        q = qm.from_euler_zyx(roll, pitch, yaw)
        np.testing.assert_allclose(qm.euler_zyx(q), (roll, pitch, yaw), atol=1e-10)


def test_euler_matches_matrix_factorization():
    roll, pitch, yaw = 0.2, -0.4, 1.1
    c, s = math.cos, math.sin
    Rz = np.array([[c(yaw), -s(yaw), 0], [s(yaw), c(yaw), 0], [0, 0, 1]])
    Ry = np.array([[c(pitch), 0, s(pitch)], [0, 1, 0], [-s(pitch), 0, c(pitch)]])
    Rx = np.array([[1, 0, 0], [0, c(roll), -s(roll)], [0, s(roll), c(roll)]])
    q = qm.quat_from_rotation_matrix(Rz @ Ry @ Rx)
    np.testing.assert_allclose(qm.euler_zyx(q), (roll, pitch, yaw), atol=1e-12)
