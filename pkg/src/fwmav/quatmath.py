"""Quaternion and 3-vector helpers.

Conventions used throughout the package:

* quaternions are numpy arrays ``[w, x, y, z]`` (scalar first),
* Hamilton product, so ``i * j = k``,
* a unit quaternion ``q`` maps body-frame vectors into the inertial frame:
  ``u_inertial = q * [0, u_body] * q^-1``.

Vectors are plain ``(3,)`` float arrays and matrices ``(3, 3)`` arrays.
"""
from __future__ import annotations

import math

import numpy as np

Array = np.ndarray

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

UNIT_NORM_TOL = 1e-9
_ZERO_NORM = 1e-12


class QuaternionError(ValueError):
    """Raised for degenerate quaternion or rotation-matrix input."""


def vec3(x, y=None, z=None) -> Array:
    if y is None:
        out = np.asarray(x, dtype=np.float64).reshape(3).copy()
    else:
        out = np.array([x, y, z], dtype=np.float64)
    return out


def quat(w, x=None, y=None, z=None) -> Array:
    if x is None:
        return np.asarray(w, dtype=np.float64).reshape(4).copy()
    return np.array([w, x, y, z], dtype=np.float64)


def pure(v) -> Array:
    """Quaternion ``[0, v]`` with vector part ``v``."""
    return np.array([0.0, v[0], v[1], v[2]], dtype=np.float64)


def cross(a, b) -> Array:
    """3-vector cross product (np.cross has large per-call overhead on (3,) arrays)."""
    a0, a1, a2 = a
    b0, b1, b2 = b
    return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])


def quat_mul(a: Array, b: Array) -> Array:
    """Hamilton product ``a * b`` (scalar-first)."""
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conjugate(q: Array) -> Array:
    return np.array([q[0], -q[1], -q[2], -q[3]], dtype=np.float64)


def quat_inverse(q: Array) -> Array:
    n2 = float(np.dot(q, q))
    if n2 <= _ZERO_NORM ** 2:
        raise QuaternionError("cannot invert a zero quaternion")
    return quat_conjugate(q) / n2


def normalize(q: Array) -> Array:
    """Return ``q / |q|``; a near-zero norm means the state is corrupted."""
    q = np.asarray(q, dtype=np.float64)
    n = math.sqrt(float(np.dot(q, q)))
    if not n > _ZERO_NORM:
        raise QuaternionError(f"quaternion norm {n!r} too small to normalize")
    return q / n


def is_unit(q: Array, tol: float = UNIT_NORM_TOL) -> bool:
    return abs(math.sqrt(float(np.dot(q, q))) - 1.0) <= tol


def rotation_matrix(q: Array) -> Array:
    """Rotation matrix R(q) with columns = body axes expressed in the inertial frame."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotate_vector(q: Array, u: Array) -> Array:
    """Vector part of ``q * [0, u] * q^-1`` for unit ``q``."""
    w = q[0]
    qv = np.asarray(q[1:], dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    t = 2.0 * cross(qv, u)
    return u + w * t + cross(qv, t)


def body_z(q: Array) -> Array:
    """Third body axis b3 expressed in the inertial frame."""
    w, x, y, z = q
    return np.array([2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)])


def quat_from_rotation_matrix(S: Array, tol: float = 1e-6, check: bool = True) -> Array:
    """Unit quaternion of a proper rotation matrix, scalar part >= 0.

    Uses Shepperd's method: the largest of (trace, S00, S11, S22) picks the
    component that is computed from a square root, keeping the division safe
    near 180 degree rotations. ``check=False`` skips the orthonormality test
    for matrices that are orthonormal by construction.
    """
    S = np.asarray(S, dtype=np.float64)
    if check:
        _check_rotation(S, tol)

    tr = S[0, 0] + S[1, 1] + S[2, 2]
    choice = int(np.argmax([tr, S[0, 0], S[1, 1], S[2, 2]]))
    if choice == 0:
        s = 2.0 * math.sqrt(1.0 + tr)
        q = [0.25 * s, (S[2, 1] - S[1, 2]) / s, (S[0, 2] - S[2, 0]) / s, (S[1, 0] - S[0, 1]) / s]
    elif choice == 1:
        s = 2.0 * math.sqrt(1.0 + S[0, 0] - S[1, 1] - S[2, 2])
        q = [(S[2, 1] - S[1, 2]) / s, 0.25 * s, (S[0, 1] + S[1, 0]) / s, (S[0, 2] + S[2, 0]) / s]
    elif choice == 2:
        s = 2.0 * math.sqrt(1.0 - S[0, 0] + S[1, 1] - S[2, 2])
        q = [(S[0, 2] - S[2, 0]) / s, (S[0, 1] + S[1, 0]) / s, 0.25 * s, (S[1, 2] + S[2, 1]) / s]
    else:
        s = 2.0 * math.sqrt(1.0 - S[0, 0] - S[1, 1] + S[2, 2])
        q = [(S[1, 0] - S[0, 1]) / s, (S[0, 2] + S[2, 0]) / s, (S[1, 2] + S[2, 1]) / s, 0.25 * s]
    q = normalize(np.array(q))
    if q[0] < 0.0:
        q = -q
    return q


def _check_rotation(S: Array, tol: float) -> None:
    if S.shape != (3, 3) or not np.all(np.isfinite(S)):
        raise QuaternionError("rotation matrix must be a finite 3x3 array")
    ortho_err = np.max(np.abs(S.T @ S - np.eye(3)))
    if ortho_err > tol or abs(np.linalg.det(S) - 1.0) > tol:
        raise QuaternionError(
            f"matrix is not a proper rotation (orthonormality error {ortho_err:.3g})"
        )


def axis_angle(q: Array) -> tuple[float, Array]:
    """Rotation angle in [0, pi] and unit axis of a unit quaternion.

    The sign of ``q`` is chosen so that the angle does not exceed pi. For a
    zero rotation the axis is arbitrary and returned as ``(1, 0, 0)``.
    """
    q = np.asarray(q, dtype=np.float64)
    if q[0] < 0.0:
        q = -q
    s = float(np.linalg.norm(q[1:]))
    angle = 2.0 * math.atan2(s, q[0])
    if s < 1e-300:
        return 0.0, np.array([1.0, 0.0, 0.0])
    return angle, q[1:] / s


def from_axis_angle(axis, angle: float) -> Array:
    axis = np.asarray(axis, dtype=np.float64)
    n = float(np.linalg.norm(axis))
    if n == 0.0:
        return IDENTITY.copy()
    h = 0.5 * angle
    return np.concatenate(([math.cos(h)], math.sin(h) * axis / n))


def from_rotation_vector(rv) -> Array:
    rv = np.asarray(rv, dtype=np.float64)
    return from_axis_angle(rv, float(np.linalg.norm(rv)))


def euler_zyx(q: Array) -> tuple[float, float, float]:
    """(roll, pitch, yaw) in radians for R = Rz(yaw) Ry(pitch) Rx(roll).

    Used for logging and for reading the current heading; attitude control
    itself works on quaternions.
    """
    w, x, y, z = q
    roll = math.atan2(2 * (w * x + y * z), 1 - 2 * (x * x + y * y))
    sp = max(-1.0, min(1.0, 2 * (w * y - z * x)))
    pitch = math.asin(sp)
    yaw = math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z))
    return roll, pitch, yaw


def from_euler_zyx(roll: float, pitch: float, yaw: float) -> Array:
    qz = from_axis_angle([0, 0, 1], yaw)
    qy = from_axis_angle([0, 1, 0], pitch)
    qx = from_axis_angle([1, 0, 0], roll)
    return quat_mul(quat_mul(qz, qy), qx)
