"""Quaternion attitude control and cascaded position control.

Attitude: with the error quaternion ``q_e = q_d^-1 * q = [m_e, n_e]``::

    tau = -K1 sgn(m_e) n_e - K2 (omega - omega_d) + tau_d

Position: a PID force demand ``f_a`` in the inertial frame, thrust is its
projection on the current body z-axis, and the desired attitude is the
frame whose z-axis points along ``f_a`` with heading ``psi_d``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from fwmav import quatmath as qm
from fwmav.dynamics import RigidBodyState, RobotParams, Wrench

E3 = np.array([0.0, 0.0, 1.0])


class DegenerateAttitudeError(ValueError):
    """Desired attitude cannot be built from the force demand."""


class DegenerateThrustError(DegenerateAttitudeError):
    pass


class GimbalDegenerateError(DegenerateAttitudeError):
    pass


class YawMode(str, enum.Enum):
    OPEN_LOOP = "open_loop"
    REGULATED = "regulated"


class OmegaDesiredMode(str, enum.Enum):
    # Reuse the desired-frame components as body-frame components.
    LITERAL = "literal"
    # Rotate the desired-frame vector into the body frame.
    ROTATED = "rotated"


def _positive(v, name, allow_zero=False, allow_inf=False):
    v = qm.vec3(v)
    ok = np.all(v >= 0) if allow_zero else np.all(v > 0)
    bounded = np.all(v < np.inf) or allow_inf
    if not ok or np.any(np.isnan(v)) or not bounded:
        raise ValueError(f"{name} entries must be {'>= 0' if allow_zero else '> 0'}, got {v}")
    return v


@dataclass(frozen=True, eq=False)
class AttitudeGains:
    K1: np.ndarray
    K2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "K1", _positive(self.K1, "K1"))
        object.__setattr__(self, "K2", _positive(self.K2, "K2"))


@dataclass(frozen=True, eq=False)
class PositionGains:
    Kp: np.ndarray
    Kd: np.ndarray
    Ki: np.ndarray
    # Bound on |Ki * integral| per axis, N.
    integral_limit: np.ndarray = field(default_factory=lambda: np.full(3, np.inf))

    def __post_init__(self):
        object.__setattr__(self, "Kp", _positive(self.Kp, "Kp"))
        object.__setattr__(self, "Kd", _positive(self.Kd, "Kd"))
        object.__setattr__(self, "Ki", _positive(self.Ki, "Ki", allow_zero=True))
        object.__setattr__(self, "integral_limit",
                           _positive(self.integral_limit, "integral_limit", allow_zero=True,
                                     allow_inf=True))
        ki = np.where(self.Ki > 0, self.Ki, 1.0)
        object.__setattr__(self, "_state_limit",
                           np.where(self.Ki > 0, self.integral_limit / ki, np.inf))

    def integral_state_limit(self) -> np.ndarray:
        """Clamp on the raw integral of position error (m s)."""
        return self._state_limit


@dataclass(frozen=True, eq=False)
class FlightSetpoint:
    r_d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rdot_d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rddot_d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    psi_d: float = 0.0
    omega_hat_d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tau_d: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("r_d", "rdot_d", "rddot_d", "omega_hat_d", "tau_d"):
            object.__setattr__(self, name, qm.vec3(getattr(self, name)))
        object.__setattr__(self, "psi_d", float(self.psi_d))


@dataclass(frozen=True)
class AttitudeError:
    m_e: float
    n_e: np.ndarray

    def as_quat(self) -> np.ndarray:
        return np.concatenate(([self.m_e], self.n_e))


@dataclass(frozen=True)
class ControllerConfig:
    yaw_mode: YawMode = YawMode.OPEN_LOOP
    omega_d_mode: OmegaDesiredMode = OmegaDesiredMode.LITERAL
    # Use only the vertical component of the force demand.
    altitude_only: bool = False
    # Fraction of m g below which the force demand is too small to define b3d.
    f_min_frac: float = 0.05
    dt: float = 1.0 / 2000.0


@dataclass(frozen=True, eq=False)
class ControllerState:
    integral: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q_d: np.ndarray = field(default_factory=lambda: qm.IDENTITY.copy())


def sgn(x: float) -> float:
    return -1.0 if x < 0.0 else 1.0


def attitude_error(q: np.ndarray, q_d: np.ndarray) -> AttitudeError:
    qe = qm.quat_mul(qm.quat_conjugate(q_d), q)
    return AttitudeError(float(qe[0]), qe[1:].copy())


def attitude_torque(e: AttitudeError, omega, omega_d, tau_d, g: AttitudeGains) -> np.ndarray:
    return (-g.K1 * sgn(e.m_e) * e.n_e
            - g.K2 * (np.asarray(omega) - np.asarray(omega_d))
            + np.asarray(tau_d))


def desired_omega_in_body(omega_hat_d) -> np.ndarray:
    return qm.vec3(omega_hat_d)


def desired_omega_rotated(omega_hat_d, e: AttitudeError) -> np.ndarray:
    """``omega_hat_d`` re-expressed in the body frame through the error rotation."""
    return qm.rotate_vector(qm.quat_conjugate(e.as_quat()), omega_hat_d)


def position_force(r, v, integral, sp: FlightSetpoint, p: RobotParams, g: PositionGains) -> np.ndarray:
    return (-g.Kp * (np.asarray(r) - sp.r_d)
            - g.Kd * (np.asarray(v) - sp.rdot_d)
            - g.Ki * np.asarray(integral)
            + p.mass * p.gravity * E3
            + p.mass * sp.rddot_d)


def thrust_magnitude(f_a, q) -> float:
    """Projection of ``f_a`` on the body z-axis, floored at zero."""
    return max(0.0, float(np.dot(f_a, qm.body_z(q))))


def desired_attitude(f_a, psi_d: float, f_min: float = 0.0) -> np.ndarray:
    f_a = np.asarray(f_a, dtype=np.float64)
    norm = float(np.linalg.norm(f_a))
    if not norm > f_min or norm == 0.0:
        raise DegenerateThrustError(f"|f_a| = {norm:.3g} N is not above f_min = {f_min:.3g} N")
    b3 = f_a / norm
    heading = np.array([-math.sin(psi_d), math.cos(psi_d), 0.0])
    c = qm.cross(heading, b3)
    cn = float(np.linalg.norm(c))
    if cn <= 1e-6:
        raise GimbalDegenerateError("desired thrust axis is aligned with the heading vector")
    b1 = c / cn
    b2 = qm.cross(b3, b1)
    S = np.column_stack((b1, b2, b3))
    return qm.quat_from_rotation_matrix(S, check=False)


def yaw_of(q) -> float:
    return qm.euler_zyx(q)[2]


def controller_step(est: RigidBodyState, sp: FlightSetpoint, state: ControllerState,
                    params: RobotParams, att: AttitudeGains, pos: PositionGains,
                    cfg: ControllerConfig = ControllerConfig()):
    """One control tick.

    Returns ``(wrench, new_state, q_d)``. When the desired attitude is
    degenerate the previous ``q_d`` is held.
    """
    err = est.r - sp.r_d
    lim = pos.integral_state_limit()
    integral = np.clip(state.integral + err * cfg.dt, -lim, lim)

    f_a = position_force(est.r, est.v, integral, sp, params, pos)
    if cfg.altitude_only:
        f_a = np.array([0.0, 0.0, f_a[2]])

    if cfg.yaw_mode is YawMode.OPEN_LOOP:
        psi_d = yaw_of(est.q)
    else:
        psi_d = sp.psi_d

    try:
        q_d = desired_attitude(f_a, psi_d, cfg.f_min_frac * params.weight)
    except DegenerateAttitudeError:
        q_d = state.q_d

    f = thrust_magnitude(f_a, est.q)
    e = attitude_error(est.q, q_d)
    if cfg.omega_d_mode is OmegaDesiredMode.ROTATED:
        omega_d = desired_omega_rotated(sp.omega_hat_d, e)
    else:
        omega_d = desired_omega_in_body(sp.omega_hat_d)
    tau = attitude_torque(e, est.omega, omega_d, sp.tau_d, att)
    if cfg.yaw_mode is YawMode.OPEN_LOOP:
        # No yaw feedback: the yaw channel is left uncommanded.
        tau[2] = 0.0

    return Wrench(f, tau), replace(state, integral=integral, q_d=q_d), q_d
