"""Rigid-body dynamics of a thrust-propelled flapping-wing robot.

    m r''  = -m g n3 + f b3
    q'     = 1/2 q * [0, omega]
    J w'   = -w x J w + tau

The thrust acts along the body z-axis only; aerodynamic drag and
wing/body gyroscopic coupling are not modelled. An optional zero-mean
sinusoidal "flap ripple" wrench stands in for stroke-resolved forces.

The integrator works on a flat tuple of 13 Python floats. At 10 kHz
physics rate this is several times faster than small numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Union

import numpy as np

from fwmav import quatmath as qm

if TYPE_CHECKING:
    from fwmav.allocation import BeePlusMixParams, RoboBeeMixParams

GRAVITY = 9.81

# Placeholder inertia (not a measured value), kg m^2.
DEFAULT_INERTIA = (1.42e-9, 1.34e-9, 0.45e-9)


class RobotKind(str, enum.Enum):
    ROBOBEE = "robobee"
    BEEPLUS = "beeplus"


class IntegrationError(RuntimeError):
    """Non-finite state produced by the integrator."""

    def __init__(self, t: float, message: str = "non-finite state"):
        super().__init__(f"{message} at t={t:.6f} s")
        self.t = t


@dataclass(frozen=True, eq=False)
class Wrench:
    """Scalar thrust along b3 (N) and body-frame torque (N m)."""

    thrust: float
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "thrust", float(self.thrust))
        object.__setattr__(self, "torque", qm.vec3(self.torque))

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.thrust], self.torque))

    @classmethod
    def from_array(cls, a) -> "Wrench":
        return cls(a[0], a[1:4])

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.thrust + other.thrust, self.torque + other.torque)


ZERO_WRENCH = Wrench(0.0)


@dataclass(frozen=True, eq=False)
class RigidBodyState:
    r: np.ndarray
    v: np.ndarray
    q: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", qm.vec3(self.r))
        object.__setattr__(self, "v", qm.vec3(self.v))
        object.__setattr__(self, "q", qm.quat(self.q))
        object.__setattr__(self, "omega", qm.vec3(self.omega))

    @classmethod
    def at_rest(cls, r=(0.0, 0.0, 0.0), q=qm.IDENTITY) -> "RigidBodyState":
        return cls(r, np.zeros(3), q, np.zeros(3))

    def to_flat(self) -> tuple:
        return (*self.r.tolist(), *self.v.tolist(), *self.q.tolist(), *self.omega.tolist())

    @classmethod
    def from_flat(cls, x) -> "RigidBodyState":
        return cls(x[0:3], x[3:6], x[6:10], x[10:13])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_flat())))


@dataclass(frozen=True, eq=False)
class RigidBodyStateDerivative:
    r_dot: np.ndarray
    v_dot: np.ndarray
    q_dot: np.ndarray
    omega_dot: np.ndarray


@dataclass(frozen=True, eq=False)
class RobotParams:
    mass: float
    inertia: np.ndarray
    robot_kind: RobotKind = RobotKind.ROBOBEE
    mix: Union["RoboBeeMixParams", "BeePlusMixParams", None] = None
    gravity: float = GRAVITY
    flap_freq: float = 100.0
    ripple_torque_amp: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ripple_force_amp: float = 0.0

    def __post_init__(self):
        J = np.asarray(self.inertia, dtype=np.float64)
        if J.shape == (3,):
            J = np.diag(J)
        object.__setattr__(self, "inertia", J)
        object.__setattr__(self, "ripple_torque_amp", qm.vec3(self.ripple_torque_amp))
        object.__setattr__(self, "robot_kind", RobotKind(self.robot_kind))
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if J.shape != (3, 3) or not np.allclose(J, J.T, rtol=0, atol=1e-24):
            raise ValueError("inertia must be a symmetric 3x3 matrix")
        if np.any(np.linalg.eigvalsh(J) <= 0):
            raise ValueError("inertia must be positive definite")
        if not self.flap_freq > 0:
            raise ValueError("flap_freq must be positive")

    @property
    def weight(self) -> float:
        return self.mass * self.gravity

    def with_(self, **changes) -> "RobotParams":
        return replace(self, **changes)

    def _plant(self) -> tuple:
        # Cached flat constants for the integrator.
        cached = self.__dict__.get("_plant_cache")
        if cached is None:
            J = self.inertia
            Jinv = np.linalg.inv(J)
            cached = (
                self.mass,
                self.gravity,
                tuple(J.ravel().tolist()),
                tuple(Jinv.ravel().tolist()),
                tuple(self.ripple_torque_amp.tolist()),
                self.ripple_force_amp,
                2.0 * math.pi * self.flap_freq,
                # Diagonal entries when J is diagonal, for the integrator's fast path.
                tuple(np.diag(J).tolist()) if np.count_nonzero(J - np.diag(np.diag(J))) == 0 else None,
            )
            object.__setattr__(self, "_plant_cache", cached)
        return cached


def flap_ripple(t: float, p: RobotParams) -> Wrench:
    """Zero-mean flapping disturbance.

    Torque oscillates once per stroke, thrust twice per stroke.
    """
    w = 2.0 * math.pi * p.flap_freq
    return Wrench(p.ripple_force_amp * math.sin(2.0 * w * t), p.ripple_torque_amp * math.sin(w * t))


def ripple_rate_offset(p: RobotParams) -> tuple[np.ndarray, float]:
    """Body rate and speed along b3 that put a body at rest on the ripple's periodic orbit.

    Integrating ``A sin(w t)`` from zero gives ``A/w (1 - cos w t)``, whose
    mean ``A/w`` is a spurious constant drift. Starting from ``-A/w`` removes it.
    """
    w = 2.0 * math.pi * p.flap_freq
    domega = -np.linalg.solve(p.inertia, p.ripple_torque_amp) / w
    dv = -p.ripple_force_amp / (p.mass * 2.0 * w)
    return domega, dv


def _stage_diag(vx, vy, vz, qw, qx, qy, qz, wx, wy, wz, fm, tx, ty, tz, g, inertia):
    """Derivative of (v, q, omega) for a diagonal inertia (Ja, Jb, Jc)."""
    Ja, Jb, Jc = inertia
    return (
        fm * 2.0 * (qx * qz + qw * qy),
        fm * 2.0 * (qy * qz - qw * qx),
        fm * (1.0 - 2.0 * (qx * qx + qy * qy)) - g,
        -0.5 * (qx * wx + qy * wy + qz * wz),
        0.5 * (qw * wx + qy * wz - qz * wy),
        0.5 * (qw * wy - qx * wz + qz * wx),
        0.5 * (qw * wz + qx * wy - qy * wx),
        (tx - (Jc - Jb) * wy * wz) / Ja,
        (ty - (Ja - Jc) * wz * wx) / Jb,
        (tz - (Jb - Ja) * wx * wy) / Jc,
    )


def _stage_full(vx, vy, vz, qw, qx, qy, qz, wx, wy, wz, fm, tx, ty, tz, g, inertia):
    """Derivative of (v, q, omega) for a general inertia, given (J, J^-1) flattened."""
    (J0, J1, J2, J3, J4, J5, J6, J7, J8), (I0, I1, I2, I3, I4, I5, I6, I7, I8) = inertia
    hx = J0 * wx + J1 * wy + J2 * wz
    hy = J3 * wx + J4 * wy + J5 * wz
    hz = J6 * wx + J7 * wy + J8 * wz
    # tau - omega x J omega
    mx = tx - (wy * hz - wz * hy)
    my = ty - (wz * hx - wx * hz)
    mz = tz - (wx * hy - wy * hx)
    return (
        fm * 2.0 * (qx * qz + qw * qy),
        fm * 2.0 * (qy * qz - qw * qx),
        fm * (1.0 - 2.0 * (qx * qx + qy * qy)) - g,
        -0.5 * (qx * wx + qy * wy + qz * wz),
        0.5 * (qw * wx + qy * wz - qz * wy),
        0.5 * (qw * wy - qx * wz + qz * wx),
        0.5 * (qw * wz + qx * wy - qy * wx),
        I0 * mx + I1 * my + I2 * mz,
        I3 * mx + I4 * my + I5 * mz,
        I6 * mx + I7 * my + I8 * mz,
    )


def _stage_fn(plant):
    diag = plant[7]
    if diag is not None:
        return _stage_diag, diag
    return _stage_full, (plant[2], plant[3])


def rk4_flat(x: tuple, t: float, dt: float, f: float, tau: tuple, plant: tuple,
             ripple: bool = False) -> tuple:
    """One RK4 step on the flat 13-tuple state, quaternion renormalized.

    Written out on scalars because this is the simulator's inner loop.
    """
    m, g = plant[0], plant[1]
    stage, inertia = _stage_fn(plant)
    rx, ry, rz, vx, vy, vz, qw, qx, qy, qz, wx, wy, wz = x
    tx, ty, tz = tau
    h = 0.5 * dt
    if ripple:
        A, Af, w = plant[4], plant[5], plant[6]
        # Ripple sampled at the three distinct RK4 stage times.
        s0, s1, s2 = math.sin(w * t), math.sin(w * (t + h)), math.sin(w * (t + dt))
        k0, k1, k2 = math.sin(2.0 * w * t), math.sin(2.0 * w * (t + h)), math.sin(2.0 * w * (t + dt))
        f0, f1, f2 = (f + Af * k0) / m, (f + Af * k1) / m, (f + Af * k2) / m
        ax, ay, az = A
        t0x, t0y, t0z = tx + ax * s0, ty + ay * s0, tz + az * s0
        t1x, t1y, t1z = tx + ax * s1, ty + ay * s1, tz + az * s1
        t2x, t2y, t2z = tx + ax * s2, ty + ay * s2, tz + az * s2
    else:
        f0 = f1 = f2 = f / m
        t0x = t1x = t2x = tx
        t0y = t1y = t2y = ty
        t0z = t1z = t2z = tz
    a0, a1, a2, a3, a4, a5, a6, a7, a8, a9 = stage(
        vx, vy, vz, qw, qx, qy, qz, wx, wy, wz, f0, t0x, t0y, t0z, g, inertia)
    b0, b1, b2, b3, b4, b5, b6, b7, b8, b9 = stage(
        vx + h * a0, vy + h * a1, vz + h * a2, qw + h * a3, qx + h * a4, qy + h * a5,
        qz + h * a6, wx + h * a7, wy + h * a8, wz + h * a9, f1, t1x, t1y, t1z, g, inertia)
    c0, c1, c2, c3, c4, c5, c6, c7, c8, c9 = stage(
        vx + h * b0, vy + h * b1, vz + h * b2, qw + h * b3, qx + h * b4, qy + h * b5,
        qz + h * b6, wx + h * b7, wy + h * b8, wz + h * b9, f1, t1x, t1y, t1z, g, inertia)
    d0, d1, d2, d3, d4, d5, d6, d7, d8, d9 = stage(
        vx + dt * c0, vy + dt * c1, vz + dt * c2, qw + dt * c3, qx + dt * c4, qy + dt * c5,
        qz + dt * c6, wx + dt * c7, wy + dt * c8, wz + dt * c9, f2, t2x, t2y, t2z, g, inertia)
    s = dt / 6.0
    # r' = v, so the position stages are the velocity stages above.
    nrx = rx + s * (6.0 * vx + dt * (a0 + b0 + c0))
    nry = ry + s * (6.0 * vy + dt * (a1 + b1 + c1))
    nrz = rz + s * (6.0 * vz + dt * (a2 + b2 + c2))
    nvx = vx + s * (a0 + 2.0 * (b0 + c0) + d0)
    nvy = vy + s * (a1 + 2.0 * (b1 + c1) + d1)
    nvz = vz + s * (a2 + 2.0 * (b2 + c2) + d2)
    nqw = qw + s * (a3 + 2.0 * (b3 + c3) + d3)
    nqx = qx + s * (a4 + 2.0 * (b4 + c4) + d4)
    nqy = qy + s * (a5 + 2.0 * (b5 + c5) + d5)
    nqz = qz + s * (a6 + 2.0 * (b6 + c6) + d6)
    nwx = wx + s * (a7 + 2.0 * (b7 + c7) + d7)
    nwy = wy + s * (a8 + 2.0 * (b8 + c8) + d8)
    nwz = wz + s * (a9 + 2.0 * (b9 + c9) + d9)
    n = math.sqrt(nqw * nqw + nqx * nqx + nqy * nqy + nqz * nqz)
    if not (n > 1e-12 and math.isfinite(nrx + nry + nrz + nvx + nvy + nvz + n + nwx + nwy + nwz)):
        raise IntegrationError(t + dt)
    return (nrx, nry, nrz, nvx, nvy, nvz, nqw / n, nqx / n, nqy / n, nqz / n, nwx, nwy, nwz)


def state_derivative(s: RigidBodyState, w: Wrench, p: RobotParams) -> RigidBodyStateDerivative:
    plant = p._plant()
    stage, inertia = _stage_fn(plant)
    d = stage(*s.to_flat()[3:], w.thrust / p.mass, *w.torque.tolist(), p.gravity, inertia)
    return RigidBodyStateDerivative(
        s.v.copy(), np.array(d[0:3]), np.array(d[3:7]), np.array(d[7:10])
    )


def step_rk4(s: RigidBodyState, w: Wrench, p: RobotParams, dt: float,
             t: float = 0.0, ripple: bool = False) -> RigidBodyState:
    """Advance ``s`` by ``dt`` under a wrench held constant over the step.

    With ``ripple=True`` the flap ripple of ``p`` is added and evaluated at
    the RK4 stage times starting from ``t``.
    """
    if not 0.0 < dt <= 1e-3:
        raise ValueError(f"dt must be in (0, 1e-3] s, got {dt}")
    y = rk4_flat(s.to_flat(), t, dt, w.thrust, tuple(w.torque.tolist()), p._plant(), ripple)
    return RigidBodyState.from_flat(y)


def kinetic_energy_rot(omega, J) -> float:
    omega = np.asarray(omega)
    return 0.5 * float(omega @ J @ omega)
