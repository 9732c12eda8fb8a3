"""Force & torque <-> actuator command mappings for both robots.

RoboBee: a diagonal map from (amplitude, roll, pitch, yaw) drive parameters
to (f, tau1, tau2, tau3).

Bee+: four wings with per-wing thrust ``k_f v_i`` and steering-plane force
``k_s v_i``; torques come from lever arms ``d1, d2, d3``::

    [f ]   [ kf     kf     kf     kf   ] [v1]
    [t1] = [-kf d1 -kf d1  kf d1  kf d1] [v2]
    [t2]   [ kf d2 -kf d2  kf d2 -kf d2] [v3]
    [t3]   [ ks d3 -ks d3 -ks d3  ks d3] [v4]

The rows are mutually orthogonal sign patterns, so the inverse is the
transposed pattern scaled by 1/(4 * row gain).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fwmav.dynamics import Wrench

# Sign patterns of the Bee+ map (rows: f, tau1, tau2, tau3; columns: wings 1-4).
_BEEPLUS_SIGNS = np.array([
    [1.0, 1.0, 1.0, 1.0],
    [-1.0, -1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
])


def _check_positive(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not value > 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class RoboBeeMixParams:
    k_amp: float
    k_roll: float
    k_pitch: float
    k_yaw: float
    # Symmetric command limits for (amp, roll, pitch, yaw).
    limits: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        _check_positive(self, ("k_amp", "k_roll", "k_pitch", "k_yaw"))
        if any(not lim > 0 for lim in self.limits):
            raise ValueError("RoboBee command limits must be positive")

    @property
    def gains(self) -> np.ndarray:
        return np.array([self.k_amp, self.k_roll, self.k_pitch, self.k_yaw])


@dataclass(frozen=True)
class BeePlusMixParams:
    k_f: float
    k_s: float
    d1: float
    d2: float
    d3: float
    v_max: float = 1.0

    def __post_init__(self):
        _check_positive(self, ("k_f", "k_s", "d1", "d2", "d3", "v_max"))

    @property
    def row_gains(self) -> np.ndarray:
        return np.array([self.k_f, self.k_f * self.d1, self.k_f * self.d2, self.k_s * self.d3])


@dataclass(frozen=True)
class RoboBeeCommand:
    theta_amp: float
    theta_roll: float
    theta_pitch: float
    theta_yaw: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta_amp, self.theta_roll, self.theta_pitch, self.theta_yaw])


@dataclass(frozen=True)
class BeePlusCommand:
    v1: float
    v2: float
    v3: float
    v4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3, self.v4])


def robobee_forward(c: RoboBeeCommand, p: RoboBeeMixParams) -> Wrench:
    return Wrench.from_array(p.gains * c.as_array())


def robobee_inverse(w: Wrench, p: RoboBeeMixParams) -> RoboBeeCommand:
    return RoboBeeCommand(*(w.as_array() / p.gains).tolist())


def beeplus_matrix(p: BeePlusMixParams) -> np.ndarray:
    """4x4 map from wing commands to (f, tau1, tau2, tau3)."""
    return _BEEPLUS_SIGNS * p.row_gains[:, None]


def beeplus_inverse_matrix(p: BeePlusMixParams) -> np.ndarray:
    """Closed-form inverse of :func:`beeplus_matrix`."""
    return _BEEPLUS_SIGNS.T / (4.0 * p.row_gains[None, :])


def beeplus_forward(c: BeePlusCommand, p: BeePlusMixParams) -> Wrench:
    v1, v2, v3, v4 = c.v1, c.v2, c.v3, c.v4
    kf, ks = p.k_f, p.k_s
    return Wrench(
        kf * (v1 + v2 + v3 + v4),
        (
            kf * p.d1 * (-v1 - v2 + v3 + v4),
            kf * p.d2 * (v1 - v2 + v3 - v4),
            ks * p.d3 * (v1 - v2 - v3 + v4),
        ),
    )


def beeplus_inverse(w: Wrench, p: BeePlusMixParams) -> BeePlusCommand:
    f = w.thrust / (4.0 * p.k_f)
    t1 = w.torque[0] / (4.0 * p.d1 * p.k_f)
    t2 = w.torque[1] / (4.0 * p.d2 * p.k_f)
    t3 = w.torque[2] / (4.0 * p.d3 * p.k_s)
    return BeePlusCommand(
        float(f - t1 + t2 + t3),
        float(f - t1 - t2 - t3),
        float(f + t1 + t2 - t3),
        float(f + t1 - t2 + t3),
    )


def saturate(c, limits):
    """Clamp a command; returns ``(clamped_command, flags)``.

    ``flags`` is a tuple of four bools marking clipped components. Bee+ wing
    amplitudes are clamped to ``[0, v_max]``; RoboBee parameters to
    ``[-limit, limit]`` per component. ``limits`` is the matching mix-params
    object, a scalar ``v_max`` for Bee+, or a 4-sequence for RoboBee.
    """
    if isinstance(c, BeePlusCommand):
        v_max = limits.v_max if isinstance(limits, BeePlusMixParams) else float(limits)
        if not v_max > 0:
            raise ValueError("v_max must be positive")
        raw = c.as_array()
        out = np.clip(raw, 0.0, v_max)
        return BeePlusCommand(*out.tolist()), tuple(bool(b) for b in out != raw)
    if isinstance(c, RoboBeeCommand):
        lim = np.asarray(limits.limits if isinstance(limits, RoboBeeMixParams) else limits, float)
        if np.any(lim <= 0):
            raise ValueError("limits must be positive")
        raw = c.as_array()
        out = np.clip(raw, -lim, lim)
        return RoboBeeCommand(*out.tolist()), tuple(bool(b) for b in out != raw)
    raise TypeError(f"unsupported command type {type(c).__name__}")


def allocate(w: Wrench, mix):
    """Inverse map, saturate, forward map.

    Returns ``(command, flags, applied_wrench)`` where ``applied_wrench`` is
    what the actuators actually produce after clamping. No redistribution of
    the clipped residual is attempted.
    """
    if isinstance(mix, BeePlusMixParams):
        cmd, flags = saturate(beeplus_inverse(w, mix), mix)
        return cmd, flags, beeplus_forward(cmd, mix)
    if isinstance(mix, RoboBeeMixParams):
        cmd, flags = saturate(robobee_inverse(w, mix), mix)
        return cmd, flags, robobee_forward(cmd, mix)
    raise TypeError(f"unsupported mix params {type(mix).__name__}")


def robobee_default_mix(weight: float) -> RoboBeeMixParams:
    """Calibration putting hover thrust at half the amplitude limit (not measured values)."""
    return RoboBeeMixParams(k_amp=weight / 0.5, k_roll=2.0e-6, k_pitch=2.0e-6, k_yaw=2.0e-7)


def beeplus_default_mix(weight: float, v_max: float = 1.0) -> BeePlusMixParams:
    """Calibration putting hover at ``v_i = v_max / 2`` (not measured values)."""
    k_f = weight / (4.0 * 0.5 * v_max)
    return BeePlusMixParams(k_f=k_f, k_s=0.2 * k_f, d1=4.0e-3, d2=4.0e-3, d3=4.0e-3, v_max=v_max)
