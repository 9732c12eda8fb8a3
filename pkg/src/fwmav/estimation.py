"""Simulated motion capture and filtered-derivative velocity estimation.

The derivative filter is ``lambda s / (s + lambda)`` discretized with the
bilinear transform at the sensor period T::

    y[k] = a y[k-1] + b (x[k] - x[k-1]),
    a = (2 - lambda T) / (2 + lambda T),  b = 2 lambda / (2 + lambda T)

Angular velocity comes from filtering the four quaternion components and
forming ``[0, omega] = 2 q^-1 * (filtered q)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fwmav import quatmath as qm
from fwmav.dynamics import RigidBodyState

DEFAULT_LAMBDA = 50.0


@dataclass(frozen=True)
class NoiseModel:
    pos_sigma: float = 0.0
    angle_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.pos_sigma < 0 or self.angle_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True, eq=False)
class MocapMeasurement:
    t: float
    r_meas: np.ndarray
    q_meas: np.ndarray


def mocap_sample(s: RigidBodyState, n: NoiseModel, t: float,
                 rng: np.random.Generator | None = None) -> MocapMeasurement:
    """Pose measurement with Gaussian position noise and a small random rotation.

    The rotation has a uniformly random axis and an angle drawn from
    N(0, angle_sigma). ``rng`` carries the noise stream between calls; when
    omitted a generator seeded from ``n.seed`` is used for this sample only.
    """
    if n.pos_sigma == 0.0 and n.angle_sigma == 0.0:
        return MocapMeasurement(t, s.r.copy(), s.q.copy())
    if rng is None:
        rng = np.random.default_rng(n.seed)
    r = s.r + rng.normal(0.0, n.pos_sigma, 3) if n.pos_sigma > 0 else s.r.copy()
    q = s.q
    if n.angle_sigma > 0:
        axis = rng.normal(size=3)
        angle = rng.normal(0.0, n.angle_sigma)
        q = qm.normalize(qm.quat_mul(q, qm.from_axis_angle(axis, angle)))
    return MocapMeasurement(t, r, q)


class DerivativeFilter:
    """Bank of parallel bilinear ``lambda s/(s+lambda)`` filters.

    The first sample initializes the filter at rest (zero output), unless
    ``init`` is passed explicitly.
    """

    def __init__(self, lam: float, dt: float, channels: int = 1, init=None):
        if not lam > 0 or not dt > 0:
            raise ValueError("lambda and dt must be positive")
        if lam * dt >= 2.0:
            raise ValueError(f"lambda*dt = {lam * dt:.3g} must be < 2")
        self.lam = lam
        self.dt = dt
        self.channels = channels
        self.a = (2.0 - lam * dt) / (2.0 + lam * dt)
        self.b = 2.0 * lam / (2.0 + lam * dt)
        self.y = np.zeros(channels)
        self.x_prev = None if init is None else np.broadcast_to(
            np.asarray(init, dtype=np.float64), (channels,)).copy()

    def reset(self):
        self.y = np.zeros(self.channels)
        self.x_prev = None

    def step(self, x) -> np.ndarray:
        x = np.broadcast_to(np.asarray(x, dtype=np.float64), (self.channels,))
        if self.x_prev is None:
            self.x_prev = x.copy()
        self.y = self.a * self.y + self.b * (x - self.x_prev)
        self.x_prev = x.copy()
        return self.y.copy()


def filter_step(f: DerivativeFilter, x):
    """Advance ``f`` by one sample; scalar in, scalar out for 1-channel filters."""
    y = f.step(x)
    return float(y[0]) if f.channels == 1 and np.ndim(x) == 0 else y


def omega_from_filtered(q_meas, qdot_filtered) -> tuple[np.ndarray, float]:
    """``2 q^-1 * qdot``: returns (vector part, scalar residual).

    The residual is exactly zero in continuous time for a unit quaternion;
    here it is kept only as a diagnostic.
    """
    p = 2.0 * qm.quat_mul(qm.quat_conjugate(q_meas), qdot_filtered)
    return p[1:].copy(), float(p[0])


def estimate_omega(q_meas, qdot_filtered) -> np.ndarray:
    return omega_from_filtered(q_meas, qdot_filtered)[0]


@dataclass(frozen=True, eq=False)
class Estimate:
    t: float
    r: np.ndarray
    v: np.ndarray
    q: np.ndarray
    omega: np.ndarray
    scalar_residual: float = 0.0

    def as_state(self) -> RigidBodyState:
        return RigidBodyState(self.r, self.v, self.q, self.omega)


class PoseEstimator:
    """Turns a stream of pose measurements into a full state estimate.

    Quaternion samples are flipped onto the hemisphere of the previous
    sample before filtering, since the componentwise filter would see a
    sign flip as a huge derivative.
    """

    def __init__(self, lam: float = DEFAULT_LAMBDA, dt: float = 1.0 / 500.0):
        self.pos_filter = DerivativeFilter(lam, dt, 3)
        self.quat_filter = DerivativeFilter(lam, dt, 4)
        self._q_prev = None
        self.latest: Estimate | None = None

    def update(self, m: MocapMeasurement) -> Estimate:
        q = m.q_meas
        if self._q_prev is not None and float(np.dot(q, self._q_prev)) < 0.0:
            q = -q
        self._q_prev = q
        v = self.pos_filter.step(m.r_meas)
        qdot = self.quat_filter.step(q)
        omega, resid = omega_from_filtered(q, qdot)
        self.latest = Estimate(m.t, m.r_meas.copy(), v, q.copy(), omega, resid)
        return self.latest


def estimate_velocity(r_stream, lam: float = DEFAULT_LAMBDA, dt: float = 1.0 / 500.0) -> np.ndarray:
    """Velocity estimates for a sampled position stream, shape (n, 3)."""
    filt = DerivativeFilter(lam, dt, 3)
    return np.array([filt.step(r) for r in np.asarray(r_stream, dtype=np.float64)])
