"""Multirate closed-loop simulation.

Physics runs at ``physics_hz`` with the applied wrench held between
controller ticks. Motion capture is sampled at ``mocap_hz`` and the
controller at ``control_hz`` reads the latest estimate. Ticks are placed
at ``t = k / rate`` for ``k = 0 .. rate*duration - 1`` (start inclusive,
end exclusive), and at a shared instant the sensor sample is taken before
the controller runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from fwmav import quatmath as qm
from fwmav.allocation import BeePlusMixParams, RoboBeeMixParams, allocate
from fwmav.control import (
    AttitudeGains,
    ControllerConfig,
    ControllerState,
    FlightSetpoint,
    OmegaDesiredMode,
    PositionGains,
    YawMode,
    controller_step,
)
from fwmav.dynamics import (
    IntegrationError,
    RigidBodyState,
    RobotKind,
    RobotParams,
    rk4_flat,
    ripple_rate_offset,
)
from fwmav.estimation import MocapMeasurement, NoiseModel, PoseEstimator, mocap_sample
from fwmav.harness.config import ScenarioConfig, validate
from fwmav.harness.logio import STATUS_BLOWUP, STATUS_OK, STATUS_SAFETY, LogRecord


@dataclass(frozen=True, eq=False)
class Plant:
    """Library objects assembled from a config."""

    params: RobotParams
    att_gains: AttitudeGains
    pos_gains: PositionGains
    ctrl: ControllerConfig
    noise: NoiseModel
    schedule: tuple[tuple[float, FlightSetpoint], ...]
    initial: RigidBodyState


def build(cfg: ScenarioConfig) -> Plant:
    validate(cfg)
    kind = RobotKind(cfg.sim.robot)
    if kind is RobotKind.ROBOBEE:
        m = cfg.robobee_mix
        mix = RoboBeeMixParams(m.k_amp, m.k_roll, m.k_pitch, m.k_yaw, tuple(m.limits))
    else:
        m = cfg.beeplus_mix
        mix = BeePlusMixParams(m.k_f, m.k_s, m.d1, m.d2, m.d3, m.v_max)
    rb = cfg.robot
    params = RobotParams(
        mass=rb.mass, inertia=rb.inertia, robot_kind=kind, mix=mix, gravity=rb.gravity,
        flap_freq=rb.flap_freq, ripple_torque_amp=rb.ripple_torque_amp,
        ripple_force_amp=rb.ripple_force_amp,
    )
    g = cfg.gains
    att = AttitudeGains(g.K1, g.K2)
    pos = PositionGains(g.Kp, g.Kd, g.Ki, g.integral_limit)
    ctrl = ControllerConfig(
        yaw_mode=YawMode(cfg.control.yaw_mode),
        omega_d_mode=OmegaDesiredMode(cfg.control.omega_d_mode),
        altitude_only=cfg.control.altitude_only,
        f_min_frac=cfg.control.f_min_frac,
        dt=1.0 / cfg.sim.control_hz,
    )
    noise = NoiseModel(cfg.estimation.pos_sigma, cfg.estimation.angle_sigma, cfg.sim.seed)
    schedule = tuple(
        (sp.t, FlightSetpoint(sp.r_d, sp.rdot_d, sp.rddot_d, sp.psi_d, sp.omega_hat_d, sp.tau_d))
        for sp in cfg.setpoints
    )
    ini = cfg.initial
    q0 = qm.normalize(np.array(ini.q))
    omega0 = np.array(ini.omega)
    v0 = np.array(ini.v)
    if cfg.sim.ripple:
        # Start on the ripple's periodic orbit instead of with a mean-rate kick.
        domega, dv = ripple_rate_offset(params)
        omega0 = omega0 + domega
        v0 = v0 + dv * qm.body_z(q0)
    initial = RigidBodyState(ini.r, v0, q0, omega0)
    return Plant(params, att, pos, ctrl, noise, schedule, initial)


def _outside(r, lo, hi) -> bool:
    return any(x < a or x > b for x, a, b in zip(r, lo, hi))


def tick_counts(cfg: ScenarioConfig) -> tuple[int, int, int]:
    """(physics steps, controller ticks, sensor samples) for a full run."""
    s = cfg.sim
    n = int(round(s.duration * s.physics_hz))
    return n, n // (s.physics_hz // s.control_hz), n // (s.physics_hz // s.mocap_hz)


def run_scenario(cfg: ScenarioConfig) -> Iterator[LogRecord]:
    """Yield one :class:`LogRecord` per controller tick.

    An aborted run ends with a record whose ``status`` is ``blowup`` or
    ``safety_exit``.
    """
    plant = build(cfg)
    s = cfg.sim
    p = plant.params
    n_steps, _, _ = tick_counts(cfg)
    ctrl_every = s.physics_hz // s.control_hz
    mocap_every = s.physics_hz // s.mocap_hz
    dt = 1.0 / s.physics_hz
    flat_plant = p._plant()
    rng = np.random.default_rng(s.seed)
    estimator = PoseEstimator(cfg.estimation.lam, 1.0 / s.mocap_hz)
    cstate = ControllerState()
    schedule = plant.schedule
    sp_idx = 0
    noise = plant.noise
    quiet = noise.pos_sigma == 0.0 and noise.angle_sigma == 0.0

    x = plant.initial.to_flat()
    f_app, tau_app = 0.0, (0.0, 0.0, 0.0)
    est = None
    for k in range(n_steps):
        t = k * dt
        if k % mocap_every == 0:
            state = RigidBodyState.from_flat(x)
            meas = (MocapMeasurement(t, state.r, state.q) if quiet
                    else mocap_sample(state, noise, t, rng))
            est = estimator.update(meas)
        if k % ctrl_every == 0:
            while sp_idx + 1 < len(schedule) and schedule[sp_idx + 1][0] <= t + 1e-12:
                sp_idx += 1
            sp = schedule[sp_idx][1]
            wrench, cstate, q_d = controller_step(
                est.as_state(), sp, cstate, p, plant.att_gains, plant.pos_gains, plant.ctrl)
            cmd, flags, applied = allocate(wrench, p.mix)
            f_app = applied.thrust
            tau_app = tuple(applied.torque.tolist())
            r = x[0:3]
            status = STATUS_SAFETY if _outside(r, s.safety_min, s.safety_max) else STATUS_OK
            q = x[6:10]
            yield LogRecord(
                t=t, r=r, v=x[3:6], q=q,
                euler_deg=tuple(math.degrees(a) for a in qm.euler_zyx(q)),
                omega=x[10:13],
                r_est=tuple(est.r.tolist()), v_est=tuple(est.v.tolist()),
                q_est=tuple(est.q.tolist()), omega_est=tuple(est.omega.tolist()),
                omega_resid=est.scalar_residual,
                r_d=tuple(sp.r_d.tolist()),
                psi_d=float(qm.euler_zyx(q_d)[2]),
                q_d=tuple(q_d.tolist()),
                wrench_cmd=tuple(wrench.as_array().tolist()),
                u_cmd=tuple(cmd.as_array().tolist()),
                sat=flags,
                wrench_applied=(f_app, *tau_app),
                status=status,
            )
            if status != STATUS_OK:
                return
        try:
            x = rk4_flat(x, t, dt, f_app, tau_app, flat_plant, s.ripple)
        except IntegrationError as exc:
            yield _blowup_record(exc.t, x)
            return


def _blowup_record(t, x) -> LogRecord:
    nan3 = (math.nan,) * 3
    nan4 = (math.nan,) * 4
    return LogRecord(
        t=t, r=x[0:3], v=x[3:6], q=x[6:10], euler_deg=nan3, omega=x[10:13],
        r_est=nan3, v_est=nan3, q_est=nan4, omega_est=nan3, omega_resid=math.nan,
        r_d=nan3, psi_d=math.nan, q_d=nan4, wrench_cmd=nan4, u_cmd=nan4,
        sat=(False,) * 4, wrench_applied=nan4, status=STATUS_BLOWUP,
    )


def simulate(cfg: ScenarioConfig) -> list[LogRecord]:
    return list(run_scenario(cfg))
