"""Built-in scenarios.

Masses (75 mg and 95 mg), the 2 kHz / 500 Hz loop rates, the 100 Hz
flapping drive and the run durations come from the hover experiments.
Inertias, mixing coefficients, gains, noise levels, ripple amplitudes,
setpoints and safety boxes are simulation choices, not measured values.
"""
from __future__ import annotations

from fwmav.harness.config import (
    BeePlusMixSection,
    ControlSection,
    EstimationSection,
    GainsSection,
    RoboBeeMixSection,
    RobotSection,
    ScenarioConfig,
    SetpointEntry,
    SimSection,
)

ROBOBEE_MASS = 75e-6
BEEPLUS_MASS = 95e-6
INERTIA = (1.42e-9, 1.34e-9, 0.45e-9)
HOVER_ALTITUDE = 0.3

DESCRIPTIONS = {
    "robobee_hover": "RoboBee takes off from the origin and hovers at 0.3 m for 20 s, yaw open loop",
    "beeplus_altitude_attitude": "Bee+ altitude-only control with level attitude for 5 s, yaw open loop",
    "beeplus_position": "Bee+ takes off and holds position at 0.3 m for 2 s, yaw open loop",
    "custom": "user-defined; starts from the defaults of sim.robot",
}


def design_gains(mass, inertia, att_bw=30.0, att_zeta=0.8, pos_bw=8.0, pos_zeta=0.9,
                 ki_ratio=0.25, integral_frac=0.3, gravity=9.81) -> GainsSection:
    """Pole-placement style starting gains.

    Small-angle attitude error is ``n_e ~ theta / 2``, so the attitude
    stiffness is ``K1 / 2`` per radian. The position loop is a PID on a
    point mass with the integral pole at ``ki_ratio * pos_bw``.
    """
    J = inertia
    K1 = tuple(2.0 * j * att_bw ** 2 for j in J)
    K2 = tuple(2.0 * att_zeta * att_bw * j for j in J)
    kp = mass * pos_bw ** 2
    kd = 2.0 * pos_zeta * mass * pos_bw
    ki = ki_ratio * pos_bw * kp
    lim = integral_frac * mass * gravity
    return GainsSection(K1=K1, K2=K2, Kp=(kp,) * 3, Kd=(kd,) * 3, Ki=(ki,) * 3,
                        integral_limit=(lim,) * 3)


def robobee_mix(mass, gravity=9.81) -> RoboBeeMixSection:
    # Hover thrust at half of the amplitude limit.
    return RoboBeeMixSection(k_amp=mass * gravity / 0.5, k_roll=2.0e-6, k_pitch=2.0e-6, k_yaw=2.0e-7,
                             limits=(1.0, 1.0, 1.0, 1.0))


def beeplus_mix(mass, gravity=9.81, v_max=1.0) -> BeePlusMixSection:
    # Hover at v_i = v_max / 2 on every wing.
    k_f = mass * gravity / (2.0 * v_max)
    return BeePlusMixSection(k_f=k_f, k_s=0.2 * k_f, d1=4.0e-3, d2=4.0e-3, d3=4.0e-3, v_max=v_max)


def _robot_defaults(robot: str) -> ScenarioConfig:
    # Ripple torque on pitch only: in-phase roll and pitch ripple on an
    # asymmetric body rectifies into a steady yaw torque, and yaw is open loop.
    if robot == "robobee":
        mass = ROBOBEE_MASS
        ripple = (0.0, 1.0e-5, 0.0)
    else:
        mass = BEEPLUS_MASS
        ripple = (0.0, 5.0e-6, 0.0)
    return ScenarioConfig(
        sim=SimSection(scenario="custom", robot=robot, duration=5.0),
        robot=RobotSection(mass=mass, inertia=INERTIA, flap_freq=100.0,
                           ripple_torque_amp=ripple, ripple_force_amp=0.3 * mass * 9.81),
        robobee_mix=robobee_mix(ROBOBEE_MASS),
        beeplus_mix=beeplus_mix(BEEPLUS_MASS),
        gains=design_gains(mass, INERTIA),
        control=ControlSection(yaw_mode="open_loop"),
        estimation=EstimationSection(lam=50.0, pos_sigma=5e-4, angle_sigma=0.01),
        setpoints=(SetpointEntry(t=0.0, r_d=(0.0, 0.0, HOVER_ALTITUDE)),),
    )


_SCENARIO_ROBOT = {"robobee_hover": "robobee", "beeplus_altitude_attitude": "beeplus",
                   "beeplus_position": "beeplus", "custom": "robobee"}


def default_config(scenario: str = "robobee_hover", robot: str | None = None) -> ScenarioConfig:
    """Default config of a scenario, optionally on a different robot's defaults."""
    if scenario not in _SCENARIO_ROBOT:
        raise KeyError(f"unknown scenario {scenario!r}")
    cfg = _robot_defaults(robot or _SCENARIO_ROBOT[scenario])
    if scenario == "robobee_hover":
        return cfg.replace("sim", scenario=scenario, duration=20.0, settle_time=1.0)
    if scenario == "beeplus_altitude_attitude":
        cfg = cfg.replace("control", altitude_only=True)
        return cfg.replace("sim", scenario=scenario, duration=5.0, settle_time=1.0)
    if scenario == "beeplus_position":
        return cfg.replace("sim", scenario=scenario, duration=2.0, settle_time=0.3)
    return cfg


def list_scenarios() -> list[tuple[str, str]]:
    return list(DESCRIPTIONS.items())

