"""Sweep Bee+ wing-amplitude headroom in the position scenario.

For each v_max the script reports saturation duty inside the metrics
window and over the whole run, lateral error and pitch excursion. It is
the evidence behind the reduced-headroom acceptance check.

    python3 scripts/saturation_study.py [--vmax 1.0 0.85 0.7 0.6] [--duration 2.0]
"""
import argparse

import numpy as np

from fwmav.harness import compute_metrics, default_config, simulate
from fwmav.harness.config import with_overrides


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--vmax", type=float, nargs="+", default=[1.0, 0.85, 0.7, 0.6, 0.55])
    parser.add_argument("--duration", type=float, default=2.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    base = default_config("beeplus_position").replace("sim", duration=args.duration, seed=args.seed)
    v_hover = base.robot.mass * base.robot.gravity / (4.0 * base.beeplus_mix.k_f)
    print(f"hover command {v_hover:.3f}; metrics window t >= {base.sim.settle_time:g} s")
    print(f"{'v_max':>6} {'headroom':>9} {'duty_win':>9} {'duty_all':>9} {'max|e1|_m':>10} "
          f"{'max|e3|_m':>10} {'pitch_deg':>15} {'status':>11}")
    for v_max in args.vmax:
        cfg = with_overrides(base, [f"beeplus_mix.v_max={v_max!r}"])
        log = simulate(cfg)
        m = compute_metrics(log, cfg.sim.settle_time)
        duty_all = float(np.mean([r.saturated for r in log]))
        headroom = (v_max - v_hover) / (base.beeplus_mix.v_max - v_hover)
        print(f"{v_max:6.3f} {headroom:9.2f} {m.saturation_duty:9.3f} {duty_all:9.3f} {m.max_abs_e1:10.5f} "
              f"{m.max_abs_e3:10.4f} {m.pitch_min_deg:7.2f},{m.pitch_max_deg:6.2f} {m.status:>11}")


if __name__ == "__main__":
    main()
