"""Run the built-in hover scenarios, write their CSV logs and print metrics.

    python3 scripts/run_scenarios.py --out runs/ [--seed 3] [--scenario beeplus_position]
"""
import argparse
import json
import time
from pathlib import Path

from fwmav.harness import compute_metrics, default_config, simulate, write_config, write_log
from fwmav.harness.scenarios import list_scenarios

NAMED = [name for name, _ in list_scenarios() if name != "custom"]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", default="runs", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scenario", action="append", choices=NAMED,
                        help="run only these scenarios (repeatable)")
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in args.scenario or NAMED:
        cfg = default_config(name).replace("sim", seed=args.seed)
        t0 = time.perf_counter()
        log = simulate(cfg)
        elapsed = time.perf_counter() - t0
        write_config(cfg, out / f"{name}.cfg")
        write_log(log, out / f"{name}.csv", {"scenario": name, "seed": args.seed,
                                             "settle_time": repr(cfg.sim.settle_time)})
        m = compute_metrics(log, cfg.sim.settle_time)
        summary[name] = {**m.as_dict(), "wall_time_s": round(elapsed, 2)}
        print(f"== {name} ({elapsed:.1f} s wall)")
        print(m.format())
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
