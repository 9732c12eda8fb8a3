"""Summary statistics over the hover window of a run log."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from fwmav.harness.logio import STATUS_OK, LogRecord


class EmptyWindowError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsSummary:
    window_start: float
    n_ticks: int
    max_abs_e1: float
    max_abs_e2: float
    max_abs_e3: float
    roll_min_deg: float
    roll_max_deg: float
    pitch_min_deg: float
    pitch_max_deg: float
    saturation_duty: float
    final_error: float
    status: str

    def as_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        width = max(len(k) for k in self.as_dict())
        lines = []
        for k, v in self.as_dict().items():
            lines.append(f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
        return "\n".join(lines)


def compute_metrics(log: list[LogRecord], settle_time: float = 1.0) -> MetricsSummary:
    """Maxima of position error and attitude excursions for ``t >= settle_time``.

    Position error is true position minus setpoint. A trailing abort record
    (no setpoint) is excluded from the statistics but its status is reported.
    """
    if not log:
        raise EmptyWindowError("log is empty")
    status = log[-1].status
    rows = [rec for rec in log if rec.t >= settle_time and rec.status == STATUS_OK]
    if not rows:
        raise EmptyWindowError(f"no records at t >= {settle_time} s")
    err = np.array([rec.r for rec in rows]) - np.array([rec.r_d for rec in rows])
    euler = np.array([rec.euler_deg for rec in rows])
    sat = np.array([rec.saturated for rec in rows])
    emax = np.max(np.abs(err), axis=0)
    return MetricsSummary(
        window_start=float(settle_time),
        n_ticks=len(rows),
        max_abs_e1=float(emax[0]),
        max_abs_e2=float(emax[1]),
        max_abs_e3=float(emax[2]),
        roll_min_deg=float(euler[:, 0].min()),
        roll_max_deg=float(euler[:, 0].max()),
        pitch_min_deg=float(euler[:, 1].min()),
        pitch_max_deg=float(euler[:, 1].max()),
        saturation_duty=float(sat.mean()),
        final_error=float(np.linalg.norm(err[-1])),
        status=status,
    )
