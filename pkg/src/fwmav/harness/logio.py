"""Per-tick log records and their CSV form."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, fields

import numpy as np

LOG_VERSION = 1
HEADER_PREFIX = "# fwmav-log"

STATUS_OK = "ok"
STATUS_BLOWUP = "blowup"
STATUS_SAFETY = "safety_exit"


@dataclass(frozen=True)
class LogRecord:
    t: float
    r: tuple
    v: tuple
    q: tuple
    # Z-Y-X Euler angles (roll, pitch, yaw), degrees; reporting only.
    euler_deg: tuple
    omega: tuple
    r_est: tuple
    v_est: tuple
    q_est: tuple
    omega_est: tuple
    # Scalar part of 2 q^-1 * filtered q'; ideally 0.
    omega_resid: float
    r_d: tuple
    psi_d: float
    q_d: tuple
    wrench_cmd: tuple
    # Actuator commands: (amp, roll, pitch, yaw) for RoboBee, (v1..v4) for Bee+.
    u_cmd: tuple
    sat: tuple
    wrench_applied: tuple
    status: str = STATUS_OK

    @property
    def saturated(self) -> bool:
        return any(self.sat)


# (field, column names); the order defines the CSV layout.
_COLUMNS = (
    ("t", ("t_s",)),
    ("r", ("r1_m", "r2_m", "r3_m")),
    ("v", ("v1_mps", "v2_mps", "v3_mps")),
    ("q", ("qw", "qx", "qy", "qz")),
    ("euler_deg", ("roll_deg", "pitch_deg", "yaw_deg")),
    ("omega", ("w1_radps", "w2_radps", "w3_radps")),
    ("r_est", ("r1_est_m", "r2_est_m", "r3_est_m")),
    ("v_est", ("v1_est_mps", "v2_est_mps", "v3_est_mps")),
    ("q_est", ("qw_est", "qx_est", "qy_est", "qz_est")),
    ("omega_est", ("w1_est_radps", "w2_est_radps", "w3_est_radps")),
    ("omega_resid", ("w0_resid_radps",)),
    ("r_d", ("r1_d_m", "r2_d_m", "r3_d_m")),
    ("psi_d", ("psi_d_rad",)),
    ("q_d", ("qw_d", "qx_d", "qy_d", "qz_d")),
    ("wrench_cmd", ("f_cmd_N", "tau1_cmd_Nm", "tau2_cmd_Nm", "tau3_cmd_Nm")),
    ("u_cmd", ("u1_cmd", "u2_cmd", "u3_cmd", "u4_cmd")),
    ("sat", ("sat1", "sat2", "sat3", "sat4")),
    ("wrench_applied", ("f_app_N", "tau1_app_Nm", "tau2_app_Nm", "tau3_app_Nm")),
    ("status", ("status",)),
)
COLUMNS = tuple(c for _, cols in _COLUMNS for c in cols)

assert [f.name for f in fields(LogRecord)] == [name for name, _ in _COLUMNS]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    # Shortest positional text that round-trips to the same double.
    return np.format_float_positional(float(x), unique=True, trim="-")


def header_line(meta: dict | None = None) -> str:
    parts = [f"{HEADER_PREFIX} v{LOG_VERSION}", "euler=ZYX(yaw-pitch-roll)"]
    for k, v in (meta or {}).items():
        parts.append(f"{k}={v}")
    return " ".join(parts)


def record_to_row(rec: LogRecord) -> str:
    out = []
    for name, cols in _COLUMNS:
        value = getattr(rec, name)
        if len(cols) == 1:
            out.append(_fmt(value))
        else:
            out.extend(_fmt(v) for v in value)
    return ",".join(out)


def write_log(records, fh_or_path, meta: dict | None = None) -> None:
    """Write records as CSV: one comment line, one header row, one row per tick."""
    if isinstance(fh_or_path, (str, bytes)) or hasattr(fh_or_path, "__fspath__"):
        with open(fh_or_path, "w", encoding="utf-8", newline="") as fh:
            write_log(records, fh, meta)
        return
    fh = fh_or_path
    fh.write(header_line(meta) + "\n")
    fh.write(",".join(COLUMNS) + "\n")
    for rec in records:
        fh.write(record_to_row(rec) + "\n")


def dumps_log(records, meta: dict | None = None) -> str:
    buf = io.StringIO()
    write_log(records, buf, meta)
    return buf.getvalue()


class LogFormatError(ValueError):
    pass


def _parse_row(values: list[str], lineno: int) -> LogRecord:
    if len(values) != len(COLUMNS):
        raise LogFormatError(f"line {lineno}: expected {len(COLUMNS)} columns, got {len(values)}")
    kwargs = {}
    i = 0
    for name, cols in _COLUMNS:
        chunk = values[i:i + len(cols)]
        i += len(cols)
        if name == "status":
            kwargs[name] = chunk[0]
        elif name == "sat":
            kwargs[name] = tuple(v == "1" for v in chunk)
        elif len(cols) == 1:
            kwargs[name] = float(chunk[0])
        else:
            kwargs[name] = tuple(float(v) for v in chunk)
    return LogRecord(**kwargs)


def read_log(path) -> tuple[list[LogRecord], dict]:
    """Read a CSV log; returns (records, header metadata)."""
    meta: dict = {}
    records = []
    with open(path, encoding="utf-8") as fh:
        header_seen = False
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith(HEADER_PREFIX):
                    for token in line.split()[2:]:
                        if "=" in token:
                            k, v = token.split("=", 1)
                            meta[k] = v
                continue
            if not header_seen:
                if tuple(line.split(",")) != COLUMNS:
                    raise LogFormatError(f"line {lineno}: unexpected column header")
                header_seen = True
                continue
            try:
                records.append(_parse_row(line.split(","), lineno))
            except ValueError as exc:
                raise LogFormatError(f"line {lineno}: {exc}") from None
    if not header_seen:
        raise LogFormatError("missing column header")
    return records, meta


def finite_or_nan(values) -> tuple:
    return tuple(v if math.isfinite(v) else math.nan for v in values)
