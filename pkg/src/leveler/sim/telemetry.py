from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from ..const import Phase
from ..estimation import Estimate, ImuSample
from ..exception import ConfigError
from ..model import ModelBase

PathLike = Union[str, Path]


@dataclass(frozen=True)
class TelemetryRecord:
    t: float
    true_pitch: float
    true_roll: float
    est_pitch: float
    est_roll: float
    clearance: float
    b1: float
    b2: float
    b3: float
    b4: float
    pot1: float
    pot2: float
    pot3: float
    pot4: float
    phase: Phase
    sat1: bool
    sat2: bool
    sat3: bool
    sat4: bool

    @property
    def saturated(self) -> Tuple[bool, bool, bool, bool]:
        return self.sat1, self.sat2, self.sat3, self.sat4


HEADER = tuple(fd.name for fd in fields(TelemetryRecord))
IMU_HEADER = ("t", "ax", "ay", "az", "gx", "gy", "gz")
ESTIMATE_HEADER = ("t", "pitch_rad", "roll_rad", "pitch_raw", "roll_raw", "bias_pitch", "bias_roll")


def format_float(value: float) -> str:
    return f"{value:.17g}"


def _format(value) -> str:
    if isinstance(value, Phase):
        return value.value
    if isinstance(value, bool):
        return "1" if value else "0"
    return format_float(value)


def write_telemetry(records: Iterable[TelemetryRecord], out: TextIO):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for record in records:
        writer.writerow([_format(getattr(record, name)) for name in HEADER])


def save_telemetry(records: Iterable[TelemetryRecord], path: PathLike):
    with open(path, "w", newline="", encoding="utf-8") as f:
        write_telemetry(records, f)


def _parse_record(row: Dict[str, str]) -> TelemetryRecord:
    values = {}
    for fd in fields(TelemetryRecord):
        raw = row[fd.name]
        if fd.name == "phase":
            values[fd.name] = Phase(raw)
        elif fd.name.startswith("sat"):
            values[fd.name] = raw == "1"
        else:
            values[fd.name] = float(raw)
    return TelemetryRecord(**values)


def read_telemetry(path: PathLike) -> List[TelemetryRecord]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != HEADER:
            raise ConfigError(str(path), "telemetry header does not match the record layout")
        try:
            return [_parse_record(row) for row in reader]
        except (KeyError, ValueError) as e:
            raise ConfigError(f"{path}:{reader.line_num}", str(e)) from e


@dataclass(frozen=True)
class SummaryReport(ModelBase):
    ticks: int
    end_time: float
    settle_time: Optional[float]
    max_abs_pitch: float
    max_abs_roll: float
    max_estimation_error: float
    steady_pitch: float
    steady_roll: float
    steady_clearance_error: float
    saturation_ticks: Tuple[int, int, int, int]
    phase_ticks: Dict[str, int]

    __keys__ = {
        "end_time": "end_time_s",
        "settle_time": "settle_time_s",
        "max_abs_pitch": "max_abs_pitch_rad",
        "max_abs_roll": "max_abs_roll_rad",
        "max_estimation_error": "max_estimation_error_rad",
        "steady_pitch": "steady_abs_pitch_rad",
        "steady_roll": "steady_abs_roll_rad",
        "steady_clearance_error": "steady_clearance_error_m",
    }


def summarize(
    records: Sequence[TelemetryRecord],
    pitch_deadband: float,
    roll_deadband: float,
    clearance_setpoint: float,
    steady_window: float = 10.0,
) -> SummaryReport:
    """Statistics that depend only on the telemetry fields, so a CSV read back summarises identically."""
    if not records:
        raise ValueError("no telemetry to summarise")
    t = np.array([r.t for r in records])
    pitch = np.array([r.true_pitch for r in records])
    roll = np.array([r.true_roll for r in records])
    est_error = np.maximum(
        np.abs(np.array([r.est_pitch for r in records]) - pitch),
        np.abs(np.array([r.est_roll for r in records]) - roll),
    )
    clearance = np.array([r.clearance for r in records])

    outside = np.nonzero((np.abs(pitch) > pitch_deadband) | (np.abs(roll) > roll_deadband))[0]
    if outside.size == 0:
        settle_time: Optional[float] = float(t[0])
    elif outside[-1] + 1 < len(records):
        settle_time = float(t[outside[-1] + 1])
    else:
        settle_time = None

    steady = t >= t[-1] - steady_window
    phases = {phase.value: 0 for phase in Phase}
    for record in records:
        phases[record.phase.value] += 1
    saturation = [sum(1 for r in records if r.saturated[i]) for i in range(4)]
    return SummaryReport(
        len(records),
        float(t[-1]),
        settle_time,
        float(np.max(np.abs(pitch))),
        float(np.max(np.abs(roll))),
        float(np.max(est_error)),
        float(np.mean(np.abs(pitch[steady]))),
        float(np.mean(np.abs(roll[steady]))),
        float(np.mean(np.abs(clearance[steady] - clearance_setpoint))),
        tuple(saturation),  # type: ignore
        phases,
    )


def read_imu_samples(path: PathLike, full_scale: Optional[float] = None) -> List[ImuSample]:
    """IMU rows as samples; with ``full_scale`` every count must lie in [0, full_scale]."""
    res = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(IMU_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(str(path), f"missing columns {sorted(missing)}")
        for row in reader:
            try:
                values = [float(row[key]) for key in IMU_HEADER]
            except ValueError as e:
                raise ConfigError(f"{path}:{reader.line_num}", str(e)) from e
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(f"{path}:{reader.line_num}", "non-finite value")
            if full_scale is not None and not all(0.0 <= v <= full_scale for v in values[1:]):
                raise ConfigError(f"{path}:{reader.line_num}", f"counts outside [0, {full_scale:g}]")
            t, ax, ay, az, gx, gy, gz = values
            res.append(ImuSample(t, (ax, ay, az), (gx, gy, gz)))
    return res


def write_estimates(estimates: Iterable[Estimate], out: TextIO):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ESTIMATE_HEADER)
    for est in estimates:
        writer.writerow(
            [
                format_float(v)
                for v in (
                    est.t,
                    est.attitude.pitch,
                    est.attitude.roll,
                    est.measured.pitch,
                    est.measured.roll,
                    est.bias_pitch,
                    est.bias_roll,
                )
            ]
        )
