"""Power budget audit and battery runtime estimate.

Computed and published energies are always reported side by side; nothing published is corrected silently.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

from loguru import logger

from .exception import DomainError, PowerTableError
from .model import ModelBase, as_float

MATCH_TOLERANCE_MWH = 0.1
PUBLISHED_TOTAL_MWH = 74213.2
CLAIMED_RUNTIME_MIN = 72.0
CSV_FIELDS = ("name", "voltage_V", "current_mA", "count", "duty_h", "published_mWh")


def _as_count(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class PowerRow(ModelBase):
    name: str
    voltage: float
    current: float
    count: int = 1
    duty_hours: float = 0.5
    published: Optional[float] = None

    __keys__ = {
        "voltage": "voltage_V",
        "current": "current_mA",
        "duty_hours": "duty_h",
        "published": "published_mWh",
    }
    __converter__ = {
        "name": str,
        "voltage": as_float,
        "current": as_float,
        "count": _as_count,
        "duty_hours": as_float,
        "published": lambda value: None if value is None else as_float(value),
    }

    def __post_init__(self):
        if not self.voltage > 0:
            raise ValueError(f"{self.name}: voltage must be positive")
        if not self.current >= 0:
            raise ValueError(f"{self.name}: current must be non-negative")
        if self.count < 1:
            raise ValueError(f"{self.name}: count must be at least 1")
        if not self.duty_hours > 0:
            raise ValueError(f"{self.name}: duty must be positive")

    @property
    def power_mw(self) -> float:
        return self.voltage * self.current * self.count


@dataclass(frozen=True)
class BatteryBank(ModelBase):
    cells_per_pack: int = 4
    pack_capacity: float = 6000.0
    packs_in_series: int = 3
    nominal_cell_voltage: float = 3.7
    derating: float = 1.0

    __keys__ = {"pack_capacity": "pack_capacity_mAh", "nominal_cell_voltage": "nominal_cell_voltage_V"}
    __converter__ = {
        "cells_per_pack": _as_count,
        "pack_capacity": as_float,
        "packs_in_series": _as_count,
        "nominal_cell_voltage": as_float,
        "derating": as_float,
    }

    def __post_init__(self):
        if self.cells_per_pack < 1 or self.packs_in_series < 1:
            raise ValueError("a bank needs at least one cell and one pack")
        if not self.pack_capacity > 0 or not self.nominal_cell_voltage > 0:
            raise ValueError("capacity and cell voltage must be positive")
        if not 0 < self.derating <= 1:
            raise ValueError(f"derating must lie in (0, 1], got {self.derating!r}")

    @property
    def voltage(self) -> float:
        return self.cells_per_pack * self.packs_in_series * self.nominal_cell_voltage

    @property
    def energy_wh(self) -> float:
        # packs in series add voltage, not capacity
        return self.voltage * self.pack_capacity / 1000


def row_energy(row: PowerRow) -> float:
    """Energy in mWh over the row's duty hours."""
    return row.voltage * row.current * row.count * row.duty_hours


@dataclass(frozen=True)
class AuditEntry:
    row: PowerRow
    computed: float
    published: Optional[float]

    @property
    def match(self) -> Optional[bool]:
        if self.published is None:
            return None
        return abs(self.computed - self.published) <= MATCH_TOLERANCE_MWH


@dataclass(frozen=True)
class AuditReport:
    entries: List[AuditEntry]
    computed_total: float
    published_total: Optional[float]
    published_rows_sum: Optional[float]

    @property
    def mismatches(self) -> List[AuditEntry]:
        return [entry for entry in self.entries if entry.match is False]

    @property
    def total_delta(self) -> Optional[float]:
        return None if self.published_total is None else self.computed_total - self.published_total

    @property
    def total_matches(self) -> Optional[bool]:
        delta = self.total_delta
        return None if delta is None else abs(delta) <= MATCH_TOLERANCE_MWH


def audit_table(
    rows: Sequence[PowerRow],
    published_values: Optional[Sequence[Optional[float]]] = None,
    published_total: Optional[float] = PUBLISHED_TOTAL_MWH,
) -> AuditReport:
    if published_values is None:
        published_values = [row.published for row in rows]
    if len(published_values) != len(rows):
        raise PowerTableError("published_mWh", f"{len(published_values)} values for {len(rows)} rows")
    entries = [AuditEntry(row, row_energy(row), value) for row, value in zip(rows, published_values)]
    for entry in entries:
        if entry.match is False:
            logger.warning(f"{entry.row.name}: computed {entry.computed:g} vs published {entry.published:g}")
    published = [value for value in published_values if value is not None]
    return AuditReport(
        entries,
        math.fsum(entry.computed for entry in entries),
        published_total,
        math.fsum(published) if published else None,
    )


def total_power_w(rows: Sequence[PowerRow], use_published: bool = False) -> float:
    """Average draw in W; with ``use_published`` the published energy of a row replaces its V*I*n."""
    res = []
    for row in rows:
        if use_published and row.published is not None:
            res.append(row.published / row.duty_hours)
        else:
            res.append(row.power_mw)
    return math.fsum(res) / 1000


def runtime_estimate(rows: Sequence[PowerRow], bank: BatteryBank, use_published: bool = False) -> float:
    """Minutes the bank sustains the summed row power."""
    power = total_power_w(rows, use_published)
    if not power > 0:
        raise DomainError("total power must be positive to estimate a runtime")
    return 60 * bank.energy_wh * bank.derating / power


def _cell(record: dict, key: str, line: int, convert, optional: bool = False):
    value = (record.get(key) or "").strip()
    if not value:
        if optional:
            return None
        raise PowerTableError(f"row {line}.{key}", "missing value")
    try:
        return convert(value)
    except ValueError as e:
        raise PowerTableError(f"row {line}.{key}", f"cannot read {value!r}") from e


def read_power_rows(path: Union[str, Path]) -> List[PowerRow]:
    """Rows from a CSV with columns ``name, voltage_V, current_mA, count, duty_h[, published_mWh]``."""
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(CSV_FIELDS[:5]) - set(reader.fieldnames or ())
        if missing:
            raise PowerTableError("header", f"missing columns {sorted(missing)}")
        # line 1 is the header
        for line, record in enumerate(reader, start=2):
            name = (record.get("name") or "").strip()
            try:
                rows.append(
                    PowerRow(
                        name,
                        _cell(record, "voltage_V", line, float),
                        _cell(record, "current_mA", line, float),
                        _cell(record, "count", line, int),
                        _cell(record, "duty_h", line, float),
                        _cell(record, "published_mWh", line, float, optional=True),
                    )
                )
            except ValueError as e:
                raise PowerTableError(f"row {line} ({name})", str(e)) from e
    if not rows:
        raise PowerTableError("rows", "the table has no rows")
    return rows


REFERENCE_ROWS = (
    PowerRow("ATMega 2560", 9.0, 50.0, 1, 0.5, 225.0),
    PowerRow("I/O Pins", 5.0, 40.0, 20, 0.5, 2000.0),
    PowerRow("Razor IMU", 3.3, 20.0, 1, 0.5, 33.0),
    PowerRow("GPS Media Tech 3329", 3.3, 48.0, 1, 0.5, 79.2),
    PowerRow("Wireless IP Camera Fascam", 6.0, 1000.0, 1, 0.5, 300.0),
    PowerRow("Xbee Transceiver 2.4Ghz", 3.3, 40.0, 1, 0.5, 66.0),
    PowerRow("Ultrasonic Range Finder XL-Maxsonar EZ1", 5.0, 4.0, 1, 0.5, 10.0),
    PowerRow("Sabertooth Dual 25A Drivers", 5.0, 1500.0, 2, 0.5, 7500.0),
    PowerRow("Drive Motor", 16.0, 1500.0, 4, 0.5, 48000.0),
    PowerRow("Linear Actuator", 12.0, 500.0, 4, 0.5, 12000.0),
    PowerRow("Pololu Driver", 5.0, 500.0, 4, 0.5, 5000.0),
)
