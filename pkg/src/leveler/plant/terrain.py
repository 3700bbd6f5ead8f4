from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Protocol, Tuple, Type, runtime_checkable

import numpy as np

from ..exception import ConfigError
from ..model import ModelBase, Nested, as_float, degrees_to_radians, join_path


@runtime_checkable
class Terrain(Protocol):
    def height(self, x: float, y: float) -> float: ...


def _along(azimuth: float, x: float, y: float) -> float:
    return x * math.cos(azimuth) + y * math.sin(azimuth)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else as_float(value)


@dataclass(frozen=True)
class Flat(ModelBase):
    z: float = 0.0

    __keys__ = {"z": "z_m"}
    __converter__ = {"z": as_float}

    def height(self, x: float, y: float) -> float:
        return self.z


@dataclass(frozen=True)
class Ramp(ModelBase):
    """Constant grade rising along ``azimuth``, optionally limited to ``start``..``end`` metres along it."""

    grade: float
    azimuth: float = 0.0
    start: Optional[float] = None
    end: Optional[float] = None

    __keys__ = {"grade": "grade_deg", "azimuth": "azimuth_deg", "start": "start_m", "end": "end_m"}
    __converter__ = {
        "grade": degrees_to_radians,
        "azimuth": degrees_to_radians,
        "start": _optional_float,
        "end": _optional_float,
    }

    def __post_init__(self):
        if not abs(self.grade) < math.pi / 2:
            raise ValueError(f"grade must lie strictly within +-90 degrees, got {math.degrees(self.grade)}")
        if self.start is not None and self.end is not None and self.end < self.start:
            raise ValueError("ramp end lies before its start")

    def height(self, x: float, y: float) -> float:
        s = _along(self.azimuth, x, y)
        if self.start is not None:
            s = max(s, self.start)
        if self.end is not None:
            s = min(s, self.end)
        return math.tan(self.grade) * (s - (self.start or 0.0))


@dataclass(frozen=True)
class Step(ModelBase):
    rise: float
    edge: float = 0.0
    azimuth: float = 0.0

    __keys__ = {"rise": "height_m", "edge": "edge_m", "azimuth": "azimuth_deg"}
    __converter__ = {"rise": as_float, "edge": as_float, "azimuth": degrees_to_radians}

    def height(self, x: float, y: float) -> float:
        # right-continuous at the edge
        return self.rise if _along(self.azimuth, x, y) >= self.edge else 0.0


@dataclass(frozen=True)
class Sinusoid(ModelBase):
    amplitude: float
    wavelength: float
    azimuth: float = 0.0
    phase: float = 0.0

    __keys__ = {
        "amplitude": "amplitude_m",
        "wavelength": "wavelength_m",
        "azimuth": "azimuth_deg",
        "phase": "phase_deg",
    }
    __converter__ = {
        "amplitude": as_float,
        "wavelength": as_float,
        "azimuth": degrees_to_radians,
        "phase": degrees_to_radians,
    }

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength!r}")

    def height(self, x: float, y: float) -> float:
        s = _along(self.azimuth, x, y)
        return self.amplitude * math.sin(2 * math.pi * s / self.wavelength + self.phase)


def parse_terrain(raw: Any, path: str = "") -> Terrain:
    if not isinstance(raw, dict):
        raise ConfigError(path, f"expected an object, got {type(raw).__name__}")
    kind = raw.get("type")
    if kind not in PRIMITIVES:
        raise ConfigError(join_path(path, "type"), f"unknown terrain {kind!r}, expected {sorted(PRIMITIVES)}")
    body = {k: v for k, v in raw.items() if k != "type"}
    return PRIMITIVES[kind].parse(body, path)


@dataclass(frozen=True)
class Composite(ModelBase):
    parts: Tuple[Terrain, ...] = ()

    __converter__ = {"parts": Nested(parse_terrain, many=True)}

    def height(self, x: float, y: float) -> float:
        return sum(part.height(x, y) for part in self.parts)


PRIMITIVES: Dict[str, Type[ModelBase]] = {
    "flat": Flat,
    "ramp": Ramp,
    "step": Step,
    "sinusoid": Sinusoid,
    "composite": Composite,
}


def is_finite_over(terrain: Terrain, bbox: Tuple[float, float, float, float], spacing: float = 0.05) -> bool:
    """Sample the heightfield on a grid over ``(x_min, x_max, y_min, y_max)``."""
    x_min, x_max, y_min, y_max = bbox
    xs = np.linspace(x_min, x_max, max(2, int(math.ceil((x_max - x_min) / spacing)) + 1))
    ys = np.linspace(y_min, y_max, max(2, int(math.ceil((y_max - y_min) / spacing)) + 1))
    return all(math.isfinite(terrain.height(float(x), float(y))) for x in xs for y in ys)
