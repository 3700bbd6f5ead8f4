from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from ..const import GRAVITY
from ..exception import DomainError
from ..kinematics import SuspensionGeometry, extension_for_height, lever_output_force
from ..model import ModelBase, as_float


def _optional_float(value) -> Optional[float]:
    return None if value is None else as_float(value)


@dataclass(frozen=True)
class ActuatorSpec(ModelBase):
    """Load-vs-speed parameters of one linear actuator; ``load`` overrides the mass-derived static load."""

    no_load_speed: float = 0.0127
    max_load: float = 1000.0
    load: Optional[float] = None

    __keys__ = {"no_load_speed": "no_load_speed_m_s", "max_load": "max_load_N", "load": "load_N"}
    __converter__ = {"no_load_speed": as_float, "max_load": as_float, "load": _optional_float}

    def __post_init__(self):
        if not self.no_load_speed > 0 or not self.max_load > 0:
            raise ValueError("actuator speed and maximum load must be positive")
        if self.load is not None and self.load < 0:
            raise ValueError(f"actuator load must be non-negative, got {self.load!r}")


@dataclass(frozen=True)
class ActuatorState:
    extension: float
    target: float
    stroke: float
    no_load_speed: float
    max_load: float
    load: float
    pot_reading: float

    @classmethod
    def at(cls, extension: float, stroke: float, spec: ActuatorSpec, load: float) -> ActuatorState:
        extension = min(max(extension, 0.0), stroke)
        return cls(extension, extension, stroke, spec.no_load_speed, spec.max_load, load, extension / stroke)

    @property
    def speed(self) -> float:
        return self.no_load_speed * max(0.0, 1.0 - self.load / self.max_load)

    def command(self, target: float) -> ActuatorState:
        return replace(self, target=target)


def static_load(geom: SuspensionGeometry, mass: float) -> float:
    """Force on one actuator when a quarter of the rover weight rests on Link 2."""
    return lever_output_force(mass * GRAVITY / 4, geom.arms.swapped())


def make_actuator(geom: SuspensionGeometry, spec: ActuatorSpec, mass: float, h_prime: float) -> ActuatorState:
    load = spec.load if spec.load is not None else static_load(geom, mass)
    return ActuatorState.at(extension_for_height(geom, h_prime), geom.stroke, spec, load)


def step_actuator(state: ActuatorState, dt: float) -> ActuatorState:
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    target = min(max(state.target, 0.0), state.stroke)
    reach = state.speed * dt
    gap = target - state.extension
    if abs(gap) <= reach:
        extension = target
    else:
        extension = state.extension + math.copysign(reach, gap)
    extension = min(max(extension, 0.0), state.stroke)
    return replace(state, extension=extension, pot_reading=extension / state.stroke)
