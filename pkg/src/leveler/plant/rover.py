"""Quasi-static chassis: four corners on the terrain, attitude re-derived from corner heights every tick."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from loguru import logger

from ..const import Corner
from ..exception import DomainError
from ..kinematics import SuspensionGeometry, height_for_extension
from ..model import Attitude, ModelBase, as_float, quad
from .actuator import ActuatorState, step_actuator
from .motion import Pose
from .terrain import Terrain


@dataclass(frozen=True)
class ChassisLayout(ModelBase):
    wheelbase: float = 0.6
    track: float = 0.5

    __keys__ = {"wheelbase": "wheelbase_m", "track": "track_m"}
    __converter__ = {"wheelbase": as_float, "track": as_float}

    def __post_init__(self):
        if not self.wheelbase > 0 or not self.track > 0:
            raise ValueError(f"wheelbase and track must be positive, got {self.wheelbase!r}, {self.track!r}")

    def corner_offset(self, corner: Corner) -> Tuple[float, float]:
        """Wheel centre in the chassis frame: x forward, y to the left."""
        half_w, half_t = self.wheelbase / 2, self.track / 2
        return {
            Corner.FRONT_LEFT: (half_w, half_t),
            Corner.REAR_LEFT: (-half_w, half_t),
            Corner.REAR_RIGHT: (-half_w, -half_t),
            Corner.FRONT_RIGHT: (half_w, -half_t),
        }[corner]

    def corner_position(self, pose: Pose, corner: Corner) -> Tuple[float, float]:
        dx, dy = self.corner_offset(corner)
        cos_h, sin_h = math.cos(pose.heading), math.sin(pose.heading)
        return pose.x + dx * cos_h - dy * sin_h, pose.y + dx * sin_h + dy * cos_h


def chassis_attitude_from_heights(heights: Sequence[float], layout: ChassisLayout) -> Attitude:
    h1, h2, h3, h4 = quad(heights)
    if not all(math.isfinite(h) for h in (h1, h2, h3, h4)):
        raise DomainError(f"corner heights must be finite, got {(h1, h2, h3, h4)!r}")
    roll = math.atan(((h1 + h2) / 2 - (h4 + h3) / 2) / layout.track)
    pitch = math.atan(((h1 + h4) / 2 - (h2 + h3) / 2) / layout.wheelbase)
    return Attitude(pitch, roll)


def corner_height(
    terrain: Terrain,
    pose: Pose,
    corner: Corner,
    b: float,
    geom: SuspensionGeometry,
    layout: ChassisLayout,
) -> float:
    x, y = layout.corner_position(pose, corner)
    return terrain.height(x, y) + geom.wheel_radius + height_for_extension(geom, b)


@dataclass(frozen=True)
class RoverState:
    t: float
    pose: Pose
    actuators: Tuple[ActuatorState, ActuatorState, ActuatorState, ActuatorState]
    attitude: Attitude
    attitude_rate: Tuple[float, float]
    clearance: float

    @property
    def extensions(self) -> Tuple[float, float, float, float]:
        return quad([a.extension for a in self.actuators])

    @property
    def pot_readings(self) -> Tuple[float, float, float, float]:
        return quad([a.pot_reading for a in self.actuators])


class Rover:
    """The ground-truth plant. ``step`` moves the actuators, then the pose, then re-derives attitude."""

    state: RoverState

    def __init__(
        self,
        terrain: Terrain,
        layout: ChassisLayout,
        geometries: Sequence[SuspensionGeometry],
        actuators: Sequence[ActuatorState],
        pose: Pose,
        t: float = 0.0,
    ):
        if len(geometries) != 4 or len(actuators) != 4:
            raise ValueError("a rover has exactly four corners")
        self.terrain = terrain
        self.layout = layout
        self.geometries = tuple(geometries)
        attitude, clearance = self.measure(pose, actuators)
        self.state = RoverState(t, pose, tuple(actuators), attitude, (0.0, 0.0), clearance)  # type: ignore

    def corner_heights(self, pose: Pose, actuators: Sequence[ActuatorState]) -> Tuple[float, ...]:
        return tuple(
            corner_height(self.terrain, pose, c, actuators[c].extension, self.geometries[c], self.layout)
            for c in Corner
        )

    def measure(self, pose: Pose, actuators: Sequence[ActuatorState]) -> Tuple[Attitude, float]:
        heights = self.corner_heights(pose, actuators)
        attitude = chassis_attitude_from_heights(heights, self.layout)
        clearance = sum(heights) / 4 - self.terrain.height(pose.x, pose.y)
        return attitude, clearance

    def step(self, commands: Sequence[float], dt: float, t: float, pose: Pose) -> RoverState:
        """Advance to time ``t`` (``dt`` after the current state) with new actuator commands."""
        prev = self.state
        actuators = tuple(step_actuator(a.command(b), dt) for a, b in zip(prev.actuators, quad(commands)))
        attitude, clearance = self.measure(pose, actuators)
        rate = ((attitude.pitch - prev.attitude.pitch) / dt, (attitude.roll - prev.attitude.roll) / dt)
        self.state = RoverState(t, pose, actuators, attitude, rate, clearance)  # type: ignore
        logger.trace(f"t={t:.4f} pitch={attitude.pitch:.6f} roll={attitude.roll:.6f} clear={clearance:.6f}")
        return self.state
