from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, NamedTuple, Tuple

from ..model import ModelBase, Nested, as_float, degrees_to_radians


class Pose(NamedTuple):
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class Waypoint(ModelBase):
    x: float
    y: float
    speed: float = 0.0

    __keys__ = {"x": "x_m", "y": "y_m", "speed": "speed_m_s"}
    __converter__ = {"x": as_float, "y": as_float, "speed": as_float}

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"speed must be non-negative, got {self.speed!r}")


class _Segment(NamedTuple):
    start: float
    duration: float
    origin: Waypoint
    dx: float
    dy: float
    heading: float


@dataclass(frozen=True)
class MotionScript(ModelBase):
    """Polyline the rover follows; each waypoint's ``speed`` applies to the leg that ends at it.

    The rover stops at the last waypoint and keeps the heading of the last leg.
    """

    waypoints: Tuple[Waypoint, ...] = (Waypoint(0.0, 0.0),)
    heading: float = 0.0

    __keys__ = {"heading": "heading_deg"}
    __converter__ = {"waypoints": Nested(Waypoint.parse, many=True), "heading": degrees_to_radians}

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("motion script needs at least one waypoint")
        for prev, point in zip(self.waypoints, self.waypoints[1:]):
            if (point.x, point.y) != (prev.x, prev.y) and point.speed <= 0:
                raise ValueError(f"waypoint ({point.x}, {point.y}) is reached with zero speed")

    @cached_property
    def segments(self) -> List[_Segment]:
        res = []
        t = 0.0
        heading = self.heading
        for prev, point in zip(self.waypoints, self.waypoints[1:]):
            dx, dy = point.x - prev.x, point.y - prev.y
            length = math.hypot(dx, dy)
            if length == 0:
                continue
            heading = math.atan2(dy, dx)
            duration = length / point.speed
            res.append(_Segment(t, duration, prev, dx, dy, heading))
            t += duration
        return res

    @property
    def duration(self) -> float:
        """Time at which the last waypoint is reached."""
        if not self.segments:
            return 0.0
        last = self.segments[-1]
        return last.start + last.duration

    def pose_at(self, t: float) -> Pose:
        for seg in self.segments:
            if t < seg.start + seg.duration:
                frac = max(0.0, t - seg.start) / seg.duration
                return Pose(seg.origin.x + frac * seg.dx, seg.origin.y + frac * seg.dy, seg.heading)
        end = self.waypoints[-1]
        heading = self.segments[-1].heading if self.segments else self.heading
        return Pose(end.x, end.y, heading)

    def bounding_box(self, margin: float = 0.0) -> Tuple[float, float, float, float]:
        xs = [p.x for p in self.waypoints]
        ys = [p.y for p in self.waypoints]
        return min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin
