"""Closed-form geometry of one suspension corner.

A bell crank pivots on the chassis; Link 1 is driven by a linear actuator whose fixed pivot sits
a distance ``c`` along the chassis, Link 2 carries the wheel. ``a`` is the unactuated actuator length and
``b`` its extension.
All angles are radians, all lengths metres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Tuple

import numpy as np

from .const import HEIGHT_LIMIT_FRACTION
from .exception import DomainError, GeometryError, OutOfDomainError, OutOfRangeError
from .model import ModelBase, Nested, as_float

HEIGHT_TOLERANCE = 1e-12
EXTENSION_TOLERANCE = 1e-10
MAX_BISECTION_STEPS = 200
MONOTONE_SAMPLES = 512
MAX_TABLE_ERROR = 5e-4


def _finite(name: str, *values: float):
    for value in values:
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class LeverArms(ModelBase):
    l1: float
    l2: float

    __keys__ = {"l1": "l1_m", "l2": "l2_m"}
    __converter__ = {"l1": as_float, "l2": as_float}

    def __post_init__(self):
        if not (math.isfinite(self.l1) and math.isfinite(self.l2)) or self.l1 <= 0 or self.l2 <= 0:
            raise GeometryError(f"lever arms must be positive, got L1={self.l1!r}, L2={self.l2!r}")

    def swapped(self) -> LeverArms:
        return LeverArms(self.l2, self.l1)


@dataclass(frozen=True)
class LinkAngle:
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= math.pi / 2):
            raise OutOfDomainError(f"link angle must lie in (0, pi/2], got {self.alpha!r}")

    @classmethod
    def from_degrees(cls, degrees: float) -> LinkAngle:
        return cls(math.radians(degrees))

    @property
    def beta(self) -> float:
        return math.pi / 2 - self.alpha


@dataclass(frozen=True)
class SuspensionGeometry(ModelBase):
    a: float
    stroke: float
    c: float
    arms: LeverArms
    wheel_radius: float

    __keys__ = {"a": "a_m", "stroke": "stroke_m", "c": "c_m", "wheel_radius": "wheel_radius_m"}
    __converter__ = {
        "a": as_float,
        "stroke": as_float,
        "c": as_float,
        "arms": Nested(LeverArms.parse),
        "wheel_radius": as_float,
    }

    def __post_init__(self):
        for name in ("a", "stroke", "c", "wheel_radius"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise GeometryError(f"{name} must be positive, got {value!r}")
        # b grows with alpha, so the image over (0, pi/2] is (b(0+), b(pi/2)]
        b_low = abs(self.c - self.arms.l1) - self.a
        b_high = extension_for_angle(self, LinkAngle(math.pi / 2))
        if b_high < 0 or b_low >= self.stroke:
            raise GeometryError(
                f"no link angle gives an extension within [0, {self.stroke}] "
                f"(extensions span ({b_low:.6g}, {b_high:.6g}])"
            )

    @property
    def height_limit(self) -> float:
        return HEIGHT_LIMIT_FRACTION * self.arms.l2

    @cached_property
    def monotone_interval(self) -> Tuple[float, float]:
        """Largest [0, h] on which the sampled extension strictly decreases with height."""
        heights = np.linspace(0.0, self.height_limit, MONOTONE_SAMPLES)
        values = np.array([extension_for_height(self, float(h)) for h in heights])
        rising = np.nonzero(np.diff(values) >= 0)[0]
        end = heights[rising[0]] if rising.size else heights[-1]
        return 0.0, float(end)

    @cached_property
    def travel(self) -> Tuple[float, float]:
        """Usable chassis height interval: inside the monotone interval with 0 <= b <= stroke."""
        l1, l2 = self.arms.l1, self.arms.l2
        base = l1 * l1 + self.c * self.c
        scale = l2 / (2 * self.c * l1)
        h_full = (base - (self.a + self.stroke) ** 2) * scale
        h_zero = (base - self.a * self.a) * scale
        return max(0.0, h_full), min(self.monotone_interval[1], h_zero)

    @property
    def has_travel(self) -> bool:
        low, high = self.travel
        return low <= high

    @cached_property
    def extension_limits(self) -> Tuple[float, float]:
        """Extensions matching the travel ends, clipped to the actuator stroke."""
        low, high = self.travel
        return max(0.0, extension_for_height(self, high)), min(self.stroke, extension_for_height(self, low))

    def clamp_height(self, h_prime: float) -> float:
        low, high = self.travel
        return min(max(h_prime, low), high)


def lever_output_force(f1: float, arms: LeverArms) -> float:
    _finite("force", f1)
    return f1 * arms.l1 / arms.l2


def lever_displacement_ratio(arms: LeverArms) -> float:
    """Small-rotation ratio of the arm end displacements; finite rotations go through the exact map."""
    return arms.l1 / arms.l2


def linkage_triangle(geom: SuspensionGeometry, angle: LinkAngle) -> Tuple[float, float]:
    """Height ``h`` of the Link 1 end above the chassis and its offset ``x`` from the actuator pivot."""
    l1 = geom.arms.l1
    return l1 * math.sin(angle.alpha), geom.c - l1 * math.cos(angle.alpha)


def extension_for_angle(geom: SuspensionGeometry, angle: LinkAngle) -> float:
    h, x = linkage_triangle(geom, angle)
    return math.sqrt(h * h + x * x) - geom.a


def angle_for_height(geom: SuspensionGeometry, h_prime: float) -> LinkAngle:
    _finite("height", h_prime)
    l2 = geom.arms.l2
    if h_prime < 0 or abs(h_prime) >= l2:
        raise OutOfDomainError(f"height exceeds Link 2 reach: h'={h_prime!r}, L2={l2!r}")
    return LinkAngle(math.pi / 2 - math.asin(h_prime / l2))


def extension_for_height(geom: SuspensionGeometry, h_prime: float) -> float:
    return extension_for_angle(geom, angle_for_height(geom, h_prime))


def extension_range(geom: SuspensionGeometry) -> Tuple[float, float]:
    """Open-closed image (b_min, b_max] of the extension over heights in [0, L2)."""
    return abs(geom.c - geom.arms.l1) - geom.a, extension_for_height(geom, 0.0)


@lru_cache(maxsize=8192)
def height_for_extension(geom: SuspensionGeometry, b: float) -> float:
    _finite("extension", b)
    b_min, b_max = extension_range(geom)
    if b > b_max + EXTENSION_TOLERANCE or b <= b_min:
        raise OutOfRangeError(f"extension {b!r} is not reachable", b_min, b_max)
    if b >= b_max:
        return 0.0
    l1, l2 = geom.arms.l1, geom.arms.l2
    lo, hi = 0.0, l2
    for _ in range(MAX_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        alpha = math.pi / 2 - math.asin(min(mid / l2, 1.0))
        h, x = l1 * math.sin(alpha), geom.c - l1 * math.cos(alpha)
        value = math.sqrt(h * h + x * x) - geom.a
        if value == b:
            return mid
        if value > b:
            lo = mid
        else:
            hi = mid
        if hi - lo <= HEIGHT_TOLERANCE:
            break
    return 0.5 * (lo + hi)


class ExtensionTable:
    """Precomputed height -> extension map over the geometry travel, linearly interpolated."""

    def __init__(self, geom: SuspensionGeometry, points: int = 256):
        if points < 2:
            raise GeometryError("lookup table needs at least two points")
        if not geom.has_travel:
            raise GeometryError("geometry has no usable travel")
        low, high = geom.travel
        self.geometry = geom
        self.heights = np.linspace(low, high, points)
        self.extensions = np.array([extension_for_height(geom, float(h)) for h in self.heights])
        self.max_error = self._measure_error(points * 4)
        if self.max_error >= MAX_TABLE_ERROR:
            raise GeometryError(f"lookup table error {self.max_error:.3g} m exceeds {MAX_TABLE_ERROR} m")

    def _measure_error(self, samples: int) -> float:
        grid = np.linspace(self.heights[0], self.heights[-1], samples)
        exact = np.array([extension_for_height(self.geometry, float(h)) for h in grid])
        return float(np.max(np.abs(np.interp(grid, self.heights, self.extensions) - exact)))

    def extension(self, h_prime: float) -> float:
        return float(np.interp(h_prime, self.heights, self.extensions))


# placeholder linkage: only the 4 inch stroke is a published figure
DEFAULT_GEOMETRY = SuspensionGeometry(0.17, 0.1016, 0.25, LeverArms(0.12, 0.25), 0.10)
