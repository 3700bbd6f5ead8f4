"""Roll-first chassis leveling.

Each tick corrects at most one thing, in order of priority: roll, then pitch, then ground clearance.
Targets are chassis heights ``h'`` per corner; the inner loop turns them into actuator extensions and
tracks them with a proportional law against the potentiometer feedback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple
from typing_extensions import TypeAlias

from loguru import logger

from .const import FRONT, LEFT, REAR, RIGHT, Corner, CorrectionMode, Phase
from .exception import OutOfDomainError
from .kinematics import (
    DEFAULT_GEOMETRY,
    ExtensionTable,
    SuspensionGeometry,
    extension_for_height,
    height_for_extension,
)
from .model import Attitude, ModelBase, Nested, as_float, degrees_to_radians, quad
from .plant.rover import ChassisLayout

SATURATION_TOLERANCE = 1e-12

Quad: TypeAlias = Tuple[float, float, float, float]


def _optional_points(value) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class ControllerConfig(ModelBase):
    roll_deadband: float = math.radians(1.0)
    pitch_deadband: float = math.radians(1.0)
    clearance_setpoint: float = 0.2
    clearance_deadband: float = 0.005
    inner_gain: float = 5.0
    tick_dt: float = 0.01
    corners: Tuple[SuspensionGeometry, ...] = (DEFAULT_GEOMETRY,) * 4
    layout: ChassisLayout = field(default_factory=ChassisLayout)
    correction_mode: CorrectionMode = CorrectionMode.SYMMETRIC
    lookup_points: Optional[int] = None

    __keys__ = {
        "roll_deadband": "roll_deadband_deg",
        "pitch_deadband": "pitch_deadband_deg",
        "clearance_setpoint": "clearance_setpoint_m",
        "clearance_deadband": "clearance_deadband_m",
        "inner_gain": "inner_gain_per_s",
        "tick_dt": "tick_dt_s",
    }
    __converter__ = {
        "roll_deadband": degrees_to_radians,
        "pitch_deadband": degrees_to_radians,
        "clearance_setpoint": as_float,
        "clearance_deadband": as_float,
        "inner_gain": as_float,
        "tick_dt": as_float,
        "corners": Nested(SuspensionGeometry.parse, many=True, size=4),
        "layout": Nested(ChassisLayout.parse),
        "correction_mode": CorrectionMode,
        "lookup_points": _optional_points,
    }

    def __post_init__(self):
        if not (self.roll_deadband > 0 and self.pitch_deadband > 0 and self.clearance_deadband > 0):
            raise ValueError("deadbands must be positive")
        if not self.tick_dt > 0:
            raise ValueError(f"tick_dt must be positive, got {self.tick_dt!r}")
        if not self.inner_gain > 0:
            raise ValueError(f"inner_gain must be positive, got {self.inner_gain!r}")
        if len(self.corners) != 4:
            raise ValueError(f"expected four corner geometries, got {len(self.corners)}")
        if self.lookup_points is not None and self.lookup_points < 2:
            raise ValueError("lookup_points must be at least 2")

    def extension(self, corner: Corner, h_prime: float) -> float:
        geom = self.corners[corner]
        if self.lookup_points is None:
            return extension_for_height(geom, h_prime)
        return _table(geom, self.lookup_points).extension(h_prime)


@lru_cache(maxsize=32)
def _table(geom: SuspensionGeometry, points: int) -> ExtensionTable:
    return ExtensionTable(geom, points)


@dataclass(frozen=True)
class ControllerState:
    phase: Phase
    target_h_prime: Quad
    saturated: Tuple[bool, bool, bool, bool] = (False, False, False, False)

    @classmethod
    def initial(cls, h_prime: Sequence[float]) -> ControllerState:
        return cls(Phase.IDLE, quad(h_prime))


def measured_heights(pots: Sequence[float], cfg: ControllerConfig) -> Quad:
    """Chassis heights implied by the potentiometer readings."""
    res = []
    for corner in Corner:
        geom = cfg.corners[corner]
        b_lo, b_hi = geom.extension_limits
        res.append(height_for_extension(geom, min(max(pots[corner] * geom.stroke, b_lo), b_hi)))
    return quad(res)


def _pair_shift(delta: float, lowered: Sequence[Corner], raised: Sequence[Corner], mode: CorrectionMode):
    """Per-corner height change that removes a height difference ``delta`` between two pairs."""
    shift = [0.0, 0.0, 0.0, 0.0]
    if mode is CorrectionMode.SYMMETRIC:
        for corner in lowered:
            shift[corner] = -delta / 2
        for corner in raised:
            shift[corner] = delta / 2
    else:
        high = lowered if delta > 0 else raised
        for corner in high:
            shift[corner] = -abs(delta)
    return shift


def plan_correction(
    att: Attitude,
    clearance: float,
    cfg: ControllerConfig,
    state: ControllerState,
    measured_h_prime: Optional[Sequence[float]] = None,
) -> ControllerState:
    """Pick this tick's phase and per-corner ``h'`` targets.

    Corrections start from ``measured_h_prime`` when given, otherwise from the previous targets.
    """
    att = att.to_zero_level()
    layout = cfg.layout
    if abs(att.roll) > cfg.roll_deadband:
        phase = Phase.CORRECT_ROLL
        shift = _pair_shift(layout.track * math.tan(att.roll), LEFT, RIGHT, cfg.correction_mode)
    elif abs(att.pitch) > cfg.pitch_deadband:
        phase = Phase.CORRECT_PITCH
        shift = _pair_shift(layout.wheelbase * math.tan(att.pitch), FRONT, REAR, cfg.correction_mode)
    elif abs(clearance - cfg.clearance_setpoint) > cfg.clearance_deadband:
        phase = Phase.CORRECT_CLEARANCE
        shift = [cfg.clearance_setpoint - clearance] * 4
    else:
        return ControllerState(Phase.IDLE, state.target_h_prime)

    base = quad(measured_h_prime) if measured_h_prime is not None else state.target_h_prime
    targets = []
    saturated = []
    for corner in Corner:
        raw = base[corner] + shift[corner]
        clamped = cfg.corners[corner].clamp_height(raw)
        targets.append(clamped)
        saturated.append(abs(clamped - raw) > SATURATION_TOLERANCE)
    return ControllerState(phase, quad(targets), tuple(saturated))  # type: ignore


def track_targets(state: ControllerState, pots: Sequence[float], cfg: ControllerConfig, dt: float) -> Quad:
    """Proportional step of every actuator command toward the extension of its target height."""
    commands = []
    for corner in Corner:
        geom = cfg.corners[corner]
        h_prime = state.target_h_prime[corner]
        low, high = geom.travel
        if not low - SATURATION_TOLERANCE <= h_prime <= high + SATURATION_TOLERANCE:
            raise OutOfDomainError(f"target h'={h_prime!r} for {corner.label} is outside [{low}, {high}]")
        target_b = cfg.extension(corner, geom.clamp_height(h_prime))
        current_b = pots[corner] * geom.stroke
        b_lo, b_hi = geom.extension_limits
        commands.append(min(max(current_b + cfg.inner_gain * (target_b - current_b) * dt, b_lo), b_hi))
    return quad(commands)


def control_tick(
    att: Attitude,
    clearance: float,
    pots: Sequence[float],
    cfg: ControllerConfig,
    state: ControllerState,
) -> Tuple[ControllerState, Quad]:
    measured = measured_heights(pots, cfg)
    new = plan_correction(att, clearance, cfg, state, measured)
    if new.phase is not state.phase:
        logger.debug(f"controller phase {state.phase.value} -> {new.phase.value}")
    for corner in Corner:
        if new.saturated[corner] and not state.saturated[corner]:
            logger.debug(f"{corner.label} saturated at h'={new.target_h_prime[corner]:.6f}")
    if new.phase is Phase.IDLE:
        # idle is a fixed point: command the current extensions
        return new, quad([min(max(p, 0.0), 1.0) * g.stroke for p, g in zip(pots, cfg.corners)])
    return new, track_targets(new, pots, cfg, cfg.tick_dt)
