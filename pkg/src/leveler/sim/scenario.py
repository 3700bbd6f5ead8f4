from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from loguru import logger

from ..const import Corner, Severity
from ..controller import ControllerConfig
from ..estimation import EstimatorConfig, ImuCalibration
from ..exception import ConfigError, GeometryError, ScenarioValidationError
from ..kinematics import DEFAULT_GEOMETRY, ExtensionTable, SuspensionGeometry
from ..model import ModelBase, Nested, as_float
from ..plant.actuator import ActuatorSpec
from ..plant.motion import MotionScript
from ..plant.rover import ChassisLayout, chassis_attitude_from_heights
from ..plant.sensor import SensorNoise
from ..plant.terrain import Flat, Terrain, is_finite_over, parse_terrain

MAX_TICKS = 10**7
SLOPE_SAMPLE_S = 0.1
DEFAULT_CONTROLLER = ControllerConfig()
CONTROLLER_OVERRIDES = (
    ("corners", "corners", "geometry"),
    ("layout", "layout", "layout"),
    ("tick_dt", "tick_dt_s", "tick_dt_s"),
)


def _as_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {value!r}")
    return value


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else as_float(value)


@dataclass(frozen=True)
class Finding:
    severity: Severity
    path: str
    message: str

    def __str__(self):
        return f"{self.severity.value}: {self.path}: {self.message}"


@dataclass(frozen=True)
class Scenario(ModelBase):
    """One closed-loop run. ``geometry`` applies to all corners unless ``corners`` lists four."""

    name: str = "scenario"
    terrain: Terrain = field(default_factory=Flat)
    layout: ChassisLayout = field(default_factory=ChassisLayout)
    geometry: Optional[SuspensionGeometry] = None
    corners: Optional[Tuple[SuspensionGeometry, ...]] = None
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    imu: ImuCalibration = field(default_factory=ImuCalibration)
    noise: SensorNoise = field(default_factory=SensorNoise)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    actuator: ActuatorSpec = field(default_factory=ActuatorSpec)
    motion: MotionScript = field(default_factory=MotionScript)
    duration: float = 30.0
    tick_dt: float = 0.01
    seed: int = 0
    mass: float = 50.0
    initial_h_prime: Optional[float] = None
    steady_window: float = 10.0

    __keys__ = {
        "duration": "duration_s",
        "tick_dt": "tick_dt_s",
        "mass": "rover_mass_kg",
        "initial_h_prime": "initial_h_prime_m",
        "steady_window": "steady_window_s",
    }
    __converter__ = {
        "name": str,
        "terrain": Nested(parse_terrain),
        "layout": Nested(ChassisLayout.parse),
        "geometry": Nested(SuspensionGeometry.parse),
        "corners": Nested(SuspensionGeometry.parse, many=True, size=4),
        "controller": Nested(ControllerConfig.parse),
        "imu": Nested(ImuCalibration.parse),
        "noise": Nested(SensorNoise.parse),
        "estimator": Nested(EstimatorConfig.parse),
        "actuator": Nested(ActuatorSpec.parse),
        "motion": Nested(MotionScript.parse),
        "duration": as_float,
        "tick_dt": as_float,
        "seed": _as_int,
        "mass": as_float,
        "initial_h_prime": _optional_float,
        "steady_window": as_float,
    }

    @property
    def geometries(self) -> Tuple[SuspensionGeometry, ...]:
        if self.corners is not None:
            return self.corners
        return (self.geometry or DEFAULT_GEOMETRY,) * 4

    @property
    def controller_config(self) -> ControllerConfig:
        return replace(self.controller, corners=self.geometries, layout=self.layout, tick_dt=self.tick_dt)

    @property
    def tick_count(self) -> int:
        return int(round(self.duration / self.tick_dt))

    @property
    def start_h_prime(self) -> float:
        if self.initial_h_prime is not None:
            return self.initial_h_prime
        return self.controller.clearance_setpoint - self.geometries[0].wheel_radius


def _corner_path(scenario: Scenario, index: int) -> str:
    return f"corners[{index}]" if scenario.corners is not None else "geometry"


def required_correction(scenario: Scenario) -> float:
    """Largest pair height difference the terrain demands along the motion script, in metres."""
    layout = scenario.layout
    motion = scenario.motion
    samples = max(1, int(math.ceil(motion.duration / SLOPE_SAMPLE_S)))
    worst = 0.0
    for k in range(samples + 1):
        pose = motion.pose_at(min(k * SLOPE_SAMPLE_S, motion.duration))
        ground = [scenario.terrain.height(*layout.corner_position(pose, corner)) for corner in Corner]
        slope = chassis_attitude_from_heights(ground, layout)
        roll_delta = layout.track * abs(math.tan(slope.roll))
        worst = max(worst, roll_delta, layout.wheelbase * abs(math.tan(slope.pitch)))
    return worst


def _check_geometry(scenario: Scenario) -> List[Finding]:
    res = []
    cfg = scenario.controller
    needed = cfg.clearance_setpoint
    for index, geom in enumerate(scenario.geometries):
        path = _corner_path(scenario, index)
        if not geom.has_travel:
            res.append(Finding(Severity.ERROR, path, "no chassis height keeps the actuator in its stroke"))
            continue
        low, high = geom.travel
        h_set = needed - geom.wheel_radius
        if h_set < 0 or h_set >= geom.arms.l2:
            res.append(
                Finding(
                    Severity.ERROR,
                    "controller.clearance_setpoint_m",
                    f"set point needs h'={h_set:.6g} m, past the Link 2 reach {geom.arms.l2:.6g} m ({path})",
                )
            )
        elif not low <= h_set <= high:
            res.append(
                Finding(
                    Severity.ERROR,
                    "controller.clearance_setpoint_m",
                    f"set point needs h'={h_set:.6g} m, outside the travel [{low:.6g}, {high:.6g}] of {path}",
                )
            )
        start = scenario.start_h_prime
        if not low <= start <= high:
            res.append(
                Finding(
                    Severity.ERROR,
                    "initial_h_prime_m",
                    f"initial h'={start:.6g} m is outside the travel [{low:.6g}, {high:.6g}] of {path}",
                )
            )
        if cfg.lookup_points is not None:
            try:
                ExtensionTable(geom, cfg.lookup_points)
            except GeometryError as e:
                res.append(Finding(Severity.ERROR, "controller.lookup_points", str(e)))
    return res


def _check_controller_overrides(scenario: Scenario) -> List[Finding]:
    """Controller keys the scenario replaces with its own geometry, layout and tick."""
    res = []
    given, used = scenario.controller, scenario.controller_config
    for name, key, source in CONTROLLER_OVERRIDES:
        value = getattr(given, name)
        if value != getattr(DEFAULT_CONTROLLER, name) and value != getattr(used, name):
            message = f"ignored, the scenario {source} applies"
            res.append(Finding(Severity.WARNING, f"controller.{key}", message))
    return res


def validate_scenario(scenario: Scenario) -> List[Finding]:
    res = []
    if not scenario.duration > 0:
        res.append(Finding(Severity.ERROR, "duration_s", "duration must be positive"))
    if not scenario.tick_dt > 0:
        res.append(Finding(Severity.ERROR, "tick_dt_s", "tick must be positive"))
    elif scenario.duration / scenario.tick_dt > MAX_TICKS:
        res.append(Finding(Severity.ERROR, "duration_s", f"more than {MAX_TICKS} ticks"))
    elif scenario.controller.inner_gain * scenario.tick_dt > 1:
        res.append(Finding(Severity.WARNING, "controller.inner_gain_per_s", "gain times tick above 1"))
    if not scenario.mass > 0:
        res.append(Finding(Severity.ERROR, "rover_mass_kg", "mass must be positive"))
    if not scenario.steady_window > 0:
        res.append(Finding(Severity.ERROR, "steady_window_s", "steady window must be positive"))
    if scenario.corners is not None and scenario.geometry is not None:
        res.append(Finding(Severity.ERROR, "geometry", "give either geometry or corners, not both"))
    res.extend(_check_controller_overrides(scenario))
    res.extend(_check_geometry(scenario))

    layout = scenario.layout
    bbox = scenario.motion.bounding_box(math.hypot(layout.wheelbase, layout.track) / 2)
    if not is_finite_over(scenario.terrain, bbox):
        res.append(Finding(Severity.ERROR, "terrain", "terrain height is not finite along the motion script"))
        return res

    if all(g.has_travel for g in scenario.geometries):
        achievable = min(high - low for low, high in (g.travel for g in scenario.geometries))
        needed = required_correction(scenario)
        if needed > achievable:
            res.append(
                Finding(
                    Severity.WARNING,
                    "terrain",
                    f"terrain needs a {needed:.4g} m height correction, actuators reach {achievable:.4g} m; "
                    "expect saturation",
                )
            )
    return res


def read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ConfigError(str(path), f"cannot read file: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def load_scenario(path: Union[str, Path], seed: Optional[int] = None) -> Scenario:
    """Parse and validate a scenario file; errors raise, warnings are logged."""
    scenario = Scenario.parse(read_json(path))
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    findings = validate_scenario(scenario)
    errors = [f for f in findings if f.severity is Severity.ERROR]
    for finding in findings:
        if finding.severity is Severity.WARNING:
            logger.warning(f"{path}: {finding.path}: {finding.message}")
    if errors:
        raise ScenarioValidationError(errors)
    return scenario
