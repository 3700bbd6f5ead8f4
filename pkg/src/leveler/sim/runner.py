from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..const import Severity
from ..controller import ControllerState, control_tick
from ..estimation import AttitudeEstimator
from ..exception import ScenarioValidationError
from ..plant.actuator import make_actuator
from ..plant.rover import Rover
from ..plant.sensor import SensorModel
from .scenario import Scenario, load_scenario, validate_scenario
from .telemetry import SummaryReport, TelemetryRecord, save_telemetry, summarize


class Simulator:
    """Closed loop of one scenario: sense, estimate, control, then advance the plant by one tick.

    Tick ``k`` runs at ``t = k * tick_dt`` so the time base never accumulates rounding.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.config = scenario.controller_config
        geoms = scenario.geometries
        h_prime = scenario.start_h_prime
        actuators = [make_actuator(g, scenario.actuator, scenario.mass, h_prime) for g in geoms]
        self.rover = Rover(scenario.terrain, scenario.layout, geoms, actuators, scenario.motion.pose_at(0.0))
        self.sensors = SensorModel(scenario.imu, scenario.noise, scenario.seed)
        self.estimator = AttitudeEstimator(scenario.imu, scenario.estimator)
        self.controller = ControllerState.initial([h_prime] * 4)
        self.k = 0

    def tick(self) -> TelemetryRecord:
        dt = self.scenario.tick_dt
        truth = self.rover.state
        frame = self.sensors.sense(truth)
        estimate = self.estimator.step(frame.imu)
        self.controller, commands = control_tick(
            estimate.attitude, frame.clearance, frame.pots, self.config, self.controller
        )
        b = truth.extensions
        sat = self.controller.saturated
        record = TelemetryRecord(
            truth.t,
            truth.attitude.pitch,
            truth.attitude.roll,
            estimate.attitude.pitch,
            estimate.attitude.roll,
            truth.clearance,
            b[0],
            b[1],
            b[2],
            b[3],
            frame.pots[0],
            frame.pots[1],
            frame.pots[2],
            frame.pots[3],
            self.controller.phase,
            sat[0],
            sat[1],
            sat[2],
            sat[3],
        )
        self.k += 1
        t_next = self.k * dt
        self.rover.step(commands, dt, t_next, self.scenario.motion.pose_at(t_next))
        return record

    def run(self) -> List[TelemetryRecord]:
        return [self.tick() for _ in range(self.scenario.tick_count)]

    def summarize(self, records: Sequence[TelemetryRecord]) -> SummaryReport:
        cfg = self.config
        window = self.scenario.steady_window
        return summarize(records, cfg.pitch_deadband, cfg.roll_deadband, cfg.clearance_setpoint, window)


def run_scenario(scenario: Scenario) -> Tuple[List[TelemetryRecord], SummaryReport]:
    errors = [f for f in validate_scenario(scenario) if f.severity is Severity.ERROR]
    if errors:
        raise ScenarioValidationError(errors)
    logger.info(f"running {scenario.name}: {scenario.tick_count} ticks, seed {scenario.seed}")
    sim = Simulator(scenario)
    records = sim.run()
    summary = sim.summarize(records)
    logger.info(
        f"{scenario.name} finished: settle time {summary.settle_time}, "
        f"steady |pitch| {summary.steady_pitch:.3g} rad, |roll| {summary.steady_roll:.3g} rad"
    )
    return records, summary


def write_summary(summary: SummaryReport, path: Path):
    path.write_text(json.dumps(summary.dump(), indent=2) + "\n", encoding="utf-8")


def _run_file(config: Path, out_dir: Path, seed: Optional[int]) -> SummaryReport:
    scenario = load_scenario(config, seed)
    records, summary = run_scenario(scenario)
    save_telemetry(records, out_dir / f"{config.stem}.csv")
    write_summary(summary, out_dir / f"{config.stem}.summary.json")
    return summary


def run_batch(
    configs: Sequence[Path], out_dir: Path, workers: Optional[int] = None, seed: Optional[int] = None
) -> Dict[str, SummaryReport]:
    """Run independent scenario files on a thread pool; each gets its own simulator and generator."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stems = [config.stem for config in configs]
    if len(set(stems)) != len(stems):
        raise ValueError("scenario files in one batch must have distinct names")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {config.stem: executor.submit(_run_file, config, out_dir, seed) for config in configs}
        return {stem: future.result() for stem, future in futures.items()}
