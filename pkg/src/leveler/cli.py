from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from .const import ExitCode, Severity
from .estimation import AttitudeEstimator, EstimatorConfig, ImuCalibration
from .exception import ConfigError, DomainError, GeometryError, NumericalDegeneracyError
from .kinematics import SuspensionGeometry, extension_for_height, height_for_extension
from .power import (
    CLAIMED_RUNTIME_MIN,
    PUBLISHED_TOTAL_MWH,
    REFERENCE_ROWS,
    BatteryBank,
    audit_table,
    read_power_rows,
    runtime_estimate,
)
from .sim.runner import run_batch, run_scenario, write_summary
from .sim.scenario import Scenario, load_scenario, read_json, validate_scenario
from .sim.telemetry import read_imu_samples, save_telemetry, write_estimates

LOG_FORMAT = "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | {message}"


def echo(line: str = ""):
    print(line)  # noqa: T201


def configure_logging(verbose: int = 0, quiet: bool = False):
    logger.remove()
    if quiet:
        level = "WARNING"
    else:
        level = {0: "INFO", 1: "DEBUG"}.get(verbose, "TRACE")
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config, args.seed)
    records, summary = run_scenario(scenario)
    save_telemetry(records, args.out)
    logger.info(f"wrote {len(records)} records to {args.out}")
    if args.summary:
        write_summary(summary, Path(args.summary))
    return ExitCode.OK


def cmd_h2b(args: argparse.Namespace) -> int:
    geom = SuspensionGeometry.parse(read_json(args.geom))
    echo(repr(extension_for_height(geom, args.h)))
    return ExitCode.OK


def cmd_b2h(args: argparse.Namespace) -> int:
    geom = SuspensionGeometry.parse(read_json(args.geom))
    echo(repr(height_for_extension(geom, args.b)))
    return ExitCode.OK


def cmd_filter(args: argparse.Namespace) -> int:
    cal = ImuCalibration.parse(read_json(args.cal))
    config = EstimatorConfig.parse(read_json(args.estimator)) if args.estimator else None
    samples = read_imu_samples(args.input, cal.adc_full_scale)
    estimator = AttitudeEstimator(cal, config)
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        write_estimates((estimator.step(sample) for sample in samples), f)
    logger.info(f"filtered {len(samples)} samples into {args.out}")
    return ExitCode.OK


def cmd_power(args: argparse.Namespace) -> int:
    rows = read_power_rows(args.rows) if args.rows else list(REFERENCE_ROWS)
    bank = BatteryBank.parse(read_json(args.bank)) if args.bank else BatteryBank()
    report = audit_table(rows, published_total=args.published_total)
    width = max(len(entry.row.name) for entry in report.entries)
    echo(f"{'module':<{width}}  {'computed_mWh':>13}  {'published_mWh':>13}  match")
    for entry in report.entries:
        published = "-" if entry.published is None else f"{entry.published:.6g}"
        match = {True: "yes", False: "NO", None: "-"}[entry.match]
        echo(f"{entry.row.name:<{width}}  {entry.computed:>13.6g}  {published:>13}  {match}")
    echo(f"computed total: {report.computed_total:.6g} mWh")
    if report.published_total is not None:
        echo(f"published total: {report.published_total:.6g} mWh (delta {report.total_delta:+.6g} mWh)")
    if report.published_rows_sum is not None:
        echo(f"sum of published rows: {report.published_rows_sum:.6g} mWh")
    echo(f"runtime from computed power: {runtime_estimate(rows, bank):.1f} min")
    if any(row.published is not None for row in rows):
        echo(f"runtime from published energies: {runtime_estimate(rows, bank, use_published=True):.1f} min")
    echo(f"claimed runtime: {CLAIMED_RUNTIME_MIN:g} min")
    return ExitCode.OK


def cmd_validate(args: argparse.Namespace) -> int:
    scenario = Scenario.parse(read_json(args.config))
    findings = validate_scenario(scenario)
    for finding in findings:
        echo(str(finding))
    if any(f.severity is Severity.ERROR for f in findings):
        return ExitCode.CONFIG
    if not findings:
        echo("ok")
    return ExitCode.OK


def cmd_batch(args: argparse.Namespace) -> int:
    summaries = run_batch([Path(c) for c in args.config], Path(args.out_dir), args.workers, args.seed)
    for stem, summary in summaries.items():
        settle = "never" if summary.settle_time is None else f"{summary.settle_time:.2f} s"
        echo(
            f"{stem}: settle {settle}, steady |pitch| {math.degrees(summary.steady_pitch):.3f} deg, "
            f"|roll| {math.degrees(summary.steady_roll):.3f} deg"
        )
    return ExitCode.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leveler", description="Active suspension leveling simulator.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run one scenario and write telemetry")
    simulate.add_argument("--config", required=True, help="scenario JSON")
    simulate.add_argument("--out", required=True, help="telemetry CSV")
    simulate.add_argument("--summary", help="summary JSON")
    simulate.add_argument("--seed", type=int, help="override the scenario seed")
    simulate.set_defaults(handler=cmd_simulate)

    kinematics = sub.add_parser("kinematics", help="one-shot geometry conversions")
    ksub = kinematics.add_subparsers(dest="direction", required=True)
    h2b = ksub.add_parser("h2b", help="chassis height to actuator extension")
    h2b.add_argument("--geom", required=True, help="geometry JSON")
    h2b.add_argument("--h", type=float, required=True, help="chassis height above the wheel centre, m")
    h2b.set_defaults(handler=cmd_h2b)
    b2h = ksub.add_parser("b2h", help="actuator extension to chassis height")
    b2h.add_argument("--geom", required=True, help="geometry JSON")
    b2h.add_argument("--b", type=float, required=True, help="actuator extension, m")
    b2h.set_defaults(handler=cmd_b2h)

    filt = sub.add_parser("filter", help="run the attitude filter over recorded IMU counts")
    filt.add_argument("--cal", required=True, help="IMU calibration JSON")
    filt.add_argument("--in", dest="input", required=True, help="IMU CSV (t, ax, ay, az, gx, gy, gz)")
    filt.add_argument("--out", required=True, help="estimate CSV")
    filt.add_argument("--estimator", help="filter noise parameters JSON")
    filt.set_defaults(handler=cmd_filter)

    power = sub.add_parser("power", help="audit a power budget and estimate runtime")
    power.add_argument("--rows", help="power rows CSV (defaults to the reference table)")
    power.add_argument("--bank", help="battery bank JSON")
    power.add_argument("--published-total", type=float, default=PUBLISHED_TOTAL_MWH, help="total in mWh")
    power.set_defaults(handler=cmd_power)

    validate = sub.add_parser("validate", help="check a scenario without running it")
    validate.add_argument("--config", required=True, help="scenario JSON")
    validate.set_defaults(handler=cmd_validate)

    batch = sub.add_parser("batch", help="run several scenarios in parallel")
    batch.add_argument("--config", required=True, nargs="+", help="scenario JSON files")
    batch.add_argument("--out-dir", required=True, help="directory for <name>.csv and <name>.summary.json")
    batch.add_argument("--workers", type=int, help="worker threads")
    batch.add_argument("--seed", type=int, help="override every scenario seed")
    batch.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCode.OK if e.code == 0 else ExitCode.USAGE
    configure_logging(args.verbose, args.quiet)
    try:
        return int(args.handler(args))
    except ConfigError as e:
        logger.error(f"configuration error: {e}")
        return ExitCode.CONFIG
    except (DomainError, GeometryError, NumericalDegeneracyError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return ExitCode.NUMERIC
