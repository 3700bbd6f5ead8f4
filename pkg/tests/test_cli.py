import csv
import json

import pytest

from leveler.cli import main
from leveler.const import ExitCode
from leveler.sim import HEADER
from leveler.sim.telemetry import ESTIMATE_HEADER


def test_help_and_usage(capsys):
    assert main(["--help"]) == ExitCode.OK
    assert "simulate" in capsys.readouterr().out
    assert main([]) == ExitCode.USAGE
    assert main(["kinematics", "h2b", "--geom", "g.json"]) == ExitCode.USAGE


def test_kinematics_conversions(capsys, example_dir):
    geom = str(example_dir / "geometry.json")
    assert main(["kinematics", "h2b", "--geom", geom, "--h", "0.1"]) == ExitCode.OK
    assert float(capsys.readouterr().out) == pytest.approx(0.06, abs=1e-12)
    assert main(["kinematics", "b2h", "--geom", geom, "--b", "0.06"]) == ExitCode.OK
    assert float(capsys.readouterr().out) == pytest.approx(0.1, abs=1e-9)


def test_kinematics_domain_errors(example_dir):
    geom = str(example_dir / "geometry.json")
    assert main(["kinematics", "h2b", "--geom", geom, "--h", "0.3"]) == ExitCode.NUMERIC
    assert main(["kinematics", "b2h", "--geom", geom, "--b", "0.5"]) == ExitCode.NUMERIC
    assert main(["kinematics", "b2h", "--geom", "missing.json", "--b", "0.05"]) == ExitCode.CONFIG


def test_power_report(capsys, example_dir):
    rows, bank = str(example_dir / "power_budget.csv"), str(example_dir / "battery_bank.json")
    args = ["power", "--rows", rows, "--bank", bank]
    assert main(args) == ExitCode.OK
    out = capsys.readouterr().out
    camera = next(line for line in out.splitlines() if line.startswith("Wireless IP Camera"))
    assert camera.split()[-3:] == ["3000", "300", "NO"]
    assert "computed total: 77913.2 mWh" in out
    assert "delta +3700 mWh" in out
    assert "sum of published rows: 75213.2 mWh" in out
    assert "claimed runtime: 72 min" in out


def test_power_rejects_an_empty_table(tmp_path):
    rows = tmp_path / "empty.csv"
    rows.write_text("name,voltage_V,current_mA,count,duty_h,published_mWh\n")
    assert main(["-q", "power", "--rows", str(rows)]) == ExitCode.CONFIG


def test_power_defaults_to_reference_table(capsys):
    assert main(["-q", "power"]) == ExitCode.OK
    assert "runtime from computed power: 102.6 min" in capsys.readouterr().out


def test_validate(capsys, example_dir, tmp_path):
    assert main(["validate", "--config", str(example_dir / "scenarios" / "flat.json")]) == ExitCode.OK
    assert capsys.readouterr().out.strip() == "ok"
    assert main(["validate", "--config", str(example_dir / "scenarios" / "side_slope45.json")]) == ExitCode.OK
    assert capsys.readouterr().out.startswith("warning: terrain:")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tick_dt_s": 0}))
    assert main(["validate", "--config", str(bad)]) == ExitCode.CONFIG
    assert "error: tick_dt_s:" in capsys.readouterr().out


def test_simulate(tmp_path, example_dir):
    out = tmp_path / "flat.csv"
    summary = tmp_path / "flat.summary.json"
    config = str(example_dir / "scenarios" / "flat.json")
    args = ["-q", "simulate", "--config", config, "--out", str(out), "--summary", str(summary), "--seed", "5"]
    assert main(args) == ExitCode.OK
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == HEADER
    assert len(rows) == 501
    assert json.loads(summary.read_text())["phase_ticks"]["IDLE"] == 500


def test_simulate_rejects_invalid_scenario(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"rover_mass_kg": -1}))
    assert main(["simulate", "--config", str(config), "--out", str(tmp_path / "x.csv")]) == ExitCode.CONFIG
    assert not (tmp_path / "x.csv").exists()


def test_filter(tmp_path, example_dir):
    samples = tmp_path / "imu.csv"
    lines = ["t,ax,ay,az,gx,gy,gz"] + [f"{k * 0.01},465,465,558,512,512,512" for k in range(20)]
    samples.write_text("\n".join(lines) + "\n")
    out = tmp_path / "att.csv"
    cal = str(example_dir / "imu_calibration.json")
    assert main(["filter", "--cal", cal, "--in", str(samples), "--out", str(out)]) == ExitCode.OK
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert tuple(rows[0]) == ESTIMATE_HEADER
    assert len(rows) == 20
    assert all(abs(float(row["pitch_rad"])) < 1e-9 for row in rows)


def test_filter_rejects_counts_beyond_the_adc(tmp_path, example_dir):
    samples = tmp_path / "imu.csv"
    samples.write_text("t,ax,ay,az,gx,gy,gz\n0.0,465,465,1100,512,512,512\n")
    args = ["filter", "--cal", str(example_dir / "imu_calibration.json"), "--in", str(samples)]
    assert main([*args, "--out", str(tmp_path / "att.csv")]) == ExitCode.CONFIG


def test_filter_rejects_backwards_time(tmp_path, example_dir):
    samples = tmp_path / "imu.csv"
    samples.write_text("t,ax,ay,az,gx,gy,gz\n1,465,465,558,512,512,512\n0.5,465,465,558,512,512,512\n")
    cal = str(example_dir / "imu_calibration.json")
    args = ["filter", "--cal", cal, "--in", str(samples), "--out", str(tmp_path / "att.csv")]
    assert main(args) == ExitCode.NUMERIC


def test_batch(capsys, tmp_path, example_dir):
    configs = [str(example_dir / "scenarios" / "flat.json")]
    args = ["-q", "batch", "--config", *configs, "--out-dir", str(tmp_path), "--workers", "1"]
    assert main(args) == ExitCode.OK
    assert capsys.readouterr().out.startswith("flat: settle 0.00 s")
    assert (tmp_path / "flat.summary.json").exists()
