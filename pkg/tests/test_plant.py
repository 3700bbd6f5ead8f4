import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from leveler.const import Corner
from leveler.estimation import ImuCalibration, accel_attitude
from leveler.exception import ConfigError, DomainError
from leveler.kinematics import DEFAULT_GEOMETRY, extension_for_height
from leveler.model import Attitude
from leveler.plant import (
    NOISELESS,
    ActuatorSpec,
    ChassisLayout,
    Composite,
    Flat,
    MotionScript,
    Pose,
    Ramp,
    Rover,
    SensorModel,
    SensorNoise,
    Sinusoid,
    Step,
    Waypoint,
    chassis_attitude_from_heights,
    make_actuator,
    parse_terrain,
    sense,
    static_load,
    step_actuator,
)
from leveler.plant.actuator import ActuatorState
from leveler.plant.rover import corner_height
from leveler.plant.sensor import gravity_counts
from leveler.plant.terrain import is_finite_over

LAYOUT = ChassisLayout()
GEOMS = (DEFAULT_GEOMETRY,) * 4


def rover_on(terrain, pose=Pose(0.0, 0.0, 0.0), h_prime=0.1) -> Rover:
    actuators = [make_actuator(g, ActuatorSpec(), 50.0, h_prime) for g in GEOMS]
    return Rover(terrain, LAYOUT, GEOMS, actuators, pose)


def test_terrain_primitives():
    assert Flat(0.3).height(5.0, -2.0) == 0.3
    ramp = Ramp(math.radians(10), start=0.0, end=2.0)
    assert ramp.height(-1.0, 0.0) == 0.0
    assert ramp.height(1.0, 7.0) == pytest.approx(math.tan(math.radians(10)))
    assert ramp.height(5.0, 0.0) == pytest.approx(2 * math.tan(math.radians(10)))
    side = Ramp(math.radians(45), azimuth=math.pi / 2)
    assert side.height(3.0, 0.5) == pytest.approx(0.5)
    step = Step(0.05, edge=1.0)
    assert step.height(0.999, 0.0) == 0.0
    assert step.height(1.0, 0.0) == 0.05
    wave = Sinusoid(0.02, 2.0)
    assert wave.height(0.5, 0.0) == pytest.approx(0.02)
    assert Composite((Flat(0.1), step)).height(2.0, 0.0) == pytest.approx(0.15)


def test_parse_terrain():
    terrain = parse_terrain(
        {
            "type": "composite",
            "parts": [{"type": "ramp", "grade_deg": 10}, {"type": "step", "height_m": 0.02}],
        }
    )
    assert isinstance(terrain, Composite)
    assert terrain.parts[0] == Ramp(math.radians(10))
    assert terrain.parts[1] == Step(0.02)
    assert terrain.parts[1].dump() == {"height_m": 0.02, "edge_m": 0.0, "azimuth_deg": 0.0}
    with pytest.raises(ConfigError) as info:
        parse_terrain({"type": "cliff"}, "terrain")
    assert info.value.path == "terrain.type"
    with pytest.raises(ConfigError):
        parse_terrain({"type": "ramp", "grade_deg": 90})
    flat_wave = {"type": "sinusoid", "amplitude_m": 1, "wavelength_m": 0}
    with pytest.raises(ConfigError) as info:
        parse_terrain({"type": "composite", "parts": [flat_wave]})
    assert info.value.path == "parts[0]"


def test_terrain_finiteness():
    assert is_finite_over(Ramp(math.radians(30)), (-1.0, 1.0, -1.0, 1.0))

    class Spike:
        def height(self, x, y):
            return math.inf if x > 0.5 else 0.0

    assert not is_finite_over(Spike(), (-1.0, 1.0, -1.0, 1.0))


def test_static_load_from_lever():
    load = static_load(DEFAULT_GEOMETRY, 50.0)
    assert load == pytest.approx(50.0 * 9.80665 / 4 * 0.25 / 0.12)
    actuator = make_actuator(DEFAULT_GEOMETRY, ActuatorSpec(), 50.0, 0.1)
    assert actuator.load == load
    assert actuator.speed == pytest.approx(0.0127 * (1 - load / 1000))
    assert make_actuator(DEFAULT_GEOMETRY, ActuatorSpec(load=0.0), 50.0, 0.1).speed == 0.0127


def test_actuator_moves_at_speed():
    state = ActuatorState.at(0.05, 0.1, ActuatorSpec(no_load_speed=0.01), 0.0)
    moved = step_actuator(state.command(0.08), 1.0)
    assert moved.extension == pytest.approx(0.06)
    assert moved.pot_reading == pytest.approx(0.6)
    landed = step_actuator(moved.command(0.0605), 1.0)
    assert landed.extension == 0.0605
    pinned = step_actuator(landed.command(5.0), 100.0)
    assert pinned.extension == 0.1
    assert pinned.pot_reading == 1.0


def test_overloaded_actuator_stalls():
    state = ActuatorState.at(0.05, 0.1, ActuatorSpec(max_load=100.0), 150.0)
    assert step_actuator(state.command(0.0), 1.0).extension == 0.05


def test_actuator_rejects_bad_dt():
    state = ActuatorState.at(0.05, 0.1, ActuatorSpec(), 0.0)
    for dt in (0.0, -0.01, math.nan):
        with pytest.raises(DomainError):
            step_actuator(state, dt)


@given(
    st.floats(min_value=0.0, max_value=0.1),
    st.floats(min_value=-0.05, max_value=0.15),
    st.floats(min_value=1e-4, max_value=0.5),
)
def test_actuator_rate_and_stroke_limits(start, target, dt):
    state = ActuatorState.at(start, 0.1, ActuatorSpec(), 255.0)
    moved = step_actuator(state.command(target), dt)
    assert 0.0 <= moved.extension <= 0.1
    assert abs(moved.extension - state.extension) <= state.speed * dt + 1e-15


def test_motion_script():
    motion = MotionScript((Waypoint(0.0, 0.0), Waypoint(2.0, 0.0, 0.5), Waypoint(2.0, 1.0, 0.25)))
    assert motion.duration == pytest.approx(8.0)
    assert motion.pose_at(0.0) == Pose(0.0, 0.0, 0.0)
    assert motion.pose_at(2.0) == Pose(1.0, 0.0, 0.0)
    x, y, heading = motion.pose_at(6.0)
    assert (x, y) == pytest.approx((2.0, 0.5))
    assert heading == pytest.approx(math.pi / 2)
    assert motion.pose_at(100.0) == Pose(2.0, 1.0, pytest.approx(math.pi / 2))
    assert motion.bounding_box(0.5) == (-0.5, 2.5, -0.5, 1.5)


def test_stationary_motion_keeps_heading():
    motion = MotionScript.parse({"waypoints": [{"x_m": 1, "y_m": 2}], "heading_deg": 90})
    assert motion.duration == 0.0
    assert motion.pose_at(3.0) == Pose(1.0, 2.0, pytest.approx(math.pi / 2))


def test_motion_needs_speed():
    with pytest.raises(ConfigError) as info:
        MotionScript.parse({"waypoints": [{"x_m": 0, "y_m": 0}, {"x_m": 1, "y_m": 0}]})
    assert info.value.path == ""


def test_attitude_from_corner_heights():
    # front pair 0.1 m above the rear pair
    att = chassis_attitude_from_heights((0.1, 0.0, 0.0, 0.1), LAYOUT)
    assert att.pitch == pytest.approx(math.atan(0.1 / 0.6))
    assert att.roll == 0.0
    # left pair higher
    att = chassis_attitude_from_heights((0.05, 0.05, 0.0, 0.0), LAYOUT)
    assert att.roll == pytest.approx(math.atan(0.1))
    with pytest.raises(DomainError):
        chassis_attitude_from_heights((0.0, math.nan, 0.0, 0.0), LAYOUT)


def test_corner_positions_follow_heading():
    pose = Pose(1.0, 1.0, math.pi / 2)
    x, y = LAYOUT.corner_position(pose, Corner.FRONT_LEFT)
    assert (x, y) == pytest.approx((1.0 - 0.25, 1.0 + 0.3))


def test_rover_on_flat_ground():
    rover = rover_on(Flat())
    assert rover.state.attitude.pair == (0.0, 0.0)
    assert rover.state.clearance == pytest.approx(0.2, abs=1e-10)
    b = extension_for_height(DEFAULT_GEOMETRY, 0.1)
    assert rover.state.extensions == pytest.approx((b,) * 4)


def test_rover_on_ramp_takes_the_grade():
    rover = rover_on(Ramp(math.radians(10), start=0.0), Pose(1.0, 0.0, 0.0))
    assert rover.state.attitude.pitch == pytest.approx(math.radians(10))
    assert rover.state.attitude.roll == pytest.approx(0.0, abs=1e-12)
    turned = rover_on(Ramp(math.radians(10), start=0.0), Pose(1.0, 0.0, math.pi / 2))
    assert turned.state.attitude.roll == pytest.approx(-math.radians(10))


def test_rover_step_moves_actuators():
    rover = rover_on(Flat())
    before = rover.state.extensions
    commands = [b + 0.01 for b in before]
    state = rover.step(commands, 0.1, 0.1, Pose(0.0, 0.0, 0.0))
    assert state.t == 0.1
    for prev, now in zip(before, state.extensions):
        assert 0 < now - prev <= 0.0127 * 0.1
    assert state.clearance < 0.2
    assert state.attitude_rate == (0.0, 0.0)


def test_rover_needs_four_corners():
    with pytest.raises(ValueError):
        Rover(Flat(), LAYOUT, GEOMS[:3], [], Pose(0.0, 0.0, 0.0))


def test_noiseless_sensing():
    rover = rover_on(Flat())
    frame = sense(rover.state, ImuCalibration(), seed=1, noise=NOISELESS)
    cal = ImuCalibration()
    zero = cal.acc_zero_counts
    assert frame.imu.acc_adc == pytest.approx((zero, zero, zero + 93.0))
    assert frame.imu.gyro_adc == (512.0, 512.0, 512.0)
    assert frame.pots == rover.state.pot_readings
    assert frame.clearance == rover.state.clearance


def test_sensing_is_seeded():
    rover = rover_on(Ramp(math.radians(5)))
    first = SensorModel(ImuCalibration(), SensorNoise(), seed=42)
    second = SensorModel(ImuCalibration(), SensorNoise(), seed=42)
    for _ in range(5):
        assert first.sense(rover.state) == second.sense(rover.state)
    assert sense(rover.state, ImuCalibration(), 1) != sense(rover.state, ImuCalibration(), 2)


def test_quantized_and_clamped_readings():
    rover = rover_on(Flat())
    noise = SensorNoise(acc_sigma=5.0, gyro_sigma=5.0, pot_sigma=2.0, quantize=True)
    frame = SensorModel(ImuCalibration(), noise, seed=3).sense(rover.state)
    for count in frame.imu.acc_adc + frame.imu.gyro_adc:
        assert count == round(count)
        assert 0.0 <= count <= 1023.0
    assert all(0.0 <= p <= 1.0 for p in frame.pots)


def test_gravity_counts_tilt():
    cal = ImuCalibration()
    counts = gravity_counts(Attitude(math.radians(45), 0.0), cal)
    zero = cal.acc_zero_counts
    assert counts[1] - zero == pytest.approx(93.0 / math.sqrt(2))
    assert counts[2] - zero == pytest.approx(93.0 / math.sqrt(2))


def test_parse_noise():
    noise = SensorNoise.parse({"gyro_bias_dps": [0, 1.5, 0], "quantize": True})
    assert noise.gyro_bias == (0.0, 1.5, 0.0)
    with pytest.raises(ConfigError) as info:
        SensorNoise.parse({"quantize": "yes"})
    assert info.value.path == "quantize"


def test_attitude_matches_plane_fit():
    heights = (0.30, 0.28, 0.25, 0.27)
    points = [LAYOUT.corner_offset(corner) for corner in Corner]
    design = np.array([[1.0, x, y] for x, y in points])
    (_, slope_x, slope_y), *_ = np.linalg.lstsq(design, np.array(heights), rcond=None)
    att = chassis_attitude_from_heights(heights, LAYOUT)
    assert att.pitch == pytest.approx(math.atan(slope_x), abs=1e-12)
    assert att.roll == pytest.approx(math.atan(slope_y), abs=1e-12)
    left_high = chassis_attitude_from_heights((0.3, 0.3, 0.2, 0.2), LAYOUT)
    assert left_high.roll == pytest.approx(math.atan(0.2))
    assert left_high.pitch == 0.0


def test_corner_height_adds_wheel_and_chassis():
    b = extension_for_height(DEFAULT_GEOMETRY, 0.05)
    pose = Pose(2.0, 0.0, 0.0)
    flat = corner_height(Flat(), pose, Corner.FRONT_LEFT, b, DEFAULT_GEOMETRY, LAYOUT)
    assert flat == pytest.approx(0.15, abs=1e-9)
    raised = Composite((Flat(0.1), Step(0.05, edge=0.0)))
    assert corner_height(raised, pose, Corner.REAR_RIGHT, b, DEFAULT_GEOMETRY, LAYOUT) == pytest.approx(
        0.30, abs=1e-9
    )


def test_actuator_at_half_load():
    spec = ActuatorSpec(no_load_speed=0.01, max_load=100.0, load=50.0)
    state = ActuatorState.at(0.05, 0.1, spec, 50.0)
    assert step_actuator(state.command(0.09), 1.0).extension == pytest.approx(0.055)
    assert step_actuator(state, 1.0).extension == 0.05


def test_noiseless_sensing_recovers_side_tilt():
    cal = ImuCalibration()
    rover = rover_on(Ramp(math.radians(10), azimuth=math.pi / 2))
    assert rover.state.attitude.roll == pytest.approx(math.radians(10), abs=1e-12)
    frame = sense(rover.state, cal, seed=5, noise=NOISELESS)
    measured = accel_attitude(frame.imu, cal).to_zero_level()
    assert measured.roll == pytest.approx(math.radians(10), abs=1e-9)
    assert measured.pitch == pytest.approx(0.0, abs=1e-9)
