from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Tuple

import numpy as np
from loguru import logger

from .const import Convention
from .exception import DomainError, IndeterminateAttitudeError, NumericalDegeneracyError, StreamOrderError
from .model import Attitude, ModelBase, Nested, as_float, as_floats

H = np.array([[1.0, 0.0]])
IDENTITY = np.eye(2)
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class AxisMapping(ModelBase):
    """Which accelerometer/gyro channel feeds roll, pitch and the vertical reference."""

    roll_axis: int = 0
    pitch_axis: int = 1
    vertical_axis: int = 2

    def __post_init__(self):
        if sorted((self.roll_axis, self.pitch_axis, self.vertical_axis)) != [0, 1, 2]:
            raise ValueError(
                f"axes must be a permutation of 0, 1, 2, got "
                f"{(self.roll_axis, self.pitch_axis, self.vertical_axis)}"
            )


@dataclass(frozen=True)
class ImuCalibration(ModelBase):
    gyro_zero: Tuple[float, float, float] = (512.0, 512.0, 512.0)
    gyro_sensitivity: float = 14.375
    acc_zero_g_voltage: float = 1.5
    adc_ref_voltage: float = 3.3
    adc_full_scale: float = 1023.0
    acc_counts_per_g: float = 93.0
    axes: AxisMapping = field(default_factory=AxisMapping)

    __keys__ = {
        "gyro_zero": "gyro_zero_counts",
        "gyro_sensitivity": "gyro_sensitivity_counts_per_dps",
        "acc_zero_g_voltage": "acc_zero_g_voltage_V",
        "adc_ref_voltage": "adc_ref_voltage_V",
        "adc_full_scale": "adc_full_scale_counts",
        "acc_counts_per_g": "acc_counts_per_g",
    }
    __converter__ = {
        "gyro_zero": as_floats(3),
        "gyro_sensitivity": as_float,
        "acc_zero_g_voltage": as_float,
        "adc_ref_voltage": as_float,
        "adc_full_scale": as_float,
        "acc_counts_per_g": as_float,
        "axes": Nested(AxisMapping.parse),
    }

    def __post_init__(self):
        if self.gyro_sensitivity <= 0 or self.adc_ref_voltage <= 0 or self.adc_full_scale <= 0:
            raise ValueError("gyro sensitivity, ADC reference voltage and ADC full scale must be positive")
        if self.acc_counts_per_g <= 0:
            raise ValueError("acc_counts_per_g must be positive")

    @property
    def acc_zero_counts(self) -> float:
        return self.acc_zero_g_voltage / self.adc_ref_voltage * self.adc_full_scale


@dataclass(frozen=True)
class ImuSample:
    t: float
    acc_adc: Tuple[float, float, float]
    gyro_adc: Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class KalmanState:
    """State ``[angle, gyro_bias]`` with covariance ``P``; ``Q`` is the process noise of the next predict."""

    x_hat: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    R: float

    @classmethod
    def initial(cls, angle: float, p0: Tuple[float, float], q: np.ndarray, r: float) -> KalmanState:
        return cls(np.array([angle, 0.0]), np.diag(p0).astype(float), np.asarray(q, dtype=float), r)

    @property
    def angle(self) -> float:
        return float(self.x_hat[0])

    @property
    def bias(self) -> float:
        return float(self.x_hat[1])


@dataclass(frozen=True)
class EstimatorConfig(ModelBase):
    q_angle: float = 1e-3
    q_bias: float = 3e-5
    r_measure: float = 0.03
    p0_angle: float = 0.03
    p0_bias: float = 1e-3

    __converter__ = {
        "q_angle": as_float,
        "q_bias": as_float,
        "r_measure": as_float,
        "p0_angle": as_float,
        "p0_bias": as_float,
    }

    def __post_init__(self):
        if self.q_angle < 0 or self.q_bias < 0:
            raise ValueError("process noise must be non-negative")
        if self.r_measure <= 0:
            raise ValueError("measurement noise must be positive")
        if self.p0_angle < 0 or self.p0_bias < 0:
            raise ValueError("initial covariance must be non-negative")

    def process_noise(self, dt: float) -> np.ndarray:
        return np.diag([self.q_angle, self.q_bias]) * dt


def gyro_rate(counts: float, cal: ImuCalibration, axis: int = 0) -> float:
    """Angular rate in deg/s from a raw gyro reading."""
    return (counts - cal.gyro_zero[axis]) / cal.gyro_sensitivity


def integrate_gyro(prev_angle: float, rate: float, dt: float) -> float:
    """Advance an angle in radians by a rate in deg/s over ``dt`` seconds."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    return prev_angle + math.radians(rate * dt)


def accel_attitude(sample: ImuSample, cal: ImuCalibration) -> Attitude:
    # atan2 is scale invariant, so zero-offset counts go in without conversion to g
    zero = cal.acc_zero_counts
    values = [count - zero for count in sample.acc_adc]
    x = values[cal.axes.roll_axis]
    y = values[cal.axes.pitch_axis]
    z = values[cal.axes.vertical_axis]
    if z == 0 and (x == 0 or y == 0):
        raise IndeterminateAttitudeError(f"accelerometer reads no gravity at t={sample.t!r}")
    # raw angles live in [0, 2pi)
    pitch = (math.atan2(y, z) + math.pi) % TWO_PI
    roll = (math.atan2(x, z) + math.pi) % TWO_PI
    return Attitude(pitch, roll, Convention.RAW_PI_LEVEL)


def _symmetric(P: np.ndarray) -> np.ndarray:
    return (P + P.T) / 2


def kalman_predict(state: KalmanState, gyro_rate: float, dt: float) -> KalmanState:
    """Propagate with the gyro rate (rad/s) as control input."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    F = np.array([[1.0, -dt], [0.0, 1.0]])
    B = np.array([dt, 0.0])
    x_hat = F @ state.x_hat + B * gyro_rate
    P = _symmetric(F @ state.P @ F.T + state.Q)
    return replace(state, x_hat=x_hat, P=P)


def kalman_update(state: KalmanState, z: float) -> KalmanState:
    innovation = z - float((H @ state.x_hat)[0])
    S = float((H @ state.P @ H.T)[0, 0]) + state.R
    if not S > 0:
        raise NumericalDegeneracyError(f"innovation covariance is not positive: {S!r}")
    K = (state.P @ H.T)[:, 0] / S
    x_hat = state.x_hat + K * innovation
    P = _symmetric((IDENTITY - np.outer(K, H[0])) @ state.P)
    return replace(state, x_hat=x_hat, P=P)


@dataclass(frozen=True)
class Estimate:
    t: float
    attitude: Attitude
    measured: Attitude
    bias_pitch: float
    bias_roll: float
    gyro_pitch: float
    gyro_roll: float


class AttitudeEstimator:
    """Two independent angle/bias filters, pitch and roll, fed one IMU sample at a time."""

    pitch: Optional[KalmanState]
    roll: Optional[KalmanState]

    def __init__(self, cal: ImuCalibration, config: Optional[EstimatorConfig] = None):
        self.cal = cal
        self.config = config or EstimatorConfig()
        self.pitch = None
        self.roll = None
        self.gyro_pitch = 0.0
        self.gyro_roll = 0.0
        self._last_t: Optional[float] = None

    def reset(self):
        self.pitch = None
        self.roll = None
        self._last_t = None

    def _initial(self, angle: float) -> KalmanState:
        cfg = self.config
        return KalmanState.initial(angle, (cfg.p0_angle, cfg.p0_bias), np.zeros((2, 2)), cfg.r_measure)

    def step(self, sample: ImuSample) -> Estimate:
        measured = accel_attitude(sample, self.cal)
        level = measured.to_zero_level()
        if self.pitch is None or self.roll is None or self._last_t is None:
            self.pitch = self._initial(level.pitch)
            self.roll = self._initial(level.roll)
            self.gyro_pitch, self.gyro_roll = level.pitch, level.roll
            logger.trace(f"estimator initialised at t={sample.t}: {level.pitch:.6f}, {level.roll:.6f}")
        else:
            dt = sample.t - self._last_t
            if dt < 0:
                raise StreamOrderError(f"sample at t={sample.t!r} precedes t={self._last_t!r}")
            if dt > 0:
                axes = self.cal.axes
                pitch_dps = gyro_rate(sample.gyro_adc[axes.pitch_axis], self.cal, axes.pitch_axis)
                roll_dps = gyro_rate(sample.gyro_adc[axes.roll_axis], self.cal, axes.roll_axis)
                q = self.config.process_noise(dt)
                self.pitch = kalman_predict(replace(self.pitch, Q=q), math.radians(pitch_dps), dt)
                self.roll = kalman_predict(replace(self.roll, Q=q), math.radians(roll_dps), dt)
                self.gyro_pitch = integrate_gyro(self.gyro_pitch, pitch_dps, dt)
                self.gyro_roll = integrate_gyro(self.gyro_roll, roll_dps, dt)
            self.pitch = kalman_update(self.pitch, level.pitch)
            self.roll = kalman_update(self.roll, level.roll)
        self._last_t = sample.t
        return Estimate(
            sample.t,
            Attitude(self.pitch.angle, self.roll.angle),
            measured,
            self.pitch.bias,
            self.roll.bias,
            self.gyro_pitch,
            self.gyro_roll,
        )


def estimate_attitude(
    stream: Iterable[ImuSample], cal: ImuCalibration, config: Optional[EstimatorConfig] = None
) -> List[Attitude]:
    estimator = AttitudeEstimator(cal, config)
    return [estimator.step(sample).attitude for sample in stream]
