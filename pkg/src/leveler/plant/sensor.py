from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..estimation import ImuCalibration, ImuSample
from ..model import Attitude, ModelBase, as_bool, as_float, as_floats, quad
from .rover import RoverState


@dataclass(frozen=True)
class SensorNoise(ModelBase):
    """Per-channel Gaussian noise (one sigma) and the ADC realism switches."""

    acc_sigma: float = 2.0
    gyro_sigma: float = 1.0
    gyro_bias: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    pot_sigma: float = 0.0005
    ultrasonic_sigma: float = 0.001
    quantize: bool = False

    __keys__ = {
        "acc_sigma": "acc_sigma_counts",
        "gyro_sigma": "gyro_sigma_counts",
        "gyro_bias": "gyro_bias_dps",
        "ultrasonic_sigma": "ultrasonic_sigma_m",
    }
    __converter__ = {
        "acc_sigma": as_float,
        "gyro_sigma": as_float,
        "gyro_bias": as_floats(3),
        "pot_sigma": as_float,
        "ultrasonic_sigma": as_float,
        "quantize": as_bool,
    }

    def __post_init__(self):
        for name in ("acc_sigma", "gyro_sigma", "pot_sigma", "ultrasonic_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


NOISELESS = SensorNoise(0.0, 0.0, (0.0, 0.0, 0.0), 0.0, 0.0)


@dataclass(frozen=True)
class SensorFrame:
    imu: ImuSample
    pots: Tuple[float, float, float, float]
    clearance: float


def gravity_counts(attitude: Attitude, cal: ImuCalibration) -> Tuple[float, float, float]:
    """Accelerometer counts for a static chassis; inverse of the atan2 attitude reading."""
    tan_roll, tan_pitch = math.tan(attitude.roll), math.tan(attitude.pitch)
    norm = math.sqrt(1.0 + tan_roll * tan_roll + tan_pitch * tan_pitch)
    counts = [0.0, 0.0, 0.0]
    axes = cal.axes
    counts[axes.roll_axis] = cal.acc_counts_per_g * tan_roll / norm
    counts[axes.pitch_axis] = cal.acc_counts_per_g * tan_pitch / norm
    counts[axes.vertical_axis] = cal.acc_counts_per_g / norm
    zero = cal.acc_zero_counts
    return counts[0] + zero, counts[1] + zero, counts[2] + zero


def gyro_counts(
    rate: Tuple[float, float], bias_dps: Sequence[float], cal: ImuCalibration
) -> Tuple[float, float, float]:
    """Gyro counts for a (pitch, roll) rate in rad/s plus a per-channel bias in deg/s."""
    dps = [0.0, 0.0, 0.0]
    dps[cal.axes.pitch_axis] = math.degrees(rate[0])
    dps[cal.axes.roll_axis] = math.degrees(rate[1])
    return (
        cal.gyro_zero[0] + cal.gyro_sensitivity * (dps[0] + bias_dps[0]),
        cal.gyro_zero[1] + cal.gyro_sensitivity * (dps[1] + bias_dps[1]),
        cal.gyro_zero[2] + cal.gyro_sensitivity * (dps[2] + bias_dps[2]),
    )


class SensorModel:
    """Synthesises IMU counts, potentiometer readings and ultrasonic clearance from the true rover state.

    Every call draws the same number of variates in the same order, so a seed fixes the whole stream.
    """

    def __init__(self, cal: ImuCalibration, noise: Optional[SensorNoise] = None, seed: int = 0):
        self.cal = cal
        self.noise = noise or SensorNoise()
        self.rng = np.random.default_rng(seed)

    def _adc(self, values: Sequence[float], sigma: float) -> Tuple[float, float, float]:
        noisy = np.clip(np.asarray(values) + self.rng.normal(0.0, sigma, 3), 0.0, self.cal.adc_full_scale)
        if self.noise.quantize:
            noisy = np.round(noisy)
        return float(noisy[0]), float(noisy[1]), float(noisy[2])

    def sense(self, rover: RoverState) -> SensorFrame:
        noise = self.noise
        acc = self._adc(gravity_counts(rover.attitude, self.cal), noise.acc_sigma)
        gyro = self._adc(gyro_counts(rover.attitude_rate, noise.gyro_bias, self.cal), noise.gyro_sigma)
        pots = np.clip(np.asarray(rover.pot_readings) + self.rng.normal(0.0, noise.pot_sigma, 4), 0.0, 1.0)
        clearance = rover.clearance + float(self.rng.normal(0.0, noise.ultrasonic_sigma))
        return SensorFrame(ImuSample(rover.t, acc, gyro), quad(pots.tolist()), clearance)


def sense(
    rover: RoverState, cal: ImuCalibration, seed: int, noise: Optional[SensorNoise] = None
) -> SensorFrame:
    """One-shot reading from a fresh generator."""
    return SensorModel(cal, noise, seed).sense(rover)
