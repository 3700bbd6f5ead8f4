from .const import Convention as Convention
from .const import Corner as Corner
from .const import CorrectionMode as CorrectionMode
from .const import Phase as Phase
from .controller import ControllerConfig as ControllerConfig
from .controller import ControllerState as ControllerState
from .controller import control_tick as control_tick
from .controller import plan_correction as plan_correction
from .controller import track_targets as track_targets
from .estimation import AttitudeEstimator as AttitudeEstimator
from .estimation import EstimatorConfig as EstimatorConfig
from .estimation import ImuCalibration as ImuCalibration
from .estimation import ImuSample as ImuSample
from .estimation import KalmanState as KalmanState
from .estimation import accel_attitude as accel_attitude
from .estimation import estimate_attitude as estimate_attitude
from .estimation import gyro_rate as gyro_rate
from .estimation import integrate_gyro as integrate_gyro
from .estimation import kalman_predict as kalman_predict
from .estimation import kalman_update as kalman_update
from .kinematics import ExtensionTable as ExtensionTable
from .kinematics import LeverArms as LeverArms
from .kinematics import LinkAngle as LinkAngle
from .kinematics import SuspensionGeometry as SuspensionGeometry
from .kinematics import angle_for_height as angle_for_height
from .kinematics import extension_for_angle as extension_for_angle
from .kinematics import extension_for_height as extension_for_height
from .kinematics import height_for_extension as height_for_extension
from .kinematics import lever_displacement_ratio as lever_displacement_ratio
from .kinematics import lever_output_force as lever_output_force
from .model import Attitude as Attitude
from .power import BatteryBank as BatteryBank
from .power import PowerRow as PowerRow
from .power import audit_table as audit_table
from .power import row_energy as row_energy
from .power import runtime_estimate as runtime_estimate
from .sim import Scenario as Scenario
from .sim import load_scenario as load_scenario
from .sim import run_scenario as run_scenario
from .sim import validate_scenario as validate_scenario

__version__ = "0.1.0"
