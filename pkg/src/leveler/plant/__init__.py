from .actuator import ActuatorSpec as ActuatorSpec
from .actuator import ActuatorState as ActuatorState
from .actuator import make_actuator as make_actuator
from .actuator import static_load as static_load
from .actuator import step_actuator as step_actuator
from .motion import MotionScript as MotionScript
from .motion import Pose as Pose
from .motion import Waypoint as Waypoint
from .rover import ChassisLayout as ChassisLayout
from .rover import Rover as Rover
from .rover import RoverState as RoverState
from .rover import chassis_attitude_from_heights as chassis_attitude_from_heights
from .rover import corner_height as corner_height
from .sensor import NOISELESS as NOISELESS
from .sensor import SensorFrame as SensorFrame
from .sensor import SensorModel as SensorModel
from .sensor import SensorNoise as SensorNoise
from .sensor import sense as sense
from .terrain import Composite as Composite
from .terrain import Flat as Flat
from .terrain import Ramp as Ramp
from .terrain import Sinusoid as Sinusoid
from .terrain import Step as Step
from .terrain import Terrain as Terrain
from .terrain import parse_terrain as parse_terrain
