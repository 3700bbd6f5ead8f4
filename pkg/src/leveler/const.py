from enum import Enum, IntEnum

GRAVITY = 9.80665
HEIGHT_LIMIT_FRACTION = 0.95


class Corner(IntEnum):
    FRONT_LEFT = 0
    REAR_LEFT = 1
    REAR_RIGHT = 2
    FRONT_RIGHT = 3

    @property
    def label(self) -> str:
        return f"W{self.value + 1}"


LEFT = (Corner.FRONT_LEFT, Corner.REAR_LEFT)
RIGHT = (Corner.FRONT_RIGHT, Corner.REAR_RIGHT)
FRONT = (Corner.FRONT_LEFT, Corner.FRONT_RIGHT)
REAR = (Corner.REAR_LEFT, Corner.REAR_RIGHT)


class Convention(str, Enum):
    RAW_PI_LEVEL = "raw_pi_level"
    ZERO_LEVEL = "zero_level"


class Phase(str, Enum):
    IDLE = "IDLE"
    CORRECT_ROLL = "CORRECT_ROLL"
    CORRECT_PITCH = "CORRECT_PITCH"
    CORRECT_CLEARANCE = "CORRECT_CLEARANCE"


class CorrectionMode(str, Enum):
    SYMMETRIC = "symmetric"
    SINGLE_PAIR = "single_pair"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    CONFIG = 2
    NUMERIC = 3
