from .runner import Simulator as Simulator
from .runner import run_batch as run_batch
from .runner import run_scenario as run_scenario
from .scenario import Finding as Finding
from .scenario import Scenario as Scenario
from .scenario import load_scenario as load_scenario
from .scenario import validate_scenario as validate_scenario
from .telemetry import HEADER as HEADER
from .telemetry import SummaryReport as SummaryReport
from .telemetry import TelemetryRecord as TelemetryRecord
from .telemetry import read_telemetry as read_telemetry
from .telemetry import save_telemetry as save_telemetry
from .telemetry import summarize as summarize
from .telemetry import write_telemetry as write_telemetry
