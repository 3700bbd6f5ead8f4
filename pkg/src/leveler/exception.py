from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .sim.scenario import Finding


class LevelerError(Exception):
    pass


class DomainError(LevelerError):
    pass


class OutOfDomainError(DomainError):
    pass


class OutOfRangeError(DomainError):
    def __init__(self, message: str, b_min: float, b_max: float):
        super().__init__(f"{message} (reachable [{b_min!r}, {b_max!r}])")
        self.b_min = b_min
        self.b_max = b_max


class IndeterminateAttitudeError(DomainError):
    pass


class StreamOrderError(DomainError):
    pass


class GeometryError(LevelerError):
    pass


class NumericalDegeneracyError(LevelerError):
    pass


class ConfigError(LevelerError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.reason = message


class ScenarioValidationError(ConfigError):
    def __init__(self, findings: Sequence[Finding]):
        first = findings[0]
        super().__init__(first.path, "; ".join(f"{f.path}: {f.message}" for f in findings))
        self.findings = list(findings)


class PowerTableError(ConfigError):
    pass
