from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Callable, ClassVar, Dict, Sequence, Tuple, TypeVar

from loguru import logger

from .const import Convention
from .exception import ConfigError, LevelerError

T = TypeVar("T", bound="ModelBase")


def join_path(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


class Nested:
    """Converter for values that are themselves models (or lists of models).

    The wrapped parser receives the dotted key path so errors point at the nested key.
    """

    def __init__(self, parser: Callable[[Any, str], Any], many: bool = False, size: int | None = None):
        self.parser = parser
        self.many = many
        self.size = size

    def __call__(self, value: Any, path: str):
        if not self.many:
            return self.parser(value, path)
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list, got {type(value).__name__}")
        if self.size is not None and len(value) != self.size:
            raise ConfigError(path, f"expected {self.size} entries, got {len(value)}")
        return tuple(self.parser(item, f"{path}[{index}]") for index, item in enumerate(value))


def as_float(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")
    return float(value)


def as_bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise TypeError(f"expected true or false, got {value!r}")
    return value


def as_floats(size: int) -> Callable[[Any], Tuple[float, ...]]:
    def convert(value: Any) -> Tuple[float, ...]:
        if not isinstance(value, (list, tuple)) or len(value) != size:
            raise TypeError(f"expected a list of {size} numbers, got {value!r}")
        return tuple(as_float(v) for v in value)

    return convert


def degrees_to_radians(value: Any) -> float:
    return math.radians(as_float(value))


@dataclass(frozen=True)
class ModelBase:
    __converter__: ClassVar[Dict[str, Callable[..., Any]]] = {}
    __keys__: ClassVar[Dict[str, str]] = {}

    @classmethod
    def parse(cls: type[T], raw: Any, path: str = "") -> T:
        if not isinstance(raw, dict):
            raise ConfigError(path, f"expected an object, got {type(raw).__name__}")
        data = {}
        known = set()
        for fd in fields(cls):
            if not fd.init:
                continue
            key = cls.__keys__.get(fd.name, fd.name)
            known.add(key)
            if key not in raw:
                continue
            sub = join_path(path, key)
            converter = cls.__converter__.get(fd.name)
            try:
                if converter is None:
                    data[fd.name] = raw[key]
                elif isinstance(converter, Nested):
                    data[fd.name] = converter(raw[key], sub)
                else:
                    data[fd.name] = converter(raw[key])
            except ConfigError:
                raise
            except (TypeError, ValueError, LevelerError) as e:
                raise ConfigError(sub, str(e)) from e
        for key in sorted(set(raw) - known):
            logger.warning(f"ignoring unknown configuration key {join_path(path, key)!r}")
        try:
            return cls(**data)  # type: ignore
        except ConfigError:
            raise
        except TypeError as e:
            raise ConfigError(path, f"missing or invalid field: {e}") from e
        except (ValueError, LevelerError) as e:
            raise ConfigError(path, str(e)) from e

    def dump(self) -> dict:
        res: Dict[str, Any] = {}
        for fd in fields(self):
            value = getattr(self, fd.name)
            res[self.__keys__.get(fd.name, fd.name)] = _dump_value(value)
        return res


def _dump_value(value: Any) -> Any:
    if isinstance(value, ModelBase):
        return value.dump()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_dump_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _dump_value(v) for k, v in value.items()}
    return value


@dataclass(frozen=True)
class Attitude(ModelBase):
    """Chassis pitch and roll in radians.

    In ``zero_level`` a level chassis reads (0, 0); ``raw_pi_level`` is the accelerometer form,
    where level reads (π, π).
    """

    pitch: float
    roll: float
    convention: Convention = Convention.ZERO_LEVEL

    __converter__ = {"convention": Convention}

    def to_zero_level(self) -> Attitude:
        if self.convention is Convention.ZERO_LEVEL:
            return self
        return Attitude(self.pitch - math.pi, self.roll - math.pi, Convention.ZERO_LEVEL)

    def to_raw(self) -> Attitude:
        if self.convention is Convention.RAW_PI_LEVEL:
            return self
        return Attitude(self.pitch + math.pi, self.roll + math.pi, Convention.RAW_PI_LEVEL)

    @property
    def pair(self) -> Tuple[float, float]:
        return self.pitch, self.roll


LEVEL = Attitude(0.0, 0.0)


def quad(values: Sequence[float]) -> Tuple[float, float, float, float]:
    if len(values) != 4:
        raise ValueError(f"expected one value per corner, got {len(values)}")
    return (float(values[0]), float(values[1]), float(values[2]), float(values[3]))
