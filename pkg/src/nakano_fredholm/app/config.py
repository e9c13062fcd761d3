from enum import Enum, unique

from abc import ABC

import os

from typing import Any

from .errors import InputError

_PREFIX = "NAKANO_FREDHOLM"


@unique
class CommandType(Enum):
    """Supported commands"""
    CARLESON = "carleson"
    INDICES = "indices"
    SPIRALITY = "spirality"
    BOUNDED_M = "bounded-m"
    BOUNDED_S = "bounded-s"
    PROFILE = "profile"
    LEAF = "leaf"
    FREDHOLM = "fredholm"
    VALIDATE = "validate"

    @staticmethod
    def values() -> list[str]:
        return [str(CommandType(e).value) for e in CommandType]


@unique
class CurveKind(Enum):
    """Supported curve families"""
    UNIT_CIRCLE = "unit_circle"
    SMOOTH_JORDAN = "smooth_jordan"
    LOG_SPIRAL = "log_spiral"
    POLYLINE = "polyline"

    @staticmethod
    def values() -> list[str]:
        return [str(CurveKind(e).value) for e in CurveKind]


@unique
class ExponentKind(Enum):
    CONSTANT = "constant"
    TABLE = "table"
    FORMULA = "formula"

    @staticmethod
    def values() -> list[str]:
        return [str(ExponentKind(e).value) for e in ExponentKind]


@unique
class FactorKind(Enum):
    """Single-singularity weight factors"""
    POWER = "power"
    RADIAL = "radial"
    ETA = "eta"
    PHI = "phi"

    @staticmethod
    def values() -> list[str]:
        return [str(FactorKind(e).value) for e in FactorKind]


@unique
class SymbolKind(Enum):
    CONSTANT = "constant"
    JUMPS = "jumps"
    TABLE = "table"

    @staticmethod
    def values() -> list[str]:
        return [str(SymbolKind(e).value) for e in SymbolKind]


@unique
class Verdict(Enum):
    """Outcome of a decision with strict inequalities and a margin tolerance"""
    YES = "Yes"
    NO = "No"
    BORDERLINE = "Borderline"

    @staticmethod
    def values() -> list[str]:
        return [str(Verdict(e).value) for e in Verdict]


@unique
class FredholmVerdict(Enum):
    FREDHOLM = "FREDHOLM"
    NOT_FREDHOLM = "NOT FREDHOLM"
    BORDERLINE = "BORDERLINE"

    @staticmethod
    def values() -> list[str]:
        return [str(FredholmVerdict(e).value) for e in FredholmVerdict]


@unique
class TrendVerdict(Enum):
    """Classification of smallest singular values of finite sections as N grows"""
    PLATEAU = "Plateau"
    DECAY = "Decay"
    INCONCLUSIVE = "Inconclusive"

    @staticmethod
    def values() -> list[str]:
        return [str(TrendVerdict(e).value) for e in TrendVerdict]


def env_out_dir(default: str = "out") -> str:
    return os.environ.get(f"{_PREFIX}_OUT_DIR", default)


def env_curve_resolution(default: int = 2 ** 14) -> int:
    value = os.environ.get(f"{_PREFIX}_CURVE_RESOLUTION")
    try:
        return int(value) if value else default
    except ValueError:
        raise InputError(f"{_PREFIX}_CURVE_RESOLUTION must be an integer, found: {value}")


def env_workers(default: int = 1) -> int:
    value = os.environ.get(f"{_PREFIX}_WORKERS")
    try:
        return max(1, int(value)) if value else default
    except ValueError:
        raise InputError(f"{_PREFIX}_WORKERS must be an integer, found: {value}")


def number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{path}: expected a number, found: {value!r}")
    return float(value)


def integer(value: Any, path: str) -> int:
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{path}: expected an integer, found: {value!r}")
    return value


def table(value: Any, path: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise InputError(f"{path}: expected a table, found: {value!r}")
    return value


def array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise InputError(f"{path}: expected an array, found: {value!r}")
    return value


def coordinates(value: Any, path: str) -> complex:
    """An [x, y] pair"""
    if not isinstance(value, list) or len(value) != 2:
        raise InputError(f"{path}: expected [x, y], found: {value!r}")
    return complex(number(value[0], f"{path}[0]"), number(value[1], f"{path}[1]"))


def rows(value: Any, width: int, path: str) -> list[tuple[float, ...]]:
    """An array of arrays holding `width` numbers each"""
    result = []
    for idx, row in enumerate(array(value, path)):
        if not isinstance(row, list) or len(row) != width:
            raise InputError(f"{path}[{idx}]: expected {width} numbers, found: {row!r}")
        result.append(tuple(number(v, f"{path}[{idx}][{k}]") for k, v in enumerate(row)))
    return result


class CurveConfig(ABC):
    """Builds a curve from the parameters of a scene's [curve] table"""

    @property
    def kind(self) -> CurveKind:
        raise NotImplementedError

    @property
    def required_keys(self) -> list[str]:
        raise NotImplementedError

    def build(self, record: dict[str, Any], resolution: int) -> Any:
        raise NotImplementedError

    def _require(self, record: dict[str, Any]) -> None:
        missing = [k for k in self.required_keys if k not in record]
        if missing:
            raise InputError(f"curve.{missing[0]}: required for kind '{self.kind.value}'")

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(kind={self.kind.value}, required_keys={self.required_keys})"


class UnitCircleConfig(CurveConfig):
    @property
    def kind(self) -> CurveKind:
        return CurveKind.UNIT_CIRCLE

    @property
    def required_keys(self) -> list[str]:
        return []

    def build(self, record: dict[str, Any], resolution: int) -> Any:
        from .curve import UnitCircle
        return UnitCircle(resolution)


class SmoothJordanConfig(CurveConfig):
    @property
    def kind(self) -> CurveKind:
        return CurveKind.SMOOTH_JORDAN

    @property
    def required_keys(self) -> list[str]:
        return ['coefficients']

    def build(self, record: dict[str, Any], resolution: int) -> Any:
        from .curve import SmoothJordan
        self._require(record)
        terms = rows(record['coefficients'], 3, 'curve.coefficients')
        coefficients = [(integer(k, f"curve.coefficients[{idx}][0]"), complex(re, im))
                        for idx, (k, re, im) in enumerate(terms)]
        return SmoothJordan(coefficients, resolution)


class LogSpiralConfig(CurveConfig):
    @property
    def kind(self) -> CurveKind:
        return CurveKind.LOG_SPIRAL

    @property
    def required_keys(self) -> list[str]:
        return ['delta']

    def build(self, record: dict[str, Any], resolution: int) -> Any:
        from .curve import LogSpiralAttached
        self._require(record)
        base_record = dict(table(record.get('base', {'kind': CurveKind.UNIT_CIRCLE.value}), 'curve.base'))
        if base_record.get('kind') == CurveKind.LOG_SPIRAL.value:
            raise InputError("curve.base.kind: a spiral cannot be attached to a spiral")
        base = ConfigFactory().get_curve_config(base_record.get('kind', '')).build(
            base_record, resolution)
        attach = coordinates(record.get('attach', [1.0, 0.0]), 'curve.attach')
        return LogSpiralAttached(base, attach, number(record['delta'], 'curve.delta'),
                                 number(record.get('radius', 0.5), 'curve.radius'))


class PolylineConfig(CurveConfig):
    @property
    def kind(self) -> CurveKind:
        return CurveKind.POLYLINE

    @property
    def required_keys(self) -> list[str]:
        return ['points']

    def build(self, record: dict[str, Any], resolution: int) -> Any:
        from .curve import PolylineSampled
        self._require(record)
        points = [complex(x, y) for x, y in rows(record['points'], 2, 'curve.points')]
        closed = record.get('closed', False)
        if not isinstance(closed, bool):
            raise InputError(f"curve.closed: expected true or false, found: {closed!r}")
        return PolylineSampled(points, closed, resolution)


class ConfigFactory:
    def __init__(self):
        self.__configs = {
            CurveKind.UNIT_CIRCLE.value: UnitCircleConfig(),
            CurveKind.SMOOTH_JORDAN.value: SmoothJordanConfig(),
            CurveKind.LOG_SPIRAL.value: LogSpiralConfig(),
            CurveKind.POLYLINE.value: PolylineConfig()
        }

    def get_curve_config(self, kind: str) -> CurveConfig:
        kind = str(kind).lower()
        result = self.__configs.get(kind)
        if not result:
            raise InputError(f"Unsupported curve kind: {kind}")
        return result
