"""
Scene files: one TOML document describing the curve, the exponent, the weight,
the symbols and the tolerances a command runs on.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from .config import (ConfigFactory, ExponentKind, FactorKind, SymbolKind, array, coordinates,
                     env_curve_resolution, integer, number, rows, table)
from .curve import CurveModel
from .errors import InputError
from .fredholm import DEFAULT_TOLERANCE, Jump, PCSymbol, SpaceSpec
from .indices import DEFAULT_DECADES
from .lab import DEFAULT_ORDERS
from .paths import Paths
from .spaces import (EtaPower, ExponentField, PhiGamma, Power, RadialOscillating, Weight,
                     WeightFactor)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)

SCHEMA = 1


@dataclass(frozen=True)
class LabSettings:
    orders: list[int] = field(default_factory=lambda: list(DEFAULT_ORDERS))
    jumps: int = 100
    pairs: int = 50


@dataclass(frozen=True, eq=False)
class SceneConfig:
    path: str
    curve: CurveModel
    exponent: Optional[ExponentField]
    weight: Weight
    a: Optional[PCSymbol]
    b: Optional[PCSymbol]
    tol: float = DEFAULT_TOLERANCE
    decades: int = DEFAULT_DECADES
    points: list[complex] = field(default_factory=list)
    lab: LabSettings = field(default_factory=LabSettings)

    @property
    def space(self) -> SpaceSpec:
        if self.exponent is None:
            raise InputError(f"{self.path}: exponent: required for this command")
        return SpaceSpec(self.curve, self.exponent, self.weight, self.tol, self.decades)

    def symbols(self) -> tuple[PCSymbol, PCSymbol]:
        if self.a is None:
            raise InputError(f"{self.path}: symbols.a: required for this command")
        return self.a, self.b if self.b is not None else PCSymbol.constant(self.curve, 1.0, 'b')

    def focus_points(self) -> list[complex]:
        """[points] if given, else the weight singularities, else the jump points, else sample 0"""
        if self.points:
            return self.points
        singular = [complex(self.curve.points[j]) for j in self.weight.singular_indices(self.curve)]
        if singular:
            return singular
        jumps = [jump.t for symbol in (self.a, self.b) if symbol is not None for jump in symbol.jumps()]
        return jumps or [complex(self.curve.points[0])]

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}({self.path}: {self.curve}, {self.exponent}, "
                f"w={self.weight}, tol={self.tol:g}, decades={self.decades})")

    @staticmethod
    def load(path: str, tol: Optional[float] = None, decades: Optional[int] = None,
             resolution: Optional[int] = None) -> 'SceneConfig':
        path = Paths.require_path(path, "Run option: 'config' is required.")
        with open(path, 'rb') as file:
            try:
                document = tomllib.load(file)
            except tomllib.TOMLDecodeError as ex:
                raise InputError(f"{path}: {ex}") from ex
        return SceneConfig.of_dict(document, path, tol, decades, resolution)

    @staticmethod
    def of_dict(document: dict[str, Any], path: str = '<scene>', tol: Optional[float] = None,
                decades: Optional[int] = None, resolution: Optional[int] = None) -> 'SceneConfig':
        try:
            return _SceneParser(document, resolution).parse(path, tol, decades)
        except InputError as ex:
            raise InputError(f"{path}: {ex}") from ex


def _table(document: dict[str, Any], key: str) -> dict[str, Any]:
    return table(document.get(key, {}), key)


def _float(record: dict[str, Any], key: str, path: str, default: Optional[float] = None) -> float:
    if key not in record:
        if default is None:
            raise InputError(f"{path}.{key}: required")
        return default
    return number(record[key], f"{path}.{key}")


def _complex(value: Any, path: str) -> complex:
    """A real number or an [re, im] pair"""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list):
        return coordinates(value, path)
    raise InputError(f"{path}: expected a number or [re, im], found: {value!r}")


class _SceneParser:
    def __init__(self, document: dict[str, Any], resolution: Optional[int]):
        self.__document = document
        self.__resolution = resolution

    def parse(self, path: str, tol: Optional[float], decades: Optional[int]) -> SceneConfig:
        document = self.__document
        schema = document.get('schema')
        if schema != SCHEMA:
            raise InputError(f"schema: expected {SCHEMA}, found: {schema!r}")
        curve = self._curve(_table(document, 'curve'))
        exponent = self._exponent(curve, document['exponent']) if 'exponent' in document else None
        weight = self._weight(curve, document.get('weight', []))
        symbols = _table(document, 'symbols')
        a = self._symbol(curve, symbols['a'], 'symbols.a') if 'a' in symbols else None
        b = self._symbol(curve, symbols['b'], 'symbols.b') if 'b' in symbols else None

        tolerances = _table(document, 'tolerances')
        grids = _table(document, 'grids')
        scene_tol = _float(tolerances, 'margin', 'tolerances', DEFAULT_TOLERANCE)
        scene_decades = integer(grids.get('decades', DEFAULT_DECADES), 'grids.decades')
        points = [self._point(curve, value, f"points.at[{idx}]")
                  for idx, value in enumerate(array(_table(document, 'points').get('at', []), 'points.at'))]
        result = SceneConfig(path, curve, exponent, weight, a, b,
                             scene_tol if tol is None else float(tol),
                             scene_decades if decades is None else int(decades),
                             points, self._lab(_table(document, 'lab')))
        if result.tol <= 0:
            raise InputError(f"tolerances.margin: must be positive, found: {result.tol}")
        logger.debug(f"Loaded {result}")
        return result

    def _curve(self, record: dict[str, Any]) -> CurveModel:
        if 'kind' not in record:
            raise InputError("curve.kind: required")
        resolution = integer(record.get('resolution', self.__resolution or env_curve_resolution()),
                             'curve.resolution')
        if resolution < 16:
            raise InputError(f"curve.resolution: at least 16 samples are required, found: {resolution}")
        return ConfigFactory().get_curve_config(record['kind']).build(record, resolution)

    @staticmethod
    def _point(curve: CurveModel, value: Any, path: str) -> complex:
        point = _complex(value, path)
        try:
            return complex(curve.points[curve.index_of(point)])
        except InputError as ex:
            raise InputError(f"{path}: {ex}")

    def _exponent(self, curve: CurveModel, record: Any) -> ExponentField:
        if isinstance(record, (int, float)) and not isinstance(record, bool):
            return ExponentField.constant(curve, float(record))
        record = table(record, 'exponent')
        kind = str(record.get('kind', ExponentKind.CONSTANT.value)).lower()
        if kind == ExponentKind.CONSTANT.value:
            return ExponentField.constant(curve, _float(record, 'value', 'exponent'))
        if kind == ExponentKind.TABLE.value:
            return ExponentField.table(curve, rows(record.get('nodes', []), 2, 'exponent.nodes'))
        if kind == ExponentKind.FORMULA.value:
            if 'name' not in record:
                raise InputError("exponent.name: required for kind 'formula'")
            params = {k: number(v, f"exponent.{k}") for k, v in record.items() if k not in ('kind', 'name')}
            return ExponentField.formula(curve, str(record['name']), **params)
        raise InputError(f"exponent.kind: expected one of {ExponentKind.values()}, found: {kind}")

    def _weight(self, curve: CurveModel, records: Any) -> Weight:
        if not isinstance(records, list):
            raise InputError("weight: expected an array of tables [[weight]]")
        return Weight([self._factor(curve, table(record, f"weight[{idx}]"), f"weight[{idx}]")
                       for idx, record in enumerate(records)])

    def _factor(self, curve: CurveModel, record: dict[str, Any], path: str) -> WeightFactor:
        if 'at' not in record:
            raise InputError(f"{path}.at: required")
        t0 = self._point(curve, record['at'], f"{path}.at")
        kind = str(record.get('kind', '')).lower()
        if kind == FactorKind.POWER.value:
            return Power(t0, _float(record, 'lambda', path))
        if kind == FactorKind.ETA.value:
            return EtaPower(t0, _float(record, 'x', path, 1.0))
        if kind == FactorKind.PHI.value:
            if 'gamma' not in record:
                raise InputError(f"{path}.gamma: required")
            return PhiGamma(t0, _complex(record['gamma'], f"{path}.gamma"))
        if kind == FactorKind.RADIAL.value:
            for key in ('radii', 'values'):
                if key not in record:
                    raise InputError(f"{path}.{key}: required")
            radii = [number(r, f"{path}.radii[{idx}]")
                     for idx, r in enumerate(array(record['radii'], f"{path}.radii"))]
            values = [number(v, f"{path}.values[{idx}]")
                      for idx, v in enumerate(array(record['values'], f"{path}.values"))]
            try:
                return RadialOscillating(t0, radii, values)
            except InputError as ex:
                raise InputError(f"{path}: {ex}")
        raise InputError(f"{path}.kind: expected one of {FactorKind.values()}, found: {kind!r}")

    def _symbol(self, curve: CurveModel, record: Any, path: str) -> PCSymbol:
        label = path.split('.')[-1]
        if not isinstance(record, dict):
            return PCSymbol.constant(curve, _complex(record, path), label)
        kind = str(record.get('kind', SymbolKind.CONSTANT.value)).lower()
        if kind == SymbolKind.CONSTANT.value:
            return PCSymbol.constant(curve, _complex(record.get('value', 1.0), f"{path}.value"), label)
        if kind == SymbolKind.JUMPS.value:
            jumps = []
            for idx, jump in enumerate(array(record.get('jumps', []), f"{path}.jumps")):
                where = f"{path}.jumps[{idx}]"
                jump = table(jump, where)
                for key in ('at', 'left', 'right'):
                    if key not in jump:
                        raise InputError(f"{where}.{key}: required")
                jumps.append(Jump(self._point(curve, jump['at'], f"{where}.at"),
                                  _complex(jump['left'], f"{where}.left"),
                                  _complex(jump['right'], f"{where}.right")))
            if not jumps:
                raise InputError(f"{path}.jumps: at least one jump is required")
            return PCSymbol.with_jumps(curve, jumps, label)
        if kind == SymbolKind.TABLE.value:
            nodes = [(s, complex(re, im)) for s, re, im in rows(record.get('nodes', []), 3, f"{path}.nodes")]
            return PCSymbol.table(curve, nodes, label)
        raise InputError(f"{path}.kind: expected one of {SymbolKind.values()}, found: {kind!r}")

    @staticmethod
    def _lab(record: dict[str, Any]) -> LabSettings:
        orders = [integer(n, f"lab.orders[{idx}]")
                  for idx, n in enumerate(array(record.get('orders', list(DEFAULT_ORDERS)), 'lab.orders'))]
        return LabSettings(orders, integer(record.get('jumps', 100), 'lab.jumps'),
                           integer(record.get('pairs', 50), 'lab.pairs'))
