"""
Variable exponents, weights and the function-space machinery on a curve.

Functions on the curve are arrays of sample values. Integrals over portions use
the linear interpolant on each chord. A chord that ends at a non-finite sample
(a weight singularity) is closed by a local fit through the two neighbouring
samples, so that integrable singularities integrate exactly for power laws.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .config import ExponentKind, FactorKind
from .curve import ArcPortion, CurveModel, Point, Sites
from .errors import InputError, NotInSpaceError

logger = logging.getLogger(__name__)

CLOSURES = ('auto', 'power', 'log')
DIVERGENCE_RATIO = 1.5
EQUIVALENCE_DRIFT = 5e-3
# power fits within this of r^-1 are read as the non-integrable r^-1
NON_INTEGRABLE_SLACK = 1e-9


class ExponentField:
    """A variable exponent p(·) sampled on the curve, linear along chords"""
    FORMULAS = ('constant', 'linear', 'cosine', 'distance', 'dini_boundary')

    def __init__(self, curve: CurveModel, values: np.ndarray, label: str = ExponentKind.TABLE.value):
        values = np.asarray(values, dtype=float)
        if values.shape != (curve.resolution,):
            raise InputError(f"exponent: expected {curve.resolution} samples, found: {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("exponent: values must be finite")
        if np.min(values) <= 1.0:
            raise InputError(f"exponent: min p must exceed 1, found: {np.min(values)}")
        self.__curve = curve
        self.__values = values
        self.__label = label

    @staticmethod
    def constant(curve: CurveModel, p: float) -> 'ExponentField':
        return ExponentField(curve, np.full(curve.resolution, float(p)), f"constant {p}")

    @staticmethod
    def table(curve: CurveModel, nodes: Sequence[tuple[float, float]]) -> 'ExponentField':
        """p given at arclength nodes, linear in between; periodic on closed curves"""
        if len(nodes) < 1:
            raise InputError("exponent.nodes: at least one node is required")
        s = np.array([float(n[0]) for n in nodes])
        p = np.array([float(n[1]) for n in nodes])
        order = np.argsort(s)
        s, p = s[order], p[order]
        if curve.closed:
            values = np.interp(curve.arclength, s, p, period=curve.length)
        else:
            values = np.interp(curve.arclength, s, p)
        return ExponentField(curve, values, ExponentKind.TABLE.value)

    @staticmethod
    def formula(curve: CurveModel, name: str, **params: float) -> 'ExponentField':
        s = curve.arclength
        try:
            if name == 'constant':
                return ExponentField.constant(curve, params['value'])
            if name == 'linear':
                if curve.closed:
                    raise InputError("exponent.name: 'linear' needs an open curve, use 'cosine'")
                values = params['start'] + (params['end'] - params['start']) * s / curve.length
            elif name == 'cosine':
                values = params['start'] + (params['end'] - params['start']) * 0.5 * (
                    1.0 - np.cos(2 * math.pi * s / curve.length))
            elif name == 'distance':
                centre = complex(params.get('center_re', 1.0), params.get('center_im', 0.0))
                values = params['base'] + params.get('scale', 1.0) * np.abs(curve.points - centre)
            elif name == 'dini_boundary':
                centre = complex(params.get('center_re', 1.0), params.get('center_im', 0.0))
                r = np.abs(curve.points - centre)
                with np.errstate(divide='ignore'):
                    tail = np.where(r > 0, 1.0 / (1.0 - np.log(np.where(r > 0, r, 1.0))), 0.0)
                values = params['base'] + params.get('scale', 1.0) * tail
            else:
                raise InputError(f"exponent.name: unsupported formula '{name}', "
                                 f"expected one of {ExponentField.FORMULAS}")
        except KeyError as ex:
            raise InputError(f"exponent.{ex.args[0]}: required by formula '{name}'")
        return ExponentField(curve, values, f"formula {name}")

    @property
    def curve(self) -> CurveModel:
        return self.__curve

    @property
    def values(self) -> np.ndarray:
        return self.__values

    @property
    def label(self) -> str:
        return self.__label

    @property
    def p_min(self) -> float:
        return float(np.min(self.__values))

    @property
    def p_max(self) -> float:
        return float(np.max(self.__values))

    def is_constant(self) -> bool:
        return self.p_min == self.p_max

    def at(self, t: Point) -> float:
        return float(self.__values[self.__curve.index_of(t)])

    def at_sites(self, sites: Sites) -> np.ndarray:
        return self.__curve.interpolate(self.__values, sites)

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.__label}, min={self.p_min:.6g}, max={self.p_max:.6g})"


class WeightFactor(ABC):
    """A positive function on the curve with a single singularity at t0"""
    def __init__(self, t0: complex):
        self.__t0 = complex(t0)

    @property
    def t0(self) -> complex:
        return self.__t0

    @property
    @abstractmethod
    def kind(self) -> FactorKind:
        pass

    @abstractmethod
    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        """log ψ at the sites; ±inf or NaN at t0 itself"""
        pass

    @abstractmethod
    def power(self, s: float) -> 'WeightFactor':
        """The factor ψ^s"""
        pass

    def evaluate(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        with np.errstate(over='ignore'):
            return np.exp(self.log_values(curve, sites))

    def _centred(self, curve: CurveModel, sites: Sites) -> Sites:
        j = curve.index_of(self.__t0)
        if sites.centre_index == j:
            return sites
        centre = complex(curve.points[j])
        return Sites(j, centre, sites.chords, sites.fractions, sites.points - centre)

    def _log_distance(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(np.abs(self._centred(curve, sites).offsets))

    def _arg(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        return curve.arg_at(self._centred(curve, sites))


class Power(WeightFactor):
    """|τ−t0|^λ"""
    def __init__(self, t0: complex, exponent: float):
        super().__init__(t0)
        self.exponent = float(exponent)

    @property
    def kind(self) -> FactorKind:
        return FactorKind.POWER

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        if self.exponent == 0:
            return np.zeros(len(sites))
        return self.exponent * self._log_distance(curve, sites)

    def power(self, s: float) -> 'Power':
        return Power(self.t0, self.exponent * s)

    def __str__(self) -> str:
        return f"|τ-{self.t0:.4g}|^{self.exponent:g}"


class RadialOscillating(WeightFactor):
    """ω(|τ−t0|) for a positive table ω, interpolated linearly in log r − log ω"""
    def __init__(self, t0: complex, radii: Sequence[float], values: Sequence[float]):
        super().__init__(t0)
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if len(radii) < 2 or radii.shape != values.shape:
            raise InputError("weight.radii and weight.values must be equally long, at least 2")
        if np.any(radii <= 0) or np.any(values <= 0) or np.any(np.diff(radii) <= 0):
            raise InputError("weight.radii must increase, radii and values must be positive")
        self.__log_radii = np.log(radii)
        self.__log_values = np.log(values)

    @property
    def kind(self) -> FactorKind:
        return FactorKind.RADIAL

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        log_r = self._log_distance(curve, sites)
        finite = np.isfinite(log_r)
        result = np.full(len(sites), np.nan)
        result[finite] = np.interp(log_r[finite], self.__log_radii, self.__log_values)
        return result

    def power(self, s: float) -> 'RadialOscillating':
        return RadialOscillating(self.t0, np.exp(self.__log_radii), np.exp(s * self.__log_values))

    def __str__(self) -> str:
        return f"ω(|τ-{self.t0:.4g}|) over {len(self.__log_radii)} radii"


class EtaPower(WeightFactor):
    """η_{t0}^x = e^{−x·arg(τ−t0)}"""
    def __init__(self, t0: complex, x: float = 1.0):
        super().__init__(t0)
        self.x = float(x)

    @property
    def kind(self) -> FactorKind:
        return FactorKind.ETA

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        if self.x == 0:
            return np.zeros(len(sites))
        return -self.x * self._arg(curve, sites)

    def power(self, s: float) -> 'EtaPower':
        return EtaPower(self.t0, self.x * s)

    def __str__(self) -> str:
        return f"η_{self.t0:.4g}^{self.x:g}"


class PhiGamma(WeightFactor):
    """φ_{t0,γ}(τ) = |(τ−t0)^γ| = |τ−t0|^{Re γ}·e^{−Im γ·arg(τ−t0)}"""
    def __init__(self, t0: complex, gamma: complex):
        super().__init__(t0)
        self.gamma = complex(gamma)

    @property
    def kind(self) -> FactorKind:
        return FactorKind.PHI

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        result = Power(self.t0, self.gamma.real).log_values(curve, sites)
        if self.gamma.imag != 0:
            result = result - self.gamma.imag * self._arg(curve, sites)
        return result

    def power(self, s: float) -> 'PhiGamma':
        return PhiGamma(self.t0, self.gamma * s)

    def __str__(self) -> str:
        return f"φ_{self.t0:.4g},{self.gamma:g}"


class ProductFactor(WeightFactor):
    """Several factors sharing one singularity"""
    def __init__(self, t0: complex, factors: Sequence[WeightFactor]):
        super().__init__(t0)
        self.factors = list(factors)

    @property
    def kind(self) -> FactorKind:
        kinds = {f.kind for f in self.factors}
        return kinds.pop() if len(kinds) == 1 else FactorKind.POWER

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        result = np.zeros(len(sites))
        for factor in self.factors:
            result = result + factor.log_values(curve, sites)
        return result

    def power(self, s: float) -> 'ProductFactor':
        return ProductFactor(self.t0, [f.power(s) for f in self.factors])

    def __str__(self) -> str:
        return "·".join(str(f) for f in self.factors) if self.factors else "1"


class Weight:
    """w = Π ψ_j, factors grouped by the sample their singularity snaps to"""
    def __init__(self, factors: Optional[Sequence[WeightFactor]] = None):
        self.__factors = list(factors or [])

    @property
    def factors(self) -> list[WeightFactor]:
        return list(self.__factors)

    def is_trivial(self) -> bool:
        return not self.__factors

    def groups(self, curve: CurveModel) -> dict[int, WeightFactor]:
        grouped: dict[int, list[WeightFactor]] = {}
        for factor in self.__factors:
            grouped.setdefault(curve.index_of(factor.t0), []).append(factor)
        return {j: members[0] if len(members) == 1 else
                ProductFactor(complex(curve.points[j]), members) for j, members in sorted(grouped.items())}

    def singular_indices(self, curve: CurveModel) -> list[int]:
        return list(self.groups(curve).keys())

    def local(self, curve: CurveModel, t: Point) -> WeightFactor:
        """ψ_j at t, the constant factor 1 when t is not singular"""
        j = curve.index_of(t)
        return self.groups(curve).get(j, ProductFactor(complex(curve.points[j]), []))

    def times(self, factor: WeightFactor) -> 'Weight':
        return Weight(self.__factors + [factor])

    def power(self, s: float) -> 'Weight':
        return Weight([f.power(s) for f in self.__factors])

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        result = np.zeros(len(sites))
        for factor in self.__factors:
            result = result + factor.log_values(curve, sites)
        return result

    def evaluate(self, curve: CurveModel, sites: Optional[Sites] = None) -> np.ndarray:
        if sites is None:
            sites = curve.sample_sites(0)
        with np.errstate(over='ignore'):
            return np.exp(self.log_values(curve, sites))

    def __str__(self) -> str:
        return "·".join(str(f) for f in self.__factors) if self.__factors else "1"


class PoweredWeight:
    """w^{p(τ)/divisor}"""
    def __init__(self, weight: Weight, exponent: ExponentField, divisor: float):
        self.weight = weight
        self.exponent = exponent
        self.divisor = float(divisor)

    def log_values(self, curve: CurveModel, sites: Sites) -> np.ndarray:
        return self.weight.log_values(curve, sites) * self.exponent.at_sites(sites) / self.divisor

    def evaluate(self, curve: CurveModel, sites: Optional[Sites] = None) -> np.ndarray:
        if sites is None:
            sites = curve.sample_sites(0)
        with np.errstate(over='ignore'):
            return np.exp(self.log_values(curve, sites))


Evaluable = Union[Weight, WeightFactor, PoweredWeight]


def sample_values(curve: CurveModel, w: Optional[Union[Evaluable, np.ndarray]]) -> np.ndarray:
    """A weight or array as values at the curve samples"""
    if w is None:
        return np.ones(curve.resolution)
    if isinstance(w, np.ndarray):
        if w.shape != (curve.resolution,):
            raise InputError(f"Expected {curve.resolution} samples, found: {w.shape}")
        return w
    return w.evaluate(curve, curve.sample_sites(0))


def _closure_integral(values: np.ndarray, distances: np.ndarray, lo: float, hi: float,
                      closure: str) -> float:
    """∫_{lo}^{hi} g(r) dr for g fitted through (distances[0], values[0]) and (distances[1], values[1])"""
    (r1, r2), (v1, v2) = distances, values
    if not (np.isfinite(v1) and np.isfinite(v2)) or r1 <= 0 or r2 <= r1:
        return math.inf
    use_power = closure == 'power' or (closure == 'auto' and v1 > 0 and v2 > 0)
    if use_power:
        if v1 <= 0 or v2 <= 0:
            return math.inf
        mu = math.log(v2 / v1) / math.log(r2 / r1)
        scale = v1 / r1 ** mu
        if mu <= -1.0 + NON_INTEGRABLE_SLACK:
            if lo <= 0:
                return math.inf
            if abs(mu + 1.0) <= NON_INTEGRABLE_SLACK:
                return scale * math.log(hi / lo)
            return scale * (hi ** (mu + 1) - lo ** (mu + 1)) / (mu + 1)
        return scale * (hi ** (mu + 1) - lo ** (mu + 1)) / (mu + 1)
    slope = (v2 - v1) / math.log(r2 / r1)
    intercept = v1 - slope * math.log(r1)

    def antiderivative(r: float) -> float:
        return r * math.log(r) - r if r > 0 else 0.0

    return intercept * (hi - lo) + slope * (antiderivative(hi) - antiderivative(lo))


def integrate_chords(curve: CurveModel, chords: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                     values: np.ndarray, closure: str = 'auto') -> float:
    """∫ g |dτ| over the given chord intervals, g linear along each chord"""
    if closure not in CLOSURES:
        raise InputError(f"Unsupported closure: {closure}, expected one of {CLOSURES}")
    following = curve.next_index(chords)
    v0, v1 = values[chords], values[following]
    regular = np.isfinite(v0) & np.isfinite(v1)
    seg = curve.segments[chords]
    width = hi - lo
    total = float(np.sum((seg * (width * v0 + 0.5 * (hi * hi - lo * lo) * (v1 - v0)))[regular]))
    for idx in np.nonzero(~regular)[0]:
        total += _singular_chord(curve, int(chords[idx]), float(lo[idx]), float(hi[idx]),
                                 values, closure)
        if not math.isfinite(total):
            return math.inf
    return total


def _singular_chord(curve: CurveModel, k: int, lo: float, hi: float, values: np.ndarray,
                    closure: str) -> float:
    start, end = k, int(curve.next_index(np.array([k]))[0])
    n = curve.resolution
    if not np.isfinite(values[start]) and not np.isfinite(values[end]):
        return math.inf
    singular_at_start = not np.isfinite(values[start])
    m = start if singular_at_start else end
    step = 1 if singular_at_start else -1
    neighbours = [m + step, m + 2 * step]
    if curve.closed:
        neighbours = [i % n for i in neighbours]
    elif not all(0 <= i < n for i in neighbours):
        return math.inf
    rel = curve.relative(m)
    distances = np.abs(rel[neighbours])
    ell = curve.chord_lengths[k]
    if singular_at_start:
        r_lo, r_hi = lo * ell, hi * ell
    else:
        r_lo, r_hi = (1.0 - hi) * ell, (1.0 - lo) * ell
    integral = _closure_integral(values[neighbours], distances, r_lo, r_hi, closure)
    return integral * curve.segments[k] / ell


def integrate_portion(curve: CurveModel, portion: ArcPortion, values: np.ndarray,
                      closure: str = 'auto') -> float:
    return integrate_chords(curve, portion.chords, portion.lo, portion.hi, values, closure)


def integrate_curve(curve: CurveModel, values: np.ndarray, closure: str = 'auto') -> float:
    chords = np.arange(curve.n_chords)
    return integrate_chords(curve, chords, np.zeros(curve.n_chords), np.ones(curve.n_chords),
                            values, closure)


@dataclass(frozen=True)
class SupEstimate:
    """A sup over a radius grid, with the same sup taken without the finest decade"""
    value: float
    coarse_value: float
    t: complex
    radius: float

    @property
    def divergent(self) -> bool:
        if not math.isfinite(self.value):
            return True
        return self.coarse_value > 0 and self.value / self.coarse_value > DIVERGENCE_RATIO

    @property
    def growing(self) -> bool:
        return self.value > self.coarse_value * (1 + 1e-6)

    @property
    def bounded(self) -> bool:
        return not self.divergent

    def __str__(self) -> str:
        if self.divergent:
            return "unbounded (grid-divergent)"
        return f"{self.value:.6g}" + (" (still growing under refinement)" if self.growing else "")


class SupTracker:
    def __init__(self):
        self.value, self.coarse, self.t, self.radius = 0.0, 0.0, 0j, 0.0

    def add(self, values: np.ndarray, radii: np.ndarray, t: complex) -> None:
        values = np.where(np.isnan(values), math.inf, values)
        k = int(np.argmax(values))
        if values[k] > self.value:
            self.value, self.t, self.radius = float(values[k]), t, float(radii[k])
        coarse = radii >= 10.0 * radii[0]
        if np.any(coarse):
            self.coarse = max(self.coarse, float(np.max(values[coarse])))

    def result(self) -> SupEstimate:
        return SupEstimate(self.value, self.coarse, self.t, self.radius)


@dataclass(frozen=True)
class DiniReport:
    certified: bool
    constant: float
    worst_pair: tuple[complex, complex]
    growth: float
    message: str

    def __str__(self) -> str:
        return self.message


def dini_lipschitz_certify(p: ExponentField, curve: CurveModel, rows: int = 512) -> DiniReport:
    """Smallest C with |p(τ)−p(t)| ≤ −C/log|τ−t| over sampled pairs with |τ−t| ≤ 1/2"""
    values, points = p.values, curve.points
    n = curve.resolution
    best, pair = 0.0, (complex(points[0]), complex(points[0]))
    for start in range(0, min(rows, n), 64):
        idx = np.round(np.linspace(0, n - 1, min(rows, n))).astype(int)[start:start + 64]
        d = np.abs(points[None, :] - points[idx, None])
        usable = (d > 0) & (d <= 0.5)
        with np.errstate(divide='ignore', invalid='ignore'):
            score = np.where(usable, np.abs(values[None, :] - values[idx, None]) * -np.log(d), 0.0)
        k = np.unravel_index(int(np.argmax(score)), score.shape)
        if score[k] > best:
            best, pair = float(score[k]), (complex(points[idx[k[0]]]), complex(points[k[1]]))

    strides = [1, 2, 4, 8]
    adjacent = []
    for s in strides:
        far = np.roll(np.arange(n), -s) if curve.closed else np.arange(s, n)
        near = np.arange(n) if curve.closed else np.arange(n - s)
        d = np.abs(points[far] - points[near])
        usable = (d > 0) & (d <= 0.5)
        with np.errstate(divide='ignore', invalid='ignore'):
            score = np.where(usable, np.abs(values[far] - values[near]) * -np.log(d), 0.0)
        adjacent.append(float(np.max(score)) if len(score) else 0.0)
        if s == 1 and adjacent[0] > best:
            k = int(np.argmax(score))
            best, pair = adjacent[0], (complex(points[near[k]]), complex(points[far[k]]))

    h = float(np.mean(curve.chord_lengths))
    log_inverse = np.array([-math.log(s * h) for s in strides])
    growth = 0.0
    if adjacent[0] > 0:
        growth = float(np.polyfit(log_inverse, np.array(adjacent), 1)[0]) / adjacent[0]
    worst_is_adjacent = adjacent[0] >= best
    if worst_is_adjacent and growth > 0.05:
        message = (f"Dini-Lipschitz certification failed: the bound grows by {growth:.3f} "
                   f"per unit of log(1/h), worst pair {pair[0]:.6f}, {pair[1]:.6f}")
        logger.warning(message)
        return DiniReport(False, best, pair, growth, message)
    return DiniReport(True, best, pair, growth, f"Dini-Lipschitz constant C={best:.6g}")


def p_star(p: ExponentField, region: Optional[ArcPortion] = None) -> float:
    if region is None:
        return p.p_min
    curve = p.curve
    following = curve.next_index(region.chords)
    v0, v1 = p.values[region.chords], p.values[following]
    ends = np.concatenate((v0 + region.lo * (v1 - v0), v0 + region.hi * (v1 - v0)))
    if len(ends) == 0:
        raise InputError("p_star needs a nonempty region")
    return float(np.min(ends))


def modular(curve: CurveModel, f: np.ndarray, p: ExponentField,
            w: Optional[Union[Evaluable, np.ndarray]], scale: float) -> float:
    """∫ |f w / λ|^{p(τ)} |dτ|"""
    if scale <= 0:
        raise InputError(f"The modular needs a positive scale, found: {scale}")
    magnitude = np.abs(np.asarray(f)) * sample_values(curve, w)
    return _modular_of(curve, magnitude, p.values, scale)


def _modular_of(curve: CurveModel, magnitude: np.ndarray, exponents: np.ndarray, scale: float) -> float:
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        integrand = (magnitude / scale) ** exponents
    integrand = np.where(magnitude == 0, 0.0, integrand)
    return integrate_curve(curve, integrand)


def nakano_norm(curve: CurveModel, f: np.ndarray, p: ExponentField,
                w: Optional[Union[Evaluable, np.ndarray]] = None) -> float:
    """inf{λ > 0 : modular ≤ 1}, by bisection to relative 1e-10"""
    magnitude = np.abs(np.asarray(f)) * sample_values(curve, w)
    at_one = _modular_of(curve, magnitude, p.values, 1.0)
    if at_one == 0:
        return 0.0
    if not math.isfinite(at_one):
        raise NotInSpaceError("The function is not in the space: its modular diverges")
    candidates = (at_one ** (1.0 / p.p_min), at_one ** (1.0 / p.p_max))
    lo, hi = 0.5 * min(candidates), 2.0 * max(candidates)

    def excess(scale: float) -> float:
        return _modular_of(curve, magnitude, p.values, scale) - 1.0

    result = optimize.bisect(excess, lo, hi, xtol=lo * 1e-13, rtol=1e-10, maxiter=200)
    for _ in range(8):
        if excess(result) <= 0:
            break
        result *= 1 + 1e-10
    return float(result)


def portion_sweep(curve: CurveModel, t: Point, radii: np.ndarray,
                  integrands: Sequence[np.ndarray], closure: str = 'auto') -> tuple[np.ndarray, np.ndarray]:
    """Portion measures and the integral of every integrand over Γ(t,R) for each R"""
    measures = np.empty(len(radii))
    integrals = np.empty((len(integrands), len(radii)))
    for k, radius in enumerate(radii):
        portion = curve.portion(t, float(radius))
        measures[k] = portion.measure()
        for i, values in enumerate(integrands):
            integrals[i, k] = integrate_portion(curve, portion, values, closure)
    return measures, integrals


def bmo_at(curve: CurveModel, f: np.ndarray, t: Point, radii: Optional[np.ndarray] = None) -> SupEstimate:
    """sup over R of (1/|Γ(t,R)|)∫|f − f_R|, f_R the portion mean"""
    j = curve.index_of(t)
    radii = curve.radius_grid(j) if radii is None else np.asarray(radii, dtype=float)
    f = np.asarray(f, dtype=float)
    oscillation = np.empty(len(radii))
    for k, radius in enumerate(radii):
        portion = curve.portion(j, float(radius))
        measure = portion.measure()
        mean = integrate_portion(curve, portion, f) / measure
        if not math.isfinite(mean):
            oscillation[k] = math.inf
            continue
        deviation = np.where(np.isfinite(f), np.abs(f - mean), np.inf)
        oscillation[k] = integrate_portion(curve, portion, deviation) / measure
    tracker = SupTracker()
    tracker.add(oscillation, radii, complex(curve.points[j]))
    estimate = tracker.result()
    logger.debug(f"BMO at t={curve.points[j]:.6f}: {estimate}")
    return estimate


def ap_constant(curve: CurveModel, w: Union[Evaluable, np.ndarray], p: float,
                centres: Optional[Sequence[int]] = None) -> SupEstimate:
    """sup over (t,R) of (R⁻¹∫_{Γ(t,R)} w^p)^{1/p}·(R⁻¹∫_{Γ(t,R)} w^{−q})^{1/q}"""
    if not p > 1:
        raise InputError(f"The Muckenhoupt exponent must exceed 1, found: {p}")
    q = p / (p - 1.0)
    values = sample_values(curve, w)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        upper = values ** p
        lower = values ** (-q)
    if centres is None:
        extra = w.singular_indices(curve) if isinstance(w, Weight) else []
        centres = sorted(set(curve.carleson_centres() + extra))
    tracker = SupTracker()
    for j in centres:
        radii = curve.radius_grid(j)
        _, integrals = portion_sweep(curve, j, radii, [upper, lower])
        with np.errstate(over='ignore', invalid='ignore'):
            constant = (integrals[0] / radii) ** (1.0 / p) * (integrals[1] / radii) ** (1.0 / q)
        tracker.add(constant, radii, complex(curve.points[j]))
    estimate = tracker.result()
    logger.debug(f"A_{p:g} constant: {estimate}")
    return estimate


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    sup_ratio: float
    inf_ratio: float
    drift: float = 0.0

    def __str__(self) -> str:
        verdict = "equivalent" if self.equivalent else "not equivalent"
        return (f"{verdict}: ratio in [{self.inf_ratio:.6g}, {self.sup_ratio:.6g}], "
                f"log-ratio drift {self.drift:.3g} per unit of log R")


def weights_equivalent(curve: CurveModel, w1: Evaluable, w2: Evaluable,
                       depth: int = 6) -> EquivalenceReport:
    """Whether w1/w2 is bounded and bounded away from zero, down to radii below the sample spacing.

    At each singularity the extreme log-ratios on circles of radius h·10^{-level} are
    fitted against log R. A ratio behaving like |τ−t|^ε drifts with slope ε, which
    stays visible long before its sup outgrows a fixed factor.
    """
    samples = curve.sample_sites(0)
    ratio = np.exp(w1.log_values(curve, samples) - w2.log_values(curve, samples))
    ratio = ratio[np.isfinite(ratio)]
    sup_all, inf_all = float(np.max(ratio)), float(np.min(ratio))
    singular = set()
    for w in (w1, w2):
        base = w.weight if isinstance(w, PoweredWeight) else w
        if isinstance(base, Weight):
            singular.update(base.singular_indices(curve))
        elif isinstance(base, WeightFactor):
            singular.add(curve.index_of(base.t0))
    drift = 0.0
    for j in sorted(singular):
        h = curve.spacing(j)
        log_radii, highs, lows = [], [], []
        for level in range(depth + 1):
            radius = h * 10.0 ** (-level)
            sites = curve.circle_sites(j, radius)
            logs = w1.log_values(curve, sites) - w2.log_values(curve, sites)
            logs = logs[np.isfinite(logs)]
            if len(logs) == 0:
                continue
            sup_all = max(sup_all, math.exp(float(np.max(logs))))
            inf_all = min(inf_all, math.exp(float(np.min(logs))))
            log_radii.append(math.log(radius))
            highs.append(float(np.max(logs)))
            lows.append(float(np.min(logs)))
        if len(log_radii) >= 3:
            drift = max(drift, abs(float(np.polyfit(log_radii, highs, 1)[0])),
                        abs(float(np.polyfit(log_radii, lows, 1)[0])))
    equivalent = inf_all > 0 and math.isfinite(sup_all) and drift <= EQUIVALENCE_DRIFT
    return EquivalenceReport(equivalent, sup_all, inf_all, drift)


def power_equivalence(curve: CurveModel, psi: WeightFactor, p: ExponentField, t: Point) -> EquivalenceReport:
    """ψ^{p(τ)/p_*} against ψ^{p(t)/p_*}"""
    divisor = p.p_min
    varying = PoweredWeight(Weight([psi]), p, divisor)
    frozen = Weight([psi.power(p.at(t) / divisor)])
    return weights_equivalent(curve, varying, frozen)


def check_exponent(p: ExponentField, curve: CurveModel) -> DiniReport:
    if p.curve is not curve:
        raise InputError("The exponent is sampled on a different curve")
    report = dini_lipschitz_certify(p, curve)
    if not report.certified:
        raise InputError(report.message)
    return report
