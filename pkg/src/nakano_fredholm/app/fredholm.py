"""
Decisions on a weighted Nakano space L^{p(·)}(Γ,w).

Boundedness of the maximal operator and of S is read off the W⁰-indices of the
weight factors at their singular points. Fredholmness of aP+bQ is decided jump by
jump from the indicator functions α_t*, β_t* and the leaves they bound.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from matplotlib.path import Path

from .config import FredholmVerdict, Verdict
from .curve import CurveModel, Point
from .errors import InputError, NumericError
from .indices import DEFAULT_DECADES, IndexPair, Spirality, V0, W0, index_pair, spirality
from .spaces import (DiniReport, EquivalenceReport, EtaPower, ExponentField, PhiGamma, Power,
                     ProductFactor, SupEstimate, SupTracker, Weight, WeightFactor, ap_constant,
                     bmo_at, check_exponent, p_star, power_equivalence)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-3
THETA_POINTS = 101
PROFILE_HALF_WIDTH = 4.0
PROFILE_POINTS = 33
LEAF_POINTS = 161
LEAF_END_TOLERANCE = 1e-6
SLOPE_TOLERANCE = 2e-2


@dataclass(frozen=True)
class SpaceSpec:
    """The triple (Γ, p, w)"""
    curve: CurveModel
    exponent: ExponentField
    weight: Weight = field(default_factory=Weight)
    tol: float = DEFAULT_TOLERANCE
    decades: int = DEFAULT_DECADES

    def validate(self) -> DiniReport:
        for factor in self.weight.factors:
            self.curve.index_of(factor.t0)
        return check_exponent(self.exponent, self.curve)

    def singularities(self) -> dict[int, WeightFactor]:
        return self.weight.groups(self.curve)

    def p_at(self, t: Point) -> float:
        return self.exponent.at(t)

    def with_weight(self, weight: Weight) -> 'SpaceSpec':
        return replace(self, weight=weight)

    def __str__(self) -> str:
        return f"({self.curve}, {self.exponent}, w={self.weight})"


@dataclass(frozen=True)
class PointMargin:
    t: complex
    p: float
    pair: IndexPair

    @property
    def lower(self) -> float:
        return 1.0 / self.p + self.pair.alpha

    @property
    def upper(self) -> float:
        return 1.0 / self.p + self.pair.beta

    @property
    def margin(self) -> float:
        return min(self.lower, 1.0 - self.upper)

    def __str__(self) -> str:
        return (f"t={self.t:.6f}: 0 < {self.lower:.6f}, {self.upper:.6f} < 1 "
                f"(margin {self.margin:+.6f})")


@dataclass(frozen=True)
class ErsatzReport:
    t: complex
    p_star: float
    sufficient: bool
    ap: Optional[SupEstimate]
    equivalence: EquivalenceReport
    power_interval: Optional[tuple[float, float]] = None
    exact_interval: Optional[tuple[float, float]] = None

    def __str__(self) -> str:
        text = (f"t={self.t:.6f}: p_*={self.p_star:g}, sufficient={self.sufficient}, "
                f"A_p_*={self.ap}, {self.equivalence}")
        if self.power_interval and self.exact_interval:
            text += (f", λ in ({self.power_interval[0]:.4f}, {self.power_interval[1]:.4f}) "
                     f"within ({self.exact_interval[0]:.4f}, {self.exact_interval[1]:.4f})")
        return text


@dataclass(frozen=True)
class P0Selection:
    p0: float
    dual_pairs: list[IndexPair]
    dual_consistent: bool

    def __str__(self) -> str:
        return f"p0={self.p0:.6f}, dual indices {'consistent' if self.dual_consistent else 'INCONSISTENT'}"


@dataclass(frozen=True)
class NecessityReport:
    t: complex
    v0: IndexPair
    non_strict: bool
    strict: bool
    bmo: SupEstimate

    def __str__(self) -> str:
        return (f"t={self.t:.6f}: V0 {self.v0}, non-strict {self.non_strict}, strict {self.strict}, "
                f"log w in BMO: {self.bmo}")


@dataclass(frozen=True)
class BoundednessReport:
    operator: str
    verdict: Verdict
    reason: str
    carleson: SupEstimate
    points: list[PointMargin] = field(default_factory=list)
    ersatz: list[ErsatzReport] = field(default_factory=list)
    p0: Optional[P0Selection] = None
    necessity: list[NecessityReport] = field(default_factory=list)

    def __str__(self) -> str:
        return f"{self.operator} bounded: {self.verdict.value} ({self.reason})"


@lru_cache(maxsize=16)
def carleson_estimate(curve: CurveModel) -> SupEstimate:
    """sup |Γ(t,R)|/R over sampled centres, with the finest decade dropped for comparison"""
    tracker = SupTracker()
    for j in curve.carleson_centres():
        radii = curve.radius_grid(j)
        tracker.add(curve.portion_measures(j, radii) / radii, radii, complex(curve.points[j]))
    estimate = tracker.result()
    logger.debug(f"Carleson estimate of {curve}: {estimate}")
    return estimate


def _margins(space: SpaceSpec) -> list[PointMargin]:
    margins = []
    for j, psi in space.singularities().items():
        pair = index_pair(W0(space.curve, j, psi, space.decades), space.tol)
        margins.append(PointMargin(complex(space.curve.points[j]), space.p_at(j), pair))
    return margins


def _verdict_of(margins: Sequence[PointMargin], tol: float) -> tuple[Verdict, Optional[PointMargin]]:
    if not margins:
        return Verdict.YES, None
    worst = min(margins, key=lambda m: m.margin)
    if worst.margin < -tol:
        return Verdict.NO, worst
    if worst.margin <= tol:
        return Verdict.BORDERLINE, worst
    return Verdict.YES, worst


def decide_maximal_bounded(space: SpaceSpec) -> BoundednessReport:
    carleson = carleson_estimate(space.curve)
    if carleson.divergent:
        return BoundednessReport("M", Verdict.NO, "not Carleson", carleson)
    margins = _margins(space)
    verdict, worst = _verdict_of(margins, space.tol)
    reason = "no weight singularities" if worst is None else f"worst point {worst}"
    result = BoundednessReport("M", verdict, reason, carleson, margins)
    logger.info(f"{result}")
    return result


def decide_S_bounded(space: SpaceSpec, diagnostics: bool = True) -> BoundednessReport:
    carleson = carleson_estimate(space.curve)
    if carleson.divergent:
        return BoundednessReport("S", Verdict.NO, "not Carleson", carleson)
    margins = _margins(space)
    verdict, worst = _verdict_of(margins, space.tol)
    if worst is None:
        reason = "no weight singularities"
    elif verdict == Verdict.NO:
        reason = f"necessary condition fails at {worst}"
    elif verdict == Verdict.BORDERLINE:
        reason = (f"on the boundary at {worst}; strict conditions are necessary on Jordan curves"
                  if space.curve.closed else
                  f"on the boundary at {worst}; only non-strict conditions are necessary on open curves")
    else:
        reason = f"sufficient conditions hold, worst point {worst}"
    if not diagnostics:
        return BoundednessReport("S", verdict, reason, carleson, margins)

    singular = space.singularities()
    ersatz = [ersatz_report(space, m.t, singular[space.curve.index_of(m.t)], m.pair) for m in margins]
    selection = select_p0(space, margins) if verdict == Verdict.YES else None
    necessity = [necessity_report(space, m.t) for m in margins]
    result = BoundednessReport("S", verdict, reason, carleson, margins, ersatz, selection, necessity)
    logger.info(f"{result}")
    return result


def ersatz_report(space: SpaceSpec, t: Point, psi: WeightFactor, pair: IndexPair,
                  with_ap: bool = True) -> ErsatzReport:
    """The A_{p_*} route at a singular point, with its corroborating checks"""
    curve = space.curve
    j = curve.index_of(t)
    p_t, lowest = space.p_at(j), p_star(space.exponent)
    sufficient = (1.0 / p_t + pair.alpha > space.tol and
                  1.0 / p_t + pair.beta < lowest / p_t - space.tol)
    ap = None
    if with_ap and lowest > 1:
        quarter = curve.resolution // 4
        centres = sorted({j, (j + quarter) % curve.resolution, (j - quarter) % curve.resolution})
        ap = ap_constant(curve, Weight([psi.power(p_t / lowest)]), lowest, centres)
    equivalence = power_equivalence(curve, psi, space.exponent, j)
    power_interval = exact_interval = None
    if isinstance(psi, Power):
        power_interval = (-1.0 / p_t, (lowest - 1.0) / p_t)
        exact_interval = (-1.0 / p_t, (p_t - 1.0) / p_t)
    return ErsatzReport(complex(curve.points[j]), lowest, sufficient, ap, equivalence,
                        power_interval, exact_interval)


def select_p0(space: SpaceSpec, margins: Sequence[PointMargin]) -> Optional[P0Selection]:
    """Some p0 in (1, p_*) with 1/p(t_j)+β(W⁰ψ_j) < 1/p0 at every singular point"""
    lowest = p_star(space.exponent)
    worst = max((m.upper for m in margins), default=0.0)
    bound = lowest if worst <= 0 else min(lowest, 1.0 / worst)
    if bound <= 1.0 + space.tol:
        return None
    p0 = 1.0 + 0.5 * (bound - 1.0)
    singular = space.singularities()
    duals, consistent = [], True
    for m in margins:
        psi = singular[space.curve.index_of(m.t)]
        dual = index_pair(W0(space.curve, m.t, psi.power(-p0), space.decades), space.tol)
        duals.append(dual)
        slack = space.tol * p0
        consistent &= (abs(dual.alpha + p0 * m.pair.beta) <= slack and
                       abs(dual.beta + p0 * m.pair.alpha) <= slack)
    return P0Selection(p0, duals, consistent)


def necessity_report(space: SpaceSpec, t: Point) -> NecessityReport:
    curve = space.curve
    j = curve.index_of(t)
    v0 = index_pair(V0(curve, j, space.weight, space.decades), space.tol)
    p_t = space.p_at(j)
    lower, upper = 1.0 / p_t + v0.alpha, 1.0 / p_t + v0.beta
    logs = space.weight.log_values(curve, curve.sample_sites(0))
    return NecessityReport(complex(curve.points[j]), v0,
                           lower >= -space.tol and upper <= 1 + space.tol,
                           lower > space.tol and upper < 1 - space.tol,
                           bmo_at(curve, logs, j))


@dataclass(frozen=True, eq=False)
class IndicatorProfile:
    t: complex
    p: float
    x_grid: np.ndarray
    alpha_star: np.ndarray
    beta_star: np.ndarray
    slopes: dict[str, float]
    intercepts: dict[str, float]
    spirality: Optional[Spirality] = None

    @staticmethod
    def flat(t: complex, p: float, alpha: float = 0.0, beta: Optional[float] = None) -> 'IndicatorProfile':
        """A profile with constant α_t*, β_t*"""
        grid = np.linspace(-PROFILE_HALF_WIDTH, PROFILE_HALF_WIDTH, PROFILE_POINTS)
        beta = alpha if beta is None else beta
        slopes = {k: 0.0 for k in ('alpha-', 'alpha+', 'beta-', 'beta+')}
        intercepts = {'alpha-': alpha, 'alpha+': alpha, 'beta-': beta, 'beta+': beta}
        return IndicatorProfile(complex(t), float(p), grid, np.full(len(grid), alpha),
                                np.full(len(grid), beta), slopes, intercepts)

    @property
    def mu_minus(self) -> float:
        return self.intercepts['alpha-']

    @property
    def mu_plus(self) -> float:
        return self.intercepts['alpha+']

    @property
    def nu_minus(self) -> float:
        return self.intercepts['beta-']

    @property
    def nu_plus(self) -> float:
        return self.intercepts['beta+']

    def _extended(self, x: np.ndarray, values: np.ndarray, name: str) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        result = np.interp(x, self.x_grid, values)
        below, above = x < self.x_grid[0], x > self.x_grid[-1]
        result[below] = self.slopes[f'{name}-'] * x[below] + self.intercepts[f'{name}-']
        result[above] = self.slopes[f'{name}+'] * x[above] + self.intercepts[f'{name}+']
        return result

    def alpha_at(self, x: np.ndarray) -> np.ndarray:
        return self._extended(x, self.alpha_star, 'alpha')

    def beta_at(self, x: np.ndarray) -> np.ndarray:
        return self._extended(x, self.beta_star, 'beta')

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}(t={self.t:.6f}, points={len(self.x_grid)}, "
                f"μ⁻={self.mu_minus:.4f}, μ⁺={self.mu_plus:.4f}, "
                f"ν⁻={self.nu_minus:.4f}, ν⁺={self.nu_plus:.4f})")


def indicator_at(space: SpaceSpec, t: Point, x: float) -> IndexPair:
    """(α_t*(x), β_t*(x)), the indices of W_t⁰(η_t^x ψ_t)"""
    curve = space.curve
    j = curve.index_of(t)
    centre = complex(curve.points[j])
    psi = space.weight.local(curve, j)
    factor = ProductFactor(centre, [EtaPower(centre, x), psi])
    return index_pair(W0(curve, j, factor, space.decades), space.tol)


def _asymptote(x: np.ndarray, values: np.ndarray, side: int) -> tuple[float, float]:
    count = max(2, len(x) // 4)
    selection = slice(len(x) - count, None) if side > 0 else slice(0, count)
    slope, intercept = np.polyfit(x[selection], values[selection], 1)
    return float(slope), float(intercept)


def indicator_profile(space: SpaceSpec, t: Point, x_grid: Optional[np.ndarray] = None) -> IndicatorProfile:
    curve = space.curve
    j = curve.index_of(t)
    grid = (np.linspace(-PROFILE_HALF_WIDTH, PROFILE_HALF_WIDTH, PROFILE_POINTS)
            if x_grid is None else np.sort(np.asarray(x_grid, dtype=float)))
    if len(grid) < 5:
        raise InputError(f"The indicator grid needs at least 5 points, found: {len(grid)}")
    pairs = [indicator_at(space, j, float(x)) for x in grid]
    alpha = np.array([pair.alpha for pair in pairs])
    beta = np.array([pair.beta for pair in pairs])
    spread = max(max(pair.alpha_ci, pair.beta_ci) for pair in pairs)
    shape_tol = 2 * space.tol + 4 * spread

    if np.any(alpha > beta + space.tol):
        k = int(np.argmax(alpha - beta))
        raise NumericError(f"Resolution or regularity failure: α*({grid[k]:g})={alpha[k]:.6f} "
                           f"exceeds β*={beta[k]:.6f}")
    if np.any(np.diff(alpha, 2) > shape_tol) or np.any(np.diff(beta, 2) < -shape_tol):
        raise NumericError(f"Resolution or regularity failure: indicator functions at t={curve.points[j]:.6f} "
                           f"are not concave/convex on the grid")

    slopes, intercepts = {}, {}
    for name, values in (('alpha', alpha), ('beta', beta)):
        for side, suffix in ((-1, '-'), (1, '+')):
            slopes[name + suffix], intercepts[name + suffix] = _asymptote(grid, values, side)

    spiral = spirality(curve, j, space.tol, space.decades)
    low = spiral.delta_minus - max(SLOPE_TOLERANCE, spiral.pair.alpha_ci)
    high = spiral.delta_plus + max(SLOPE_TOLERANCE, spiral.pair.beta_ci)
    outside = {k: v for k, v in slopes.items() if not low <= v <= high}
    if outside:
        raise NumericError(f"Resolution or regularity failure: asymptote slopes {outside} at "
                           f"t={curve.points[j]:.6f} differ from the spirality indices {spiral}")
    result = IndicatorProfile(complex(curve.points[j]), space.p_at(j), grid, alpha, beta,
                              slopes, intercepts, spiral)
    logger.debug(f"{result}")
    return result


def mobius(z1: complex, z2: complex, zeta: complex) -> complex:
    """M_{z1,z2}(ζ) = (z2ζ − z1)/(ζ − 1), with M(∞) = z2"""
    zeta = complex(zeta)
    if cmath.isinf(zeta):
        return complex(z2)
    if zeta == 1:
        raise InputError("M_{z1,z2} has a pole at ζ = 1")
    return (z2 * zeta - z1) / (zeta - 1)


def _mobius_array(z1: complex, z2: complex, zeta: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        return (z2 * zeta - z1) / (zeta - 1)


def _segment_distance(z: complex, vertices: np.ndarray) -> float:
    vertices = vertices[np.isfinite(vertices)]
    if len(vertices) == 1:
        return abs(vertices[0] - z)
    a, b = vertices[:-1], vertices[1:]
    d = b - a
    length2 = np.abs(d) ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.clip(np.where(length2 > 0, ((z - a) * d.conjugate()).real / length2, 0.0), 0.0, 1.0)
    return float(np.min(np.abs(a + s * d - z)))


@dataclass(frozen=True, eq=False)
class Leaf:
    z1: complex
    z2: complex
    p: float
    x_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    includes_endpoints: bool = True

    @property
    def degenerate(self) -> bool:
        return self.z1 == self.z2

    def outline(self) -> np.ndarray:
        """z1, the boundary at 1/p+α*, z2, and the boundary at 1/p+β* back to z1"""
        if self.degenerate:
            return np.array([self.z1])
        return np.concatenate(([self.z1], self.lower, [self.z2], self.upper[::-1], [self.z1]))

    def distance(self, z: complex) -> float:
        outline = self.outline()
        boundary = _segment_distance(complex(z), outline)
        if self.degenerate or boundary == 0:
            return boundary
        finite = outline[np.isfinite(outline)]
        region = Path(np.column_stack((finite.real, finite.imag)))
        return 0.0 if region.contains_point((complex(z).real, complex(z).imag)) else boundary

    def origin_distance(self) -> float:
        return self.distance(0j)

    def contains(self, z: complex, tol: float = DEFAULT_TOLERANCE) -> bool:
        return self.distance(z) <= tol

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}(z1={self.z1:.6g}, z2={self.z2:.6g}, p={self.p:g}, "
                f"origin distance {self.origin_distance():.6g})")


def leaf(z1: complex, z2: complex, p_t: float, profile: IndicatorProfile,
         half_width: float = PROFILE_HALF_WIDTH, points: int = LEAF_POINTS) -> Leaf:
    """Samples of 𝓛(z1,z2; p, α*, β*), the image of Y under ζ ↦ M_{z1,z2}(e^{2πζ})"""
    z1, z2 = complex(z1), complex(z2)
    if points % 2 == 0:
        points += 1
    if z1 == z2:
        empty = np.array([z1])
        return Leaf(z1, z2, float(p_t), np.zeros(1), empty, empty)
    width = float(half_width)
    while True:
        x = np.linspace(-width, width, points)
        lower = _mobius_array(z1, z2, np.exp(2 * math.pi * (x + 1j * (1.0 / p_t + profile.alpha_at(x)))))
        upper = _mobius_array(z1, z2, np.exp(2 * math.pi * (x + 1j * (1.0 / p_t + profile.beta_at(x)))))
        ends = max(abs(lower[0] - z1), abs(upper[0] - z1), abs(lower[-1] - z2), abs(upper[-1] - z2))
        if ends <= LEAF_END_TOLERANCE or width >= 64:
            break
        width *= 2
        points = 2 * points - 1
    return Leaf(z1, z2, float(p_t), x, lower, upper)


@dataclass(frozen=True)
class Jump:
    t: complex
    left: complex
    right: complex


class PCSymbol:
    """A piecewise continuous function on the curve, held as knots along arclength.

    Knot i sits at arclength s_i with one-sided limits (left_i, right_i). Between knots i
    and i+1 the symbol runs right_i·exp(f·Δ_i), f the fraction of the gap, so that it
    reaches left_{i+1} at the end. On closed curves the last gap wraps to the first knot.
    """
    def __init__(self, curve: CurveModel, knots: Sequence[tuple[float, complex, complex]] = (),
                 constant: complex = 1.0, increments: Optional[Sequence[complex]] = None,
                 label: str = ''):
        self.__curve = curve
        ordered = sorted(knots, key=lambda k: k[0])
        self.__s = np.array([float(k[0]) for k in ordered])
        self.__left = np.array([complex(k[1]) for k in ordered])
        self.__right = np.array([complex(k[2]) for k in ordered])
        self.__constant = complex(constant)
        self.__label = label
        values = np.concatenate((self.__left, self.__right, [self.__constant]))
        if not np.all(np.isfinite(values)):
            raise InputError(f"Symbol limits must be finite: {label or 'symbol'}")
        if len(self.__s) and (self.__s[0] < 0 or self.__s[-1] > curve.length * (1 + 1e-12)):
            raise InputError(f"Symbol knots must lie in [0, {curve.length}]")
        if increments is None:
            increments = [self._principal(self.__right[i], self.__left[self._following(i)])
                          for i in range(self._gap_count())]
        self.__increments = np.array(increments, dtype=complex)
        if len(self.__increments) != self._gap_count():
            raise InputError("One increment per gap between knots is required")

    @staticmethod
    def constant(curve: CurveModel, value: complex, label: str = '') -> 'PCSymbol':
        return PCSymbol(curve, (), value, label=label or f"{complex(value):g}")

    @staticmethod
    def with_jumps(curve: CurveModel, jumps: Sequence[Jump], label: str = '') -> 'PCSymbol':
        knots = [(float(curve.arclength[curve.index_of(j.t)]), j.left, j.right) for j in jumps]
        if len({k[0] for k in knots}) != len(knots):
            raise InputError("Two jumps share a curve point")
        return PCSymbol(curve, knots, knots[0][1] if knots else 1.0, label=label)

    @staticmethod
    def table(curve: CurveModel, nodes: Sequence[tuple[float, complex]], label: str = '') -> 'PCSymbol':
        """Nodes (s, value) along arclength, a repeated s making a jump"""
        if not nodes:
            raise InputError("A symbol table needs at least one node")
        knots: list[tuple[float, complex, complex]] = []
        for s, value in sorted(nodes, key=lambda n: n[0]):
            if knots and math.isclose(knots[-1][0], s, abs_tol=1e-12 * curve.length):
                knots[-1] = (knots[-1][0], knots[-1][1], complex(value))
            else:
                knots.append((float(s), complex(value), complex(value)))
        return PCSymbol(curve, knots, knots[0][1], label=label)

    @property
    def curve(self) -> CurveModel:
        return self.__curve

    @property
    def label(self) -> str:
        return self.__label

    @staticmethod
    def _principal(start: complex, end: complex) -> complex:
        if start == 0 or end == 0:
            return complex(math.nan, math.nan)
        return cmath.log(end / start)

    def _gap_count(self) -> int:
        n = len(self.__s)
        return n if self.__curve.closed else max(n - 1, 0)

    def _following(self, i: int) -> int:
        return (i + 1) % len(self.__s)

    def _gap_length(self, i: int) -> float:
        n = len(self.__s)
        if i == n - 1:
            return self.__s[0] + self.__curve.length - self.__s[-1]
        return self.__s[i + 1] - self.__s[i]

    def _locate(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Gap index and fraction for every arclength; gap −1 and n−1 are the open-curve ends"""
        length = self.__curve.length
        if self.__curve.closed:
            s = np.mod(s, length)
        gap = np.searchsorted(self.__s, s, side='right') - 1
        fraction = np.zeros(len(s))
        if self.__curve.closed:
            gap = np.where(gap < 0, len(self.__s) - 1, gap)
            wrap = np.array([self._gap_length(i) for i in range(len(self.__s))])
            start = self.__s[gap]
            offset = np.where(s >= start, s - start, s + length - start)
            fraction = offset / wrap[gap]
        else:
            inner = (gap >= 0) & (gap < len(self.__s) - 1)
            if np.any(inner):
                g = gap[inner]
                fraction[inner] = (s[inner] - self.__s[g]) / (self.__s[g + 1] - self.__s[g])
        return gap, fraction

    def at_arclength(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if len(self.__s) == 0:
            return np.full(len(s), self.__constant)
        gap, fraction = self._locate(s)
        result = np.empty(len(s), dtype=complex)
        n = len(self.__s)
        before = gap < 0
        after = (gap >= n - 1) if not self.__curve.closed else np.zeros(len(s), dtype=bool)
        result[before] = self.__left[0]
        result[after] = self.__right[-1]
        inner = ~before & ~after
        g, f = gap[inner], fraction[inner]
        start = self.__right[g]
        end = self.__left[(g + 1) % n]
        increment = self.__increments[g] if len(self.__increments) else np.zeros(len(g), dtype=complex)
        polar = np.isfinite(increment)
        result_inner = np.where(polar, start * np.exp(f * np.where(polar, increment, 0)),
                                start + f * (end - start))
        result[inner] = result_inner
        return result

    def at_samples(self) -> np.ndarray:
        return self.at_arclength(self.__curve.arclength)

    def limits(self, t: Point) -> tuple[complex, complex]:
        """(a(t−0), a(t+0))"""
        s = float(self.__curve.arclength[self.__curve.index_of(t)])
        for k, knot in enumerate(self.__s):
            if math.isclose(knot, s, abs_tol=1e-12 * self.__curve.length):
                return complex(self.__left[k]), complex(self.__right[k])
        value = complex(self.at_arclength(np.array([s]))[0])
        return value, value

    def jumps(self) -> list[Jump]:
        result = []
        for s, left, right in zip(self.__s, self.__left, self.__right):
            if abs(left - right) > 1e-12 * max(1.0, abs(left)):
                result.append(Jump(self.__curve.point_at(float(s)), complex(left), complex(right)))
        return result

    def essential_range(self) -> np.ndarray:
        return np.concatenate((self.at_samples(), self.__left, self.__right))

    def range_minimum(self) -> tuple[float, complex]:
        """min |a| over the sampled range, and where it is attained"""
        values = np.abs(self.at_samples())
        k = int(np.argmin(values))
        best, where = float(values[k]), complex(self.__curve.points[k])
        for s, left, right in zip(self.__s, self.__left, self.__right):
            if min(abs(left), abs(right)) < best:
                best, where = float(min(abs(left), abs(right))), self.__curve.point_at(float(s))
        return best, where

    def _increment_over(self, s0: float, s1: float) -> complex:
        """The log-increment of this symbol from s0 to s1 inside one of its gaps"""
        n = len(self.__s)
        if n == 0:
            return 0j
        length = self.__curve.length
        span = (s1 - s0) % length if self.__curve.closed else s1 - s0
        if self.__curve.closed and span <= 1e-12 * length:
            span = length
        middle = s0 + 0.5 * span
        gap, _ = self._locate(np.array([middle]))
        g = int(gap[0])
        if g < 0 or (not self.__curve.closed and g >= n - 1):
            return 0j
        return complex(self.__increments[g]) * span / self._gap_length(g)

    def _combine(self, other: 'PCSymbol', sign: int, label: str) -> 'PCSymbol':
        if other.curve is not self.__curve:
            raise InputError("Symbols live on different curves")
        tolerance = 1e-12 * self.__curve.length
        merged: list[float] = []
        for s in sorted(np.concatenate((self.__s, other.__s))):
            if not merged or s - merged[-1] > tolerance:
                merged.append(float(s))
        knots = []
        for s in merged:
            left_a, right_a = self._limits_at(s)
            left_b, right_b = other._limits_at(s)
            if sign < 0 and (left_b == 0 or right_b == 0):
                raise InputError(f"Division by a symbol vanishing at arclength {s:.6g}")
            knots.append((s, left_a * left_b ** sign, right_a * right_b ** sign))
        constant = self.__constant * other.__constant ** sign if not knots else knots[0][1]
        if not knots:
            return PCSymbol(self.__curve, (), constant, label=label)
        n = len(merged)
        gaps = n if self.__curve.closed else n - 1
        increments = []
        for i in range(gaps):
            s0, s1 = merged[i], merged[(i + 1) % n]
            increments.append(self._increment_over(s0, s1) + sign * other._increment_over(s0, s1))
        return PCSymbol(self.__curve, knots, constant, increments, label)

    def _limits_at(self, s: float) -> tuple[complex, complex]:
        for k, knot in enumerate(self.__s):
            if math.isclose(knot, s, abs_tol=1e-12 * self.__curve.length):
                return complex(self.__left[k]), complex(self.__right[k])
        value = complex(self.at_arclength(np.array([s]))[0])
        return value, value

    def times(self, other: 'PCSymbol') -> 'PCSymbol':
        return self._combine(other, 1, f"({self.__label})·({other.label})")

    def divided(self, other: 'PCSymbol') -> 'PCSymbol':
        return self._combine(other, -1, f"({self.__label})/({other.label})")

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}({self.__label or 'a'}, knots={len(self.__s)}, "
                f"jumps={len(self.jumps())})")


def integer_margin(low: float, high: float) -> float:
    """Distance of [low, high] from ℤ, negative by the depth of an integer inside"""
    m = math.floor(high)
    if m >= low:
        return -min(m - low, high - m)
    return min(low - m, m + 1 - high)


@dataclass(frozen=True, eq=False)
class JumpCriterion:
    t: complex
    left: complex
    right: complex
    x0: float
    low: float
    high: float
    margin: float
    nonsingular: bool
    theta_values: np.ndarray
    leaf: Optional[Leaf] = None

    @property
    def leaf_origin_distance(self) -> Optional[float]:
        return None if self.leaf is None else self.leaf.origin_distance()

    def __str__(self) -> str:
        text = (f"t={self.t:.6f}: {self.left:.4g} -> {self.right:.4g}, expression in "
                f"[{self.low:.6f}, {self.high:.6f}], margin {self.margin:+.6f}")
        if self.leaf is not None:
            text += f", leaf origin distance {self.leaf.origin_distance():.6g}"
        return text


@dataclass(frozen=True)
class NonsingularityReport:
    nonsingular: bool
    witness: str
    range_minimum: float
    jumps: list[JumpCriterion] = field(default_factory=list)

    def __str__(self) -> str:
        return f"nonsingular: {self.nonsingular} ({self.witness})"


def jump_criterion(space: SpaceSpec, jump: Jump, with_leaf: bool = False) -> JumpCriterion:
    """The expression −arg(z1/z2)/2π + 1/p + θα*(x0) + (1−θ)β*(x0) over θ ∈ [0,1]"""
    curve = space.curve
    j = curve.index_of(jump.t)
    ratio = jump.left / jump.right
    x0 = math.log(abs(ratio)) / (2 * math.pi)
    pair = indicator_at(space, j, x0)
    p_t = space.p_at(j)
    shift = -cmath.phase(ratio) / (2 * math.pi) + 1.0 / p_t
    theta = np.linspace(0.0, 1.0, THETA_POINTS)
    values = shift + theta * pair.alpha + (1 - theta) * pair.beta
    low, high = shift + pair.alpha, shift + pair.beta
    margin = integer_margin(low, high)
    drawn = None
    if with_leaf:
        drawn = leaf(jump.left, jump.right, p_t, indicator_profile(space, j))
    return JumpCriterion(complex(curve.points[j]), jump.left, jump.right, x0, low, high, margin,
                         margin > space.tol, values, drawn)


def nonsingular(c: PCSymbol, space: SpaceSpec, with_leaves: bool = False) -> NonsingularityReport:
    smallest, where = c.range_minimum()
    if smallest <= space.tol:
        return NonsingularityReport(False, f"the range reaches 0 near t={where:.6f} (|c|={smallest:.3g})",
                                    smallest)
    criteria = [jump_criterion(space, jump, with_leaves) for jump in c.jumps()]
    failing = [crit for crit in criteria if not crit.nonsingular]
    if failing:
        worst = min(failing, key=lambda crit: crit.margin)
        return NonsingularityReport(False, f"the leaf at {worst} meets the origin", smallest, criteria)
    return NonsingularityReport(True, "range and leaves avoid the origin", smallest, criteria)


def gamma_local(a: PCSymbol, t: Point) -> complex:
    left, right = a.limits(t)
    if left == 0 or right == 0:
        raise InputError(f"Vanishing one-sided limit of {a} at t={t}")
    ratio = left / right
    return complex(cmath.phase(ratio) / (2 * math.pi), -math.log(abs(ratio)) / (2 * math.pi))


def select_kt(space: SpaceSpec, t: Point, gamma: complex,
              theta_grid: Optional[np.ndarray] = None) -> Optional[int]:
    """k with 0 < 1/p(t)+k−Re γ+θα*(−Im γ)+(1−θ)β*(−Im γ) < 1 on the θ grid"""
    theta = np.linspace(0.0, 1.0, THETA_POINTS) if theta_grid is None else np.asarray(theta_grid)
    pair = indicator_at(space, t, -gamma.imag)
    values = 1.0 / space.p_at(t) - gamma.real + theta * pair.alpha + (1 - theta) * pair.beta
    k = -math.floor(float(np.min(values)))
    shifted = values + k
    if np.all(shifted > space.tol) and np.all(shifted < 1 - space.tol):
        return int(k)
    return None


def phi_weight(t: complex, gamma: complex) -> PhiGamma:
    return PhiGamma(t, gamma)


def local_S_bounded(space: SpaceSpec, t: Point, gamma: complex, k: int) -> BoundednessReport:
    """decide_S_bounded for the weight φ_{t,k−γ}·w"""
    centre = complex(space.curve.points[space.curve.index_of(t)])
    return decide_S_bounded(space.with_weight(space.weight.times(phi_weight(centre, k - gamma))),
                            diagnostics=False)


@dataclass(frozen=True)
class LocalRepresentative:
    t: complex
    gamma: complex
    k: Optional[int]
    verdict: Optional[Verdict]

    def __str__(self) -> str:
        if self.k is None:
            return f"t={self.t:.6f}: γ={self.gamma:.6f}, no k_t"
        return f"t={self.t:.6f}: γ={self.gamma:.6f}, k_t={self.k}, local S bounded {self.verdict.value}"


@dataclass(frozen=True)
class FredholmReport:
    verdict: FredholmVerdict
    reason: str
    s_report: BoundednessReport
    b_minimum: float
    quotient: Optional[PCSymbol] = None
    quotient_minimum: Optional[float] = None
    nonsingularity: Optional[NonsingularityReport] = None
    locals: list[LocalRepresentative] = field(default_factory=list)

    def __str__(self) -> str:
        return f"{self.verdict.value}: {self.reason}"


def decide_fredholm(a: PCSymbol, b: PCSymbol, space: SpaceSpec, diagnostics: bool = True) -> FredholmReport:
    """Fredholmness of aP+bQ: S bounded, b invertible, and a/b nonsingular"""
    s_report = decide_S_bounded(space, diagnostics=False)
    if s_report.verdict == Verdict.NO:
        raise InputError(f"operator not defined: S unbounded ({s_report.reason})")
    b_min, b_where = b.range_minimum()
    if s_report.verdict == Verdict.BORDERLINE:
        return FredholmReport(FredholmVerdict.BORDERLINE, f"S bounded is borderline: {s_report.reason}",
                              s_report, b_min)
    if b_min <= space.tol:
        return FredholmReport(FredholmVerdict.NOT_FREDHOLM,
                              f"b vanishes near t={b_where:.6f} (|b|={b_min:.3g})", s_report, b_min)
    c = a.divided(b)
    c_min, _ = c.range_minimum()
    report = nonsingular(c, space, with_leaves=diagnostics)
    locals_ = []
    if diagnostics and report.nonsingular:
        for jump in c.jumps():
            gamma = gamma_local(c, jump.t)
            k = select_kt(space, jump.t, gamma)
            verdict = None if k is None else local_S_bounded(space, jump.t, gamma, k).verdict
            locals_.append(LocalRepresentative(jump.t, gamma, k, verdict))
    verdict = FredholmVerdict.FREDHOLM if report.nonsingular else FredholmVerdict.NOT_FREDHOLM
    result = FredholmReport(verdict, report.witness, s_report, b_min, c, c_min, report, locals_)
    logger.info(f"aP+bQ: {result}")
    return result
