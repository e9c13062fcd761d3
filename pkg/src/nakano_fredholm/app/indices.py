"""
Submultiplicative functions and their indices.

A submultiplicative function ϱ is sampled on x_j = 10^{j/25}, |j| ≤ 150. The
functions W_tψ, W_t⁰ψ, V_tw and V_t⁰w are assembled on a table of radii
ρ_k = ρ_top·10^{(k−K)/25}, so that x_j·ρ_k = ρ_{k+j} and every ratio the sup runs
over is a pair of table rows.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .config import FactorKind
from .curve import CircleTable, CurveModel, Point, TABLE_PER_DECADE
from .errors import InputError, NumericError
from .spaces import (Evaluable, EtaPower, PhiGamma, Power, ProductFactor, RadialOscillating, Weight,
                     WeightFactor, integrate_portion)

logger = logging.getLogger(__name__)

GRID_HALF = 150
DEFAULT_DECADES = 12
INDEX_TOLERANCE = 2e-3
EQUALITY_TOLERANCE = 5e-3
CUTOFF_START = 50
CUTOFF_STEP = 8
CUTOFF_COUNT = 13
REGULAR_HALF_WIDTH = 5
SCALING_POWERS = (-2.0, -0.5, 0.5, 3.0)
SPIRALITY_POWERS = (-2.0, -1.0, 1.0, 2.0)


def index_grid() -> tuple[np.ndarray, np.ndarray]:
    """Grid offsets j and points x_j = 10^{j/25}"""
    offsets = np.arange(-GRID_HALF, GRID_HALF + 1)
    return offsets, 10.0 ** (offsets / TABLE_PER_DECADE)


@dataclass(frozen=True, eq=False)
class SubmultiplicativeSample:
    grid: np.ndarray
    values: np.ndarray
    regular: bool
    spread: float = 0.0
    label: str = ''

    @staticmethod
    def of_function(rho: Callable[[np.ndarray], np.ndarray], label: str = '') -> 'SubmultiplicativeSample':
        _, grid = index_grid()
        values = np.asarray(rho(grid), dtype=float)
        return SubmultiplicativeSample.of_logs(grid, _safe_log(values), label=label)

    @staticmethod
    def of_logs(grid: np.ndarray, log_values: np.ndarray, spread: float = 0.0,
                label: str = '') -> 'SubmultiplicativeSample':
        centre = np.abs(np.log10(grid)) <= REGULAR_HALF_WIDTH / TABLE_PER_DECADE + 1e-12
        regular = bool(np.all(np.isfinite(log_values[centre])))
        with np.errstate(over='ignore'):
            return SubmultiplicativeSample(grid, np.exp(log_values), regular, spread, label)

    @property
    def log_values(self) -> np.ndarray:
        return _safe_log(self.values)

    def is_submultiplicative(self, rtol: float = 1e-6) -> bool:
        """ϱ(x_i·x_j) ≤ ϱ(x_i)·ϱ(x_j)·(1+rtol) wherever the product is on the grid"""
        steps = np.rint(np.log10(self.grid) * TABLE_PER_DECADE).astype(int)
        position = {int(s): i for i, s in enumerate(steps)}
        logs = self.log_values
        slack = math.log1p(rtol)
        for i, si in enumerate(steps):
            for k, sk in enumerate(steps):
                product = position.get(int(si + sk))
                if product is None or not np.isfinite(logs[i] + logs[k]):
                    continue
                if logs[product] > logs[i] + logs[k] + slack + 1e-12:
                    return False
        return True

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}({self.label or 'ϱ'}, points={len(self.grid)}, "
                f"regular={self.regular}, spread={self.spread:.3g})")


@dataclass(frozen=True)
class IndexPair:
    alpha: float
    beta: float
    alpha_ci: float
    beta_ci: float
    residual: float = 0.0

    def scaled(self, s: float) -> tuple[float, float]:
        """The index pair of ϱ^s, or of W(ψ^s) when this pair belongs to W(ψ)"""
        return (s * self.alpha, s * self.beta) if s >= 0 else (s * self.beta, s * self.alpha)

    def __str__(self) -> str:
        return (f"α={self.alpha:.6f} ±{self.alpha_ci:.2g}, "
                f"β={self.beta:.6f} ±{self.beta_ci:.2g}")


def _safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.log(values)


def _tail_fit(log_x: np.ndarray, log_rho: np.ndarray) -> tuple[float, float]:
    """Intercept and worst residual of r = log ϱ/log x fitted linearly in 1/log x"""
    u = 1.0 / log_x
    r = log_rho / log_x
    slope, intercept = np.polyfit(u, r, 1)
    residual = float(np.max(np.abs(r - (intercept + slope * u))))
    return float(intercept), residual


def _side(log_x: np.ndarray, log_rho: np.ndarray, sign: int, decades: float) -> tuple[float, float, float]:
    far = sign * np.log10(np.exp(log_x))
    top = float(np.max(far))
    three = far >= top - decades
    two = far >= top - (decades - 1)
    if not np.all(np.isfinite(log_rho[three])):
        raise NumericError(f"Sample is not finite over the {'smallest' if sign < 0 else 'largest'} "
                           f"{decades:g} decades")
    value, residual = _tail_fit(log_x[three], log_rho[three])
    check, _ = _tail_fit(log_x[two], log_rho[two])
    return value, abs(value - check), residual


def index_pair(rho: SubmultiplicativeSample, tol: float = INDEX_TOLERANCE,
               decades: float = 3.0) -> IndexPair:
    """Lower and upper indices from tail fits, cross-checked against the sup and inf forms"""
    if not rho.regular:
        raise NumericError(f"Not regular, unbounded near x=1: {rho}")
    log_x = np.log(rho.grid)
    log_rho = rho.log_values
    below, above = log_x < 0, log_x > 0
    alpha, alpha_ci, alpha_res = _side(log_x[below], log_rho[below], -1, decades)
    beta, beta_ci, beta_res = _side(log_x[above], log_rho[above], 1, decades)

    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = log_rho / log_x
    finite = np.isfinite(ratio)
    sup_below = float(np.max(ratio[below & finite]))
    inf_above = float(np.min(ratio[above & finite]))
    if sup_below > alpha + max(10 * alpha_ci, tol) + 2 * alpha_res:
        raise NumericError(f"Inconsistent lower index of {rho.label or 'sample'}: limit {alpha:.6f}, "
                           f"sup {sup_below:.6f}; sample is under-resolved")
    if inf_above < beta - max(10 * beta_ci, tol) - 2 * beta_res:
        raise NumericError(f"Inconsistent upper index of {rho.label or 'sample'}: limit {beta:.6f}, "
                           f"inf {inf_above:.6f}; sample is under-resolved")
    if alpha > beta + tol:
        raise NumericError(f"Lower index {alpha:.6f} exceeds upper index {beta:.6f}")
    result = IndexPair(alpha, beta, alpha_ci, beta_ci, max(alpha_res, beta_res))
    logger.debug(f"Indices of {rho.label or 'sample'}: {result}")
    return result


def _check_decades(decades: int) -> int:
    decades = int(decades)
    if not DEFAULT_DECADES <= decades <= 14:
        raise InputError(f"grid decades must lie in [{DEFAULT_DECADES}, 14], found: {decades}")
    return decades


@lru_cache(maxsize=64)
def _circle_table(curve: CurveModel, j: int, decades: int) -> CircleTable:
    return curve.circle_table(j, curve.radius_table(j, decades))


def _cutoffs(size: int) -> list[int]:
    top = size - CUTOFF_START
    return [top - CUTOFF_STEP * i for i in range(CUTOFF_COUNT)]


def _pair_sup(upper: np.ndarray, lower: np.ndarray, offsets: np.ndarray,
              cutoff: Optional[int] = None) -> np.ndarray:
    """max_k upper[k+j] − lower[k] over table rows with max(k, k+j) ≤ cutoff"""
    last = len(upper) - 1 if cutoff is None else cutoff
    result = np.full(len(offsets), np.nan)
    for i, j in enumerate(offsets):
        first, final = max(0, -j), last - max(j, 0)
        if final < first:
            continue
        result[i] = np.max(upper[first + j:final + j + 1] - lower[first:final + 1])
    return result


def _assemble(upper: np.ndarray, lower: np.ndarray, limit: bool, label: str) -> SubmultiplicativeSample:
    offsets, grid = index_grid()
    if not limit:
        return SubmultiplicativeSample.of_logs(grid, _pair_sup(upper, lower, offsets), label=label)
    cutoffs = _cutoffs(len(upper) - 1)
    earlier, previous, current = (_pair_sup(upper, lower, offsets, c) for c in cutoffs[-3:])
    with np.errstate(invalid='ignore'):
        change = np.abs(previous - current)
        settling = np.abs(earlier - previous)
    spread = float(np.nanmax(change)) if np.any(np.isfinite(change)) else math.inf
    before = float(np.nanmax(settling)) if np.any(np.isfinite(settling)) else math.inf
    if spread > max(before, INDEX_TOLERANCE):
        logger.warning(f"{label}: the limit R→0 is not settled, the change over the last cutoff "
                       f"grew from {before:.3g} to {spread:.3g}")
    return SubmultiplicativeSample.of_logs(grid, current, spread=spread, label=label)


def _circle_extremes(curve: CurveModel, t: Point, psi: Evaluable, decades: int) -> tuple[np.ndarray, np.ndarray]:
    j = curve.index_of(t)
    table = _circle_table(curve, j, _check_decades(decades))
    logs = psi.log_values(curve, table.sites)
    if not np.all(np.isfinite(logs)):
        raise InputError(f"{psi} must be positive and finite away from t={curve.points[j]:.6f}")
    return np.maximum.reduceat(logs, table.starts), np.minimum.reduceat(logs, table.starts)


def W(curve: CurveModel, t: Point, psi: Evaluable, decades: int = DEFAULT_DECADES) -> SubmultiplicativeSample:
    """(W_tψ)(x) = sup_R max_{|τ−t|=xR} ψ / min_{|τ−t|=R} ψ"""
    upper, lower = _circle_extremes(curve, t, psi, decades)
    return _assemble(upper, lower, False, f"W {psi}")


def W0(curve: CurveModel, t: Point, psi: Evaluable, decades: int = DEFAULT_DECADES) -> SubmultiplicativeSample:
    """(W_t⁰ψ)(x), the limsup as R→0 of the ratio in W_tψ"""
    upper, lower = _circle_extremes(curve, t, psi, decades)
    return _assemble(upper, lower, True, f"W0 {psi}")


def _log_means(curve: CurveModel, t: Point, w: Evaluable, decades: int) -> np.ndarray:
    """Portion averages of log w over Γ(t,ρ_k)"""
    j = curve.index_of(t)
    logs = w.log_values(curve, curve.sample_sites(0))
    radii = curve.radius_table(j, _check_decades(decades))
    means = np.empty(len(radii))
    for k, radius in enumerate(radii):
        portion = curve.portion(j, float(radius))
        means[k] = integrate_portion(curve, portion, logs, closure='log') / portion.measure()
    if not np.all(np.isfinite(means)):
        raise InputError(f"log {w} is not integrable on the portions around t={curve.points[j]:.6f}")
    return means


def H(curve: CurveModel, w: Evaluable, t: Point, r1: float, r2: float) -> float:
    """H_{w,t}(R1,R2), the ratio of geometric means of w over Γ(t,R1) and Γ(t,R2)"""
    logs = w.log_values(curve, curve.sample_sites(0))
    means = []
    for radius in (r1, r2):
        portion = curve.portion(t, float(radius))
        means.append(integrate_portion(curve, portion, logs, closure='log') / portion.measure())
    if not all(math.isfinite(m) for m in means):
        raise InputError(f"log {w} is not integrable on the portions around t")
    return math.exp(means[0] - means[1])


def V(curve: CurveModel, t: Point, w: Evaluable, decades: int = DEFAULT_DECADES) -> SubmultiplicativeSample:
    means = _log_means(curve, t, w, decades)
    return _assemble(means, means, False, f"V {w}")


def V0(curve: CurveModel, t: Point, w: Evaluable, decades: int = DEFAULT_DECADES) -> SubmultiplicativeSample:
    means = _log_means(curve, t, w, decades)
    return _assemble(means, means, True, f"V0 {w}")


@dataclass(frozen=True)
class ScalingCheck:
    power: float
    observed: IndexPair
    expected: tuple[float, float]
    passed: bool

    def __str__(self) -> str:
        return (f"x={self.power:g}: ({self.observed.alpha:.4f}, {self.observed.beta:.4f}) "
                f"expected ({self.expected[0]:.4f}, {self.expected[1]:.4f}) "
                f"{'ok' if self.passed else 'MISMATCH'}")


@dataclass(frozen=True)
class Spirality:
    t: complex
    delta_minus: float
    delta_plus: float
    pair: IndexPair
    scaling: list[ScalingCheck] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(c.passed for c in self.scaling)

    def __str__(self) -> str:
        return f"δ⁻={self.delta_minus:.6f}, δ⁺={self.delta_plus:.6f} at t={self.t:.6f}"


def spirality(curve: CurveModel, t: Point, tol: float = INDEX_TOLERANCE,
              decades: int = DEFAULT_DECADES) -> Spirality:
    """Spirality indices δ_t^± of W_t⁰η_t, with the scaling of W_t⁰(η_t^x) checked"""
    j = curve.index_of(t)
    centre = complex(curve.points[j])
    pair = index_pair(W0(curve, j, EtaPower(centre), decades), tol)
    checks = []
    for x in SPIRALITY_POWERS:
        observed = index_pair(W0(curve, j, EtaPower(centre, x), decades), tol)
        expected = (min(pair.alpha * x, pair.beta * x), max(pair.alpha * x, pair.beta * x))
        passed = (abs(observed.alpha - expected[0]) <= max(tol, abs(x) * pair.alpha_ci)
                  and abs(observed.beta - expected[1]) <= max(tol, abs(x) * pair.beta_ci))
        checks.append(ScalingCheck(x, observed, expected, passed))
    result = Spirality(centre, pair.alpha, pair.beta, pair, checks)
    if not result.consistent:
        logger.warning(f"Spirality scaling mismatch at t={centre:.6f}: "
                       f"{'; '.join(str(c) for c in checks if not c.passed)}")
    logger.debug(f"Spirality: {result}")
    return result


@dataclass(frozen=True)
class EnvelopeConstants:
    c1: float
    c2: float
    alpha: float
    beta: float
    epsilon: float
    delta: float

    def __str__(self) -> str:
        return (f"C1={self.c1:.6g}, C2={self.c2:.6g} for ε={self.epsilon:g}, δ={self.delta:g} "
                f"(α={self.alpha:.4f}, β={self.beta:.4f})")


def _omega_membership(curve: CurveModel, omega, count: int) -> np.ndarray:
    inside = np.zeros(count, dtype=bool)
    inside[omega.chords[omega.lo <= 0.0]] = True
    inside[curve.next_index(omega.chords[omega.hi >= 1.0])] = True
    return inside


def envelope_constants(curve: CurveModel, t0: Point, psi: WeightFactor, epsilon: float, delta: float,
                       decades: int = DEFAULT_DECADES, max_samples: int = 8192) -> EnvelopeConstants:
    """Smallest sampled C1, C2 in the power-law envelopes of ψ around t0.

    C1 bounds ψ(t)/ψ(τ) by |(t−t0)/(τ−t0)|^{β+ε} for t outside ω(t0,δ) and τ inside,
    C2 bounds it by |(t−t0)/(τ−t0)|^{α−ε} for t inside and τ outside.
    """
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive: {epsilon}")
    j = curve.index_of(t0)
    pair = index_pair(W(curve, j, psi, decades))
    omega = curve.omega_arc(j, delta)

    inside = _omega_membership(curve, omega, curve.resolution)
    inside[j] = False
    stride = max(1, curve.resolution // max_samples)
    strided = np.zeros(curve.resolution, dtype=bool)
    strided[::stride] = True
    strided[j] = False
    samples = curve.sample_sites(j)

    circles = curve.circle_table(j, np.geomspace(delta * 1e-8, delta, 161))
    sites = circles.sites
    own = np.isin(sites.chords, omega.chords)
    position = np.searchsorted(omega.chords, sites.chords)
    position = np.clip(position, 0, len(omega.chords) - 1)
    within = own & (sites.fractions >= omega.lo[position] - 1e-9) & (sites.fractions <= omega.hi[position] + 1e-9)
    at_edge = within & (np.abs(np.abs(sites.offsets) - delta) <= 1e-12 * delta + 1e-15)

    def logs(selection_sites) -> tuple[np.ndarray, np.ndarray]:
        return psi.log_values(curve, selection_sites), np.log(np.abs(selection_sites.offsets))

    in_log, in_r = logs(sites.take(np.nonzero(within)[0]))
    sample_in_log, sample_in_r = logs(samples.take(np.nonzero(inside & strided)[0]))
    out_log, out_r = logs(samples.take(np.nonzero(~inside & strided)[0]))
    edge_log, edge_r = logs(sites.take(np.nonzero(at_edge)[0]))
    in_log, in_r = np.concatenate((in_log, sample_in_log)), np.concatenate((in_r, sample_in_r))
    out_log, out_r = np.concatenate((out_log, edge_log)), np.concatenate((out_r, edge_r))

    upper = pair.beta + epsilon
    lower = pair.alpha - epsilon
    log_c1 = np.max(out_log - upper * out_r) - np.min(in_log - upper * in_r)
    log_c2 = np.max(in_log - lower * in_r) - np.min(out_log - lower * out_r)
    result = EnvelopeConstants(float(np.exp(log_c1)), float(np.exp(log_c2)), pair.alpha, pair.beta,
                               float(epsilon), float(delta))
    logger.debug(f"Envelope of {psi}: {result}")
    return result


@dataclass(frozen=True)
class AlgebraCheck:
    name: str
    passed: bool
    observed: str

    def __str__(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.observed}"


def _sandwich(name: str, one: IndexPair, two: IndexPair, both: IndexPair, tol: float) -> list[AlgebraCheck]:
    low_a = one.alpha + two.alpha
    high_a = min(one.alpha + two.beta, one.beta + two.alpha)
    high_b = one.beta + two.beta
    low_b = max(one.alpha + two.beta, one.beta + two.alpha)
    return [
        AlgebraCheck(f"{name} lower index", low_a - tol <= both.alpha <= high_a + tol,
                     f"{low_a:.4f} <= {both.alpha:.4f} <= {high_a:.4f}"),
        AlgebraCheck(f"{name} upper index", low_b - tol <= both.beta <= high_b + tol,
                     f"{low_b:.4f} <= {both.beta:.4f} <= {high_b:.4f}"),
    ]


def index_algebra_checks(curve: CurveModel, t: Point, psi1: WeightFactor, psi2: WeightFactor,
                         tol: float = INDEX_TOLERANCE, decades: int = DEFAULT_DECADES) -> list[AlgebraCheck]:
    """Scaling, product sandwiches, W⁰ against V⁰, and the mixed V⁰(ψw) bounds at t"""
    j = curve.index_of(t)
    centre = complex(curve.points[j])
    product = ProductFactor(centre, [psi1, psi2])
    checks = []

    base = index_pair(W0(curve, j, psi1, decades), tol)
    for s in SCALING_POWERS:
        observed = index_pair(W0(curve, j, psi1.power(s), decades), tol)
        expected = base.scaled(s)
        slack = tol * max(1.0, abs(s))
        checks.append(AlgebraCheck(f"scaling s={s:g}",
                                   abs(observed.alpha - expected[0]) <= slack
                                   and abs(observed.beta - expected[1]) <= slack,
                                   f"({observed.alpha:.4f}, {observed.beta:.4f}) vs "
                                   f"({expected[0]:.4f}, {expected[1]:.4f})"))

    w1, w2 = index_pair(W(curve, j, psi1, decades), tol), index_pair(W(curve, j, psi2, decades), tol)
    checks += _sandwich("W product", w1, w2, index_pair(W(curve, j, product, decades), tol), tol)
    other = index_pair(W0(curve, j, psi2, decades), tol)
    checks += _sandwich("W0 product", base, other, index_pair(W0(curve, j, product, decades), tol), tol)

    v0 = index_pair(V0(curve, j, psi1, decades), tol)
    checks.append(AlgebraCheck("W0 equals V0",
                               abs(v0.alpha - base.alpha) <= EQUALITY_TOLERANCE
                               and abs(v0.beta - base.beta) <= EQUALITY_TOLERANCE,
                               f"W0 ({base.alpha:.4f}, {base.beta:.4f}), V0 ({v0.alpha:.4f}, {v0.beta:.4f})"))

    vw = index_pair(V0(curve, j, Weight([psi2]), decades), tol)
    mixed = index_pair(V0(curve, j, Weight([psi1, psi2]), decades), tol)
    slack = max(tol, EQUALITY_TOLERANCE)
    checks += _sandwich("V0 mixed", vw, w1, mixed, slack)

    for check in checks:
        if not check.passed:
            logger.warning(f"Index algebra at t={centre:.6f}: {check}")
    return checks


OSCILLATION_RADII = np.geomspace(1e-24, 10.0, 241)


def oscillating_factor(centre: complex, exponent: float, amplitude: float) -> RadialOscillating:
    """r^λ·e^{μ·sin(log(1+|log r|))}: oscillates at zero without changing the indices λ"""
    log_r = np.log(OSCILLATION_RADII)
    values = np.exp(exponent * log_r + amplitude * np.sin(np.log1p(np.abs(log_r))))
    return RadialOscillating(centre, OSCILLATION_RADII, values)


def random_factor_pairs(centre: complex, count: int, seed: int,
                        spiral: bool = False) -> list[tuple[WeightFactor, WeightFactor]]:
    """Seeded pairs of power, oscillating and |(τ−t)^γ| factors, plus η powers at a spiral point.

    Real exponents are drawn from (-0.5, 0.5) so that a product stays in (-1, 1). Oscillation
    amplitudes stay below 0.1, where the drift of the local slope is within the index tolerance.
    """
    rng = np.random.default_rng(seed)
    kinds = [FactorKind.POWER, FactorKind.RADIAL, FactorKind.PHI] + ([FactorKind.ETA] if spiral else [])

    def draw() -> WeightFactor:
        kind = kinds[int(rng.integers(len(kinds)))]
        value, extra = rng.uniform(-0.5, 0.5, size=2)
        if kind == FactorKind.RADIAL:
            return oscillating_factor(centre, float(value), 0.2 * abs(float(extra)))
        if kind == FactorKind.PHI:
            return PhiGamma(centre, complex(value, extra))
        if kind == FactorKind.ETA:
            return EtaPower(centre, float(value))
        return Power(centre, float(value))

    return [(draw(), draw()) for _ in range(count)]
