"""
Numerical cross-checks for the decisions: the principal-value Cauchy integral and
the maximal function on sampled curves, finite sections of aP+bQ on the unit
circle, and the comparison suites run by the validate command.
"""
import cmath
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from .config import CurveKind, FredholmVerdict, TrendVerdict, env_workers
from .curve import CurveModel, Point, UnitCircle
from .errors import InputError, NumericError
from .fredholm import (DEFAULT_TOLERANCE, Jump, PCSymbol, SpaceSpec, decide_fredholm, integer_margin)
from .indices import AlgebraCheck, index_algebra_checks, random_factor_pairs
from .spaces import (ExponentField, Power, SupEstimate, SupTracker, Weight, nakano_norm,
                     portion_sweep, sample_values)

logger = logging.getLogger(__name__)

NODES_PER_ORDER = 8
MAX_ORDER = 2048
DEFAULT_ORDERS = (32, 64, 128, 256)
POWER_ITERATIONS = 200
POWER_TOLERANCE = 1e-10
PLATEAU_SPREAD = 1.2
PLATEAU_FLOOR = 1e-3
DECAY_SLOPE = -0.5
LOG_DECAY_FIT = 0.98
LOG_DECAY_DROP = 0.9
LOG_DECAY_STEADY = 0.9
PV_WINDOWS = (1, 2, 4)
SUITE_EXPONENTS = (2.0, 3.0)
SUITE_WEIGHTS = (0.0, 0.25)
SUITE_JUMPS = ((1 + 0j, 1j),
               (1 + 0j, 2 * cmath.exp(1j * math.pi / 3)),
               (1 + 0j, 0.5 * cmath.exp(1j * math.pi / 5)))


@dataclass(frozen=True)
class PVResult:
    """(1/πi) p.v.∫ f(τ)/(τ−t) dτ with arclength-symmetric and chord-symmetric windows"""
    t: complex
    value: complex
    chord_value: complex

    @property
    def difference(self) -> float:
        return abs(self.value - self.chord_value)

    def __str__(self) -> str:
        return f"Sf({self.t:.6f}) = {self.value:.10g} (chord windows differ by {self.difference:.3g})"


def _removable_value(g: np.ndarray, j: int, n: int) -> complex:
    """g(τ_j) from its four nearest neighbours, exact for cubics on uniform steps"""
    return (2.0 / 3.0) * (g[(j - 1) % n] + g[(j + 1) % n]) - (1.0 / 6.0) * (g[(j - 2) % n] + g[(j + 2) % n])


def _log_ratio(start: complex, end: complex, arg_start: float, arg_end: float) -> complex:
    """log(end − t) − log(start − t) along the branch, offsets given relative to t"""
    return complex(math.log(abs(end) / abs(start)), arg_end - arg_start)


def _arclength_term(curve: CurveModel, j: int, m: int) -> complex:
    """p.v.∫ dτ/(τ−t) with m samples cut out on either side of t"""
    rel = curve.relative(j)
    branch = curve.arg_branch(j)
    n = curve.resolution
    before, after = j - m, j + m
    if curve.closed:
        before, after = before % n, after % n
        return _log_ratio(rel[after], rel[before], branch[after], branch[before])
    return (_log_ratio(rel[0], rel[before], branch[0], branch[before]) +
            _log_ratio(rel[after], rel[n - 1], branch[after], branch[n - 1]))


def _chord_term(curve: CurveModel, j: int, radius: float) -> complex:
    """p.v.∫ dτ/(τ−t) with the window cut where |τ−t| first reaches the radius"""
    sites = curve.circle_sites(j, radius)
    args = curve.arg_at(sites)
    if curve.closed:
        if len(sites) < 2:
            raise NumericError(f"No chord window of radius {radius:.3g} around t={curve.points[j]:.6f}")
        position = (sites.chords - j) % curve.n_chords
        after, before = int(np.argmin(position)), int(np.argmax(position))
        return _log_ratio(sites.offsets[after], sites.offsets[before], args[after], args[before])
    rel = curve.relative(j)
    branch = curve.arg_branch(j)
    n = curve.resolution
    later = np.nonzero(sites.chords >= j)[0]
    earlier = np.nonzero(sites.chords < j)[0]
    if len(later) == 0 or len(earlier) == 0:
        raise NumericError(f"No chord window of radius {radius:.3g} around t={curve.points[j]:.6f}")
    after = int(later[np.argmin(sites.chords[later])])
    before = int(earlier[np.argmax(sites.chords[earlier])])
    return (_log_ratio(rel[0], sites.offsets[before], branch[0], args[before]) +
            _log_ratio(sites.offsets[after], rel[n - 1], args[after], branch[n - 1]))


def _richardson(terms: Sequence[complex], tol: float, label: str) -> complex:
    """Windows h, 2h, 4h with error c1·h + c2·h²"""
    first, second, fourth = terms
    two_level = 2 * first - second
    three_level = (8 * first - 6 * second + fourth) / 3
    if abs(three_level - two_level) > tol * max(1.0, abs(three_level)):
        raise NumericError(f"Non-convergent extrapolation of the {label} windows: "
                           f"{two_level:.8g} against {three_level:.8g}")
    return three_level


def pv_cauchy(curve: CurveModel, f: np.ndarray, t: Point, tol: float = DEFAULT_TOLERANCE) -> PVResult:
    """(Sf)(t) by singularity subtraction.

    The quotient (f(τ)−f(t))/(τ−t) is integrated over the whole curve by the trapezoid
    rule, and f(t)·p.v.∫dτ/(τ−t) is taken from the logarithm with windows shrinking
    to t and extrapolated to zero width.
    """
    j = curve.index_of(t)
    n = curve.resolution
    f = np.asarray(f, dtype=complex)
    if f.shape != (n,):
        raise InputError(f"Expected {n} samples, found: {f.shape}")
    if not curve.closed and not 2 <= j <= n - 3:
        raise InputError(f"t must lie at least two samples inside an open curve, found index {j}")
    if not np.all(np.isfinite(f)):
        raise InputError("The density must be finite at every sample")
    rel = curve.relative(j)
    with np.errstate(divide='ignore', invalid='ignore'):
        quotient = (f - f[j]) / rel
    quotient[j] = _removable_value(quotient, j, n)
    smooth = complex(np.sum(quotient * curve.tangents * curve.weights))

    h = curve.spacing(j)
    arclength = _richardson([_arclength_term(curve, j, m) for m in PV_WINDOWS], tol, "arclength")
    chord = _richardson([_chord_term(curve, j, m * h) for m in PV_WINDOWS], tol, "chord")
    scale = 1.0 / (math.pi * 1j)
    result = PVResult(complex(curve.points[j]), scale * (smooth + f[j] * arclength),
                      scale * (smooth + f[j] * chord))
    logger.debug(f"{result}")
    return result


def maximal_function(curve: CurveModel, f: np.ndarray, t: Point,
                     radii: Optional[np.ndarray] = None) -> SupEstimate:
    """(Mf)(t) = sup over R of |Γ(t,R)|⁻¹∫_{Γ(t,R)} |f|"""
    j = curve.index_of(t)
    radii = curve.radius_grid(j) if radii is None else np.asarray(radii, dtype=float)
    magnitude = np.abs(np.asarray(f))
    measures, integrals = portion_sweep(curve, j, radii, [magnitude])
    tracker = SupTracker()
    with np.errstate(divide='ignore', invalid='ignore'):
        tracker.add(integrals[0] / measures, radii, complex(curve.points[j]))
    return tracker.result()


def s_norm_lower_bound(space: SpaceSpec, trials: int = 32, degree: int = 16, seed: int = 0) -> float:
    """max ‖Sf‖/‖f‖ over random trigonometric polynomials, a lower bound for ‖S‖ on the circle"""
    curve = space.curve
    if curve.kind != CurveKind.UNIT_CIRCLE:
        raise InputError("The Monte-Carlo bound for S is available on the unit circle only")
    rng = np.random.default_rng(seed)
    orders = np.arange(-degree, degree + 1)
    powers = curve.points[:, None] ** orders[None, :]
    signs = np.where(orders >= 0, 1.0, -1.0)
    weight = sample_values(curve, space.weight)
    best = 0.0
    for _ in range(trials):
        c = rng.standard_normal(len(orders)) + 1j * rng.standard_normal(len(orders))
        f = powers @ c
        ratio = nakano_norm(curve, powers @ (signs * c), space.exponent, weight) / \
            nakano_norm(curve, f, space.exponent, weight)
        best = max(best, ratio)
    logger.info(f"‖S‖ ≥ {best:.6f} from {trials} random polynomials of degree {degree}")
    return best


@dataclass(frozen=True, eq=False)
class FiniteSection:
    """The compression of ϱ(aP+bQ)ϱ⁻¹ to span{τⁿ : |n| ≤ N}"""
    order: int
    matrix: np.ndarray
    p: float
    weight_exponent: float
    exponents: dict[complex, float] = field(default_factory=dict)

    @property
    def basis(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}(N={self.order}, p={self.p:g}, λ={self.weight_exponent:g}, "
                f"weight exponents {self.exponents})")


def emulation_exponents(a: PCSymbol, b: PCSymbol, p: float, weight_exponent: float) -> dict[complex, float]:
    """ν_t − 1/2 at every jump point and at the weight point 1, ν_t = 1/p + λ_t"""
    points = {1 + 0j: weight_exponent}
    for jump in a.jumps() + b.jumps():
        key = complex(round(jump.t.real, 12), round(jump.t.imag, 12))
        points.setdefault(key, 0.0)
    return {t: 1.0 / p + lam - 0.5 for t, lam in points.items()}


def finite_section(a: PCSymbol, b: PCSymbol, order: int, weight_exponent: float = 0.0,
                   p: float = 2.0) -> FiniteSection:
    if a.curve.kind != CurveKind.UNIT_CIRCLE or b.curve is not a.curve:
        raise InputError("Finite sections are built for symbols on one unit circle")
    if order < 1:
        raise InputError(f"The section order must be positive, found: {order}")
    if order > MAX_ORDER:
        raise InputError(f"Section order {order} exceeds the cost guard of {MAX_ORDER}")
    if not p > 1:
        raise InputError(f"The exponent must exceed 1, found: {p}")
    m = NODES_PER_ORDER * order
    theta = 2 * math.pi * (np.arange(m) + 0.5) / m
    nodes = np.exp(1j * theta)
    exponents = emulation_exponents(a, b, p, weight_exponent)
    log_rho = np.zeros(m)
    for t, mu in exponents.items():
        log_rho += mu * np.log(np.abs(nodes - t))
    rho = np.exp(log_rho)

    basis = np.arange(-order, order + 1)
    columns = np.exp(1j * np.outer(theta, basis)) / rho[:, None]
    frequencies = np.fft.fftfreq(m, 1.0 / m)
    spectrum = np.fft.fft(columns, axis=0)
    projected = np.fft.ifft(spectrum * (frequencies >= 0)[:, None], axis=0)
    image = rho[:, None] * (a.at_arclength(theta)[:, None] * projected +
                            b.at_arclength(theta)[:, None] * (columns - projected))
    coefficients = np.fft.fft(image, axis=0) / m
    phase = np.exp(-1j * math.pi * basis / m)
    matrix = phase[:, None] * coefficients[basis % m, :]
    return FiniteSection(order, matrix, float(p), float(weight_exponent), exponents)


def sigma_min(matrix: np.ndarray, iterations: int = POWER_ITERATIONS,
              tolerance: float = POWER_TOLERANCE) -> float:
    """Smallest singular value by inverse power iteration on (BᴴB)⁻¹ with one LU factorization"""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError(f"A square matrix is required, found shape {matrix.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', linalg.LinAlgWarning)
        lu = linalg.lu_factor(matrix, check_finite=False)
    if np.any(np.diag(lu[0]) == 0):
        return 0.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(len(matrix)) + 1j * rng.standard_normal(len(matrix))
    x /= np.linalg.norm(x)
    estimate = math.inf
    for _ in range(iterations):
        z = linalg.lu_solve(lu, linalg.lu_solve(lu, x, trans=2, check_finite=False), check_finite=False)
        norm = float(np.linalg.norm(z))
        if not math.isfinite(norm) or norm == 0:
            return 0.0
        previous, estimate = estimate, 1.0 / math.sqrt(norm)
        x = z / norm
        if abs(estimate - previous) <= tolerance * estimate:
            break
    return estimate


@dataclass(frozen=True)
class SigmaTrend:
    orders: list[int]
    sigmas: list[float]
    verdict: TrendVerdict
    slope: float

    def __str__(self) -> str:
        values = ", ".join(f"N={n}: {s:.4g}" for n, s in zip(self.orders, self.sigmas))
        return f"{self.verdict.value} (slope {self.slope:+.3f} per doubling; {values})"


def logarithmic_decay(orders: Sequence[int], sigmas: Sequence[float]) -> bool:
    """σ_min ≈ 1/(A + B·log N): 1/σ rises by a steady amount per doubling.

    A sequence converging to a positive limit rises by shrinking amounts instead,
    so the last increment of 1/σ must keep LOG_DECAY_STEADY of the first.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    if np.any(sigmas <= 0) or not np.all(np.diff(sigmas) < 0):
        return False
    doublings = np.log2(np.asarray(orders, dtype=float))
    inverse = 1.0 / sigmas
    fit = np.polyfit(doublings, inverse, 1)
    residual = inverse - np.polyval(fit, doublings)
    spread = float(np.sum((inverse - np.mean(inverse)) ** 2))
    explained = 1.0 - float(np.sum(residual ** 2)) / spread if spread > 0 else 0.0
    steps = np.diff(inverse) / np.diff(doublings)
    return bool(fit[0] > 0 and explained >= LOG_DECAY_FIT and steps[-1] >= LOG_DECAY_STEADY * steps[0]
                and sigmas[-1] < LOG_DECAY_DROP * sigmas[0])


def classify_trend(orders: Sequence[int], sigmas: Sequence[float]) -> tuple[TrendVerdict, float]:
    """Plateau, Decay or Inconclusive for σ_min against N.

    Decay is either a power law steeper than N^{−1/2}, or the 1/log N fall seen where
    a local criterion sits exactly on an integer. Both are tested before the plateau,
    since a logarithmic fall stays within the plateau spread at these orders.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    doublings = np.log2(np.asarray(orders, dtype=float))
    if np.any(sigmas <= 0):
        return TrendVerdict.DECAY, -math.inf
    slope = float(np.polyfit(doublings, np.log(sigmas), 1)[0])
    if slope < DECAY_SLOPE or logarithmic_decay(orders, sigmas):
        return TrendVerdict.DECAY, slope
    tail = sigmas[-3:]
    if np.min(tail) > PLATEAU_FLOOR and np.max(tail) <= PLATEAU_SPREAD * np.min(tail):
        return TrendVerdict.PLATEAU, slope
    return TrendVerdict.INCONCLUSIVE, slope


def sigma_min_trend(a: PCSymbol, b: PCSymbol, orders: Sequence[int] = DEFAULT_ORDERS,
                    weight_exponent: float = 0.0, p: float = 2.0) -> SigmaTrend:
    orders = [int(n) for n in orders]
    if len(orders) < 4 or any(n2 <= n1 for n1, n2 in zip(orders, orders[1:])):
        raise InputError(f"At least four increasing section orders are required, found: {orders}")
    sigmas = [sigma_min(finite_section(a, b, n, weight_exponent, p).matrix) for n in orders]
    verdict, slope = classify_trend(orders, sigmas)
    result = SigmaTrend(orders, sigmas, verdict, slope)
    logger.debug(f"σ_min trend of {a.label}P+{b.label}Q: {result}")
    return result


def circle_space(curve: UnitCircle, p: float, weight_exponent: float,
                 tol: float = DEFAULT_TOLERANCE) -> SpaceSpec:
    """L^p(T, |τ−1|^λ)"""
    weight = Weight([Power(1 + 0j, weight_exponent)]) if weight_exponent else Weight()
    return SpaceSpec(curve, ExponentField.constant(curve, p), weight, tol)


@dataclass(frozen=True)
class SuiteCase:
    jump: tuple[complex, complex]
    p: float
    weight_exponent: float
    fredholm: FredholmVerdict
    trend: SigmaTrend

    @property
    def decisive(self) -> bool:
        return self.fredholm != FredholmVerdict.BORDERLINE

    @property
    def agrees(self) -> bool:
        return ((self.fredholm == FredholmVerdict.FREDHOLM and self.trend.verdict == TrendVerdict.PLATEAU) or
                (self.fredholm == FredholmVerdict.NOT_FREDHOLM and self.trend.verdict == TrendVerdict.DECAY))

    def __str__(self) -> str:
        left, right = self.jump
        return (f"jump {left:.4g} -> {right:.4g}, p={self.p:g}, λ={self.weight_exponent:g}: "
                f"{self.fredholm.value} / {self.trend.verdict.value}"
                f"{'' if self.agrees or not self.decisive else ' (DISAGREE)'}")


@dataclass(frozen=True)
class SuiteReport:
    cases: list[SuiteCase]

    @property
    def decisive(self) -> int:
        return sum(1 for case in self.cases if case.decisive)

    @property
    def agreements(self) -> int:
        return sum(1 for case in self.cases if case.decisive and case.agrees)

    def __str__(self) -> str:
        return f"finite-section agreement: {self.agreements}/{self.decisive} non-Borderline cases"


def _run_case(curve: UnitCircle, jump: tuple[complex, complex], p: float, weight_exponent: float,
              orders: Sequence[int], tol: float) -> SuiteCase:
    left, right = jump
    a = PCSymbol.with_jumps(curve, [Jump(1 + 0j, left, right)], label=f"jump {left:.3g}->{right:.3g}")
    b = PCSymbol.constant(curve, 1.0)
    verdict = decide_fredholm(a, b, circle_space(curve, p, weight_exponent, tol), diagnostics=False).verdict
    trend = sigma_min_trend(a, b, orders, weight_exponent, p)
    return SuiteCase(jump, p, weight_exponent, verdict, trend)


def _parallel(tasks: Sequence[Callable[[], object]], workers: Optional[int]) -> list:
    workers = env_workers() if workers is None else max(1, workers)
    if workers == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda task: task(), tasks))


def agreement_suite(curve: UnitCircle, orders: Sequence[int] = DEFAULT_ORDERS,
                    tol: float = DEFAULT_TOLERANCE, workers: Optional[int] = None) -> SuiteReport:
    """decide_fredholm against the σ_min trend on the circle cases"""
    tasks = [lambda j=jump, p=p, lam=lam: _run_case(curve, j, p, lam, orders, tol)
             for jump in SUITE_JUMPS for p in SUITE_EXPONENTS for lam in SUITE_WEIGHTS]
    report = SuiteReport(_parallel(tasks, workers))
    for case in report.cases:
        logger.debug(f"{case}")
    logger.info(f"{report}")
    return report


@dataclass(frozen=True)
class CircleCheck:
    jump: Jump
    p: float
    expected: bool
    observed: FredholmVerdict

    @property
    def agrees(self) -> bool:
        if self.observed == FredholmVerdict.BORDERLINE:
            return False
        return self.expected == (self.observed == FredholmVerdict.FREDHOLM)


@dataclass(frozen=True)
class CircleCheckReport:
    checks: list[CircleCheck]

    @property
    def agreements(self) -> int:
        return sum(1 for check in self.checks if check.agrees)

    def failures(self) -> list[CircleCheck]:
        return [check for check in self.checks if not check.agrees]

    def __str__(self) -> str:
        return f"circle criterion agreement: {self.agreements}/{len(self.checks)}"


def circle_criterion(jump: Jump, p: float, tol: float = DEFAULT_TOLERANCE) -> bool:
    """The closed-form answer for one jump on the unweighted circle: the expression avoids ℤ"""
    value = -cmath.phase(jump.left / jump.right) / (2 * math.pi) + 1.0 / p
    return integer_margin(value, value) > tol


def circle_criterion_check(curve: UnitCircle, count: int = 100, seed: int = 0,
                           exponents: Sequence[float] = SUITE_EXPONENTS,
                           tol: float = DEFAULT_TOLERANCE, workers: Optional[int] = None) -> CircleCheckReport:
    """decide_fredholm against the closed form on random single jumps"""
    rng = np.random.default_rng(seed)
    spaces = {p: circle_space(curve, p, 0.0, tol) for p in exponents}
    one = PCSymbol.constant(curve, 1.0)
    cases = []
    for _ in range(count):
        k = int(rng.integers(curve.resolution))
        left = rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        right = rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        cases.append((Jump(complex(curve.points[k]), left, right), float(rng.choice(exponents))))

    def check(jump: Jump, p: float) -> CircleCheck:
        a = PCSymbol.with_jumps(curve, [jump])
        observed = decide_fredholm(a, one, spaces[p], diagnostics=False).verdict
        return CircleCheck(jump, p, circle_criterion(jump, p, tol), observed)

    report = CircleCheckReport(_parallel([lambda j=j, p=p: check(j, p) for j, p in cases], workers))
    for failure in report.failures():
        logger.warning(f"Circle criterion mismatch at {failure.jump} (p={failure.p:g}): "
                       f"expected {'Fredholm' if failure.expected else 'not Fredholm'}, "
                       f"found {failure.observed.value}")
    logger.info(f"{report}")
    return report


@dataclass(frozen=True)
class AlgebraReport:
    checks: list[AlgebraCheck]

    @property
    def passed(self) -> int:
        return sum(1 for check in self.checks if check.passed)

    def __str__(self) -> str:
        return f"index algebra: {self.passed}/{len(self.checks)} checks passed"


def algebra_suite(curve: CurveModel, t: Point = 0, count: int = 50, seed: int = 0,
                  tol: float = DEFAULT_TOLERANCE, decades: Optional[int] = None,
                  workers: Optional[int] = None) -> AlgebraReport:
    """index_algebra_checks over seeded factor pairs at t; a pair whose indices cannot be resolved fails"""
    centre = complex(curve.points[curve.index_of(t)])
    pairs = random_factor_pairs(centre, count, seed, spiral=curve.kind == CurveKind.LOG_SPIRAL)
    kwargs = {} if decades is None else {'decades': decades}

    def checks(one, two) -> list[AlgebraCheck]:
        try:
            return index_algebra_checks(curve, centre, one, two, tol, **kwargs)
        except NumericError as ex:
            logger.warning(f"Index algebra for {one} and {two}: {ex}")
            return [AlgebraCheck(f"indices of {one} and {two}", False, str(ex))]

    tasks = [lambda one=one, two=two: checks(one, two) for one, two in pairs]
    report = AlgebraReport([check for group in _parallel(tasks, workers) for check in group])
    logger.info(f"{report}")
    return report
