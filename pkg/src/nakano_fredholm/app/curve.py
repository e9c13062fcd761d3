"""
Curve geometry

Simple rectifiable curves are held as dense polygons sampled along arclength.
Every query is answered on the polygon: circle intersections come from the closed
form roots on each chord, portions Γ(t,R) are unions of per-chord intervals, and
the argument branch is accumulated sample to sample away from the centre.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from .config import CurveKind
from .errors import InputError, ResolutionError

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 2 ** 14
MAX_COMPONENTS = 64
CARLESON_PER_DECADE = 64
TABLE_PER_DECADE = 25

_MAX_STEP = 0.9 * math.pi

Point = Union[int, complex]


@dataclass(frozen=True)
class Sites:
    """Points on the curve addressed by chord index and fraction along the chord.

    Offsets are measured from the centre sample, so that small radii keep their
    relative accuracy.
    """
    centre_index: int
    centre: complex
    chords: np.ndarray
    fractions: np.ndarray
    offsets: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.centre + self.offsets

    def take(self, selection: np.ndarray) -> 'Sites':
        return Sites(self.centre_index, self.centre, self.chords[selection],
                     self.fractions[selection], self.offsets[selection])

    def __len__(self) -> int:
        return len(self.chords)

    @staticmethod
    def concat(parts: Sequence['Sites']) -> 'Sites':
        if not parts:
            raise ValueError("Nothing to concatenate")
        first = parts[0]
        return Sites(first.centre_index, first.centre,
                     np.concatenate([p.chords for p in parts]).astype(int),
                     np.concatenate([p.fractions for p in parts]),
                     np.concatenate([p.offsets for p in parts]))


@dataclass(frozen=True)
class ArcPortion:
    """The set Γ(t,R) of curve points closer than R to t, as chord intervals"""
    center: complex
    center_index: int
    radius: float
    components: list[tuple[float, float]]
    chords: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    segments: np.ndarray

    def measure(self) -> float:
        return float(np.sum((self.hi - self.lo) * self.segments))

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}(center={self.center}, radius={self.radius}, "
                f"components={len(self.components)}, measure={self.measure()})")


@dataclass(frozen=True)
class CircleTable:
    """Intersections of the curve with circles |τ−t| = ρ_k for a table of radii"""
    radii: np.ndarray
    sites: Sites
    starts: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class CarlesonReport:
    value: float
    t: complex
    radius: float

    def __str__(self) -> str:
        return f"carleson constant {self.value:.6f} at t={self.t:.6f}, R={self.radius:.6g}"


class CurveModel:
    """A simple closed or open curve sampled along arclength.

    Subclasses provide the samples. Chord k joins sample k to sample k+1, and on
    closed curves the last chord returns to sample 0.
    """
    def __init__(self,
                 kind: CurveKind,
                 points: np.ndarray,
                 closed: bool,
                 segments: np.ndarray,
                 tangents: Optional[np.ndarray] = None):
        points = np.asarray(points, dtype=complex)
        n = len(points)
        if n < (3 if closed else 2):
            raise InputError(f"Too few samples for a curve: {n}")
        segments = np.asarray(segments, dtype=float)
        n_chords = n if closed else n - 1
        if len(segments) != n_chords:
            raise InputError(f"Expected {n_chords} arc segments, found: {len(segments)}")
        following = np.roll(points, -1)[:n_chords]
        chords = following - points[:n_chords]
        chord_lengths = np.abs(chords)
        if np.any(chord_lengths == 0) or np.any(segments <= 0):
            raise InputError("Consecutive curve samples must be distinct")

        self.__kind = kind
        self.__points = points
        self.__closed = closed
        self.__segments = segments
        self.__chord_lengths = chord_lengths
        self.__directions = chords / chord_lengths
        self.__arclength = np.concatenate(([0.0], np.cumsum(segments)))[:n]
        self.__length = float(np.sum(segments))
        self.__tangents = self._default_tangents() if tangents is None else np.asarray(tangents)
        self.__weights = self._quadrature_weights()
        self.__arg_cache: dict[int, np.ndarray] = {}

        chord_total = float(np.sum(chord_lengths))
        if abs(chord_total - self.__length) > 1e-3 * self.__length:
            raise ResolutionError(f"Chord lengths sum to {chord_total}, arclength is "
                                  f"{self.__length}; increase the resolution")
        if closed:
            winding = self.winding_number(0j)
            if winding != 1:
                raise InputError(f"A closed curve must wind once counter-clockwise around "
                                 f"the origin, winding number: {winding}")

    @property
    def kind(self) -> CurveKind:
        return self.__kind

    @property
    def points(self) -> np.ndarray:
        return self.__points

    @property
    def closed(self) -> bool:
        return self.__closed

    @property
    def length(self) -> float:
        return self.__length

    @property
    def resolution(self) -> int:
        return len(self.__points)

    @property
    def arclength(self) -> np.ndarray:
        return self.__arclength

    @property
    def segments(self) -> np.ndarray:
        return self.__segments

    @property
    def chord_lengths(self) -> np.ndarray:
        return self.__chord_lengths

    @property
    def n_chords(self) -> int:
        return len(self.__segments)

    @property
    def tangents(self) -> np.ndarray:
        return self.__tangents

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for ∫ f |dτ| over the samples"""
        return self.__weights

    @property
    def singular_indices(self) -> list[int]:
        """Samples where the curve is not locally smooth"""
        return [] if self.__closed else [0, self.resolution - 1]

    def point_at(self, s: float) -> complex:
        if not -1e-12 * self.__length <= s <= self.__length * (1 + 1e-12):
            raise InputError(f"Arclength out of range [0, {self.__length}]: {s}")
        s = min(max(s, 0.0), self.__length)
        k = int(np.searchsorted(self.__arclength, s, side='right')) - 1
        k = min(k, self.n_chords - 1)
        fraction = (s - self.__arclength[k]) / self.__segments[k]
        return complex(self.__points[k] + fraction * self.__chord_lengths[k] * self.__directions[k])

    def index_of(self, t: Point) -> int:
        """The sample index of a point given by index or by its position on the curve"""
        if isinstance(t, (int, np.integer)):
            if not 0 <= t < self.resolution:
                raise InputError(f"Sample index out of range: {t}")
            return int(t)
        t = complex(t)
        distances = np.abs(self.__points - t)
        k = int(np.argmin(distances))
        tolerance = max(4.0 * float(np.max(self.__chord_lengths)), 1e-9)
        if distances[k] > tolerance:
            raise InputError(f"Point {t} is not on the curve, nearest sample is "
                             f"{distances[k]:.3g} away")
        return k

    def relative(self, j: int) -> np.ndarray:
        """Offsets τ_k − τ_j of every sample from sample j"""
        return self.__points - self.__points[j]

    def next_index(self, k: np.ndarray) -> np.ndarray:
        return (k + 1) % self.resolution if self.__closed else np.minimum(k + 1, self.resolution - 1)

    def d_max(self, t: Point) -> float:
        j = self.index_of(t)
        return float(np.max(np.abs(self.relative(j))))

    def spacing(self, t: Point) -> float:
        """The longer of the chords adjacent to t"""
        j = self.index_of(t)
        adjacent = [k for k in (j - 1, j) if 0 <= k < self.n_chords or self.__closed]
        return float(max(self.__chord_lengths[k % self.n_chords] for k in adjacent))

    def winding_number(self, z0: complex) -> int:
        rel = self.__points - z0
        if self.__closed:
            rel = np.append(rel, rel[0])
        steps = np.angle(rel[1:] / rel[:-1])
        return int(round(float(np.sum(steps)) / (2 * math.pi)))

    def interpolate(self, values: np.ndarray, sites: Sites) -> np.ndarray:
        """Values at sites from values at samples, linear along each chord"""
        following = self.next_index(sites.chords)
        return values[sites.chords] * (1.0 - sites.fractions) + values[following] * sites.fractions

    def sample_sites(self, t: Point, indices: Optional[np.ndarray] = None) -> Sites:
        j = self.index_of(t)
        if indices is None:
            indices = np.arange(self.resolution)
        indices = np.asarray(indices, dtype=int)
        chords = np.minimum(indices, self.n_chords - 1)
        fractions = np.where(indices > chords, 1.0, 0.0)
        return Sites(j, complex(self.__points[j]), chords, fractions, self.relative(j)[indices])

    def _chord_roots(self, j: int, radius: float):
        rel = self.relative(j)
        a = rel[:self.n_chords]
        b = rel[self.next_index(np.arange(self.n_chords))]
        conj_e = self.__directions.conjugate()
        projected = a * conj_e
        beta_a = projected.real
        beta_b = (b * conj_e).real
        disc = radius * radius - projected.imag ** 2
        hit = disc >= 0
        root = np.sqrt(np.where(hit, disc, 0.0))
        return a, b, beta_a, beta_b, root, hit

    def circle_sites(self, t: Point, radius: float) -> Sites:
        """All points τ of the curve with |τ−t| = R"""
        j = self.index_of(t)
        a, b, beta_a, beta_b, root, hit = self._chord_roots(j, radius)
        ell = self.__chord_lengths
        e = self.__directions
        chords, fractions, offsets = [], [], []
        last = self.n_chords - 1
        for sign in (-1.0, 1.0):
            sigma = -beta_a + sign * root
            from_end = beta_b - sign * root
            upper_ok = sigma < ell
            if not self.__closed:
                upper_ok[last] = sigma[last] <= ell[last]
            valid = hit & (sigma >= 0) & upper_ok
            if sign > 0:
                valid &= root > 0
            k = np.nonzero(valid)[0]
            near_start = sigma[k] <= 0.5 * ell[k]
            offset = np.where(near_start, a[k] + sigma[k] * e[k], b[k] - from_end[k] * e[k])
            chords.append(k)
            fractions.append(np.clip(sigma[k] / ell[k], 0.0, 1.0))
            offsets.append(offset)
        chords_all = np.concatenate(chords)
        order = np.lexsort((np.concatenate(fractions), chords_all))
        return Sites(j, complex(self.__points[j]), chords_all[order].astype(int),
                     np.concatenate(fractions)[order], np.concatenate(offsets)[order])

    def circle_table(self, t: Point, radii: np.ndarray) -> CircleTable:
        j = self.index_of(t)
        parts = []
        counts = np.zeros(len(radii), dtype=int)
        for k, radius in enumerate(radii):
            sites = self.circle_sites(j, float(radius))
            if len(sites) == 0:
                raise ResolutionError(f"No circle intersections at radius {radius:.3g} "
                                      f"around t={self.__points[j]:.6f}; resolution insufficient")
            counts[k] = len(sites)
            parts.append(sites)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        return CircleTable(np.asarray(radii, dtype=float), Sites.concat(parts), starts, counts)

    def portion(self, t: Point, radius: float) -> ArcPortion:
        if radius <= 0:
            raise InputError(f"Portion radius must be positive: {radius}")
        j = self.index_of(t)
        _, _, beta_a, _, root, hit = self._chord_roots(j, radius)
        ell = self.__chord_lengths
        lo = np.clip(-beta_a - root, 0.0, ell) / ell
        hi = np.clip(-beta_a + root, 0.0, ell) / ell
        inside = hit & (hi > lo)
        chords = np.nonzero(inside)[0]
        if len(chords) == 0:
            raise ResolutionError(f"Empty portion at radius {radius:.3g}; resolution insufficient")
        lo, hi = lo[chords], hi[chords]
        components = self._components(chords, lo, hi)
        return ArcPortion(complex(self.__points[j]), j, float(radius), components,
                          chords, lo, hi, self.__segments[chords])

    def _component_breaks(self, chords: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        joined = (np.diff(chords) == 1) & (hi[:-1] >= 1.0) & (lo[1:] <= 0.0)
        return np.concatenate(([0], np.nonzero(~joined)[0] + 1))

    def _components(self, chords: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> list[tuple[float, float]]:
        breaks = self._component_breaks(chords, lo, hi)
        ends = np.append(breaks[1:], len(chords)) - 1
        s, seg = self.__arclength, self.__segments
        components = [(float(s[chords[b]] + lo[b] * seg[chords[b]]),
                       float(s[chords[e]] + hi[e] * seg[chords[e]])) for b, e in zip(breaks, ends)]
        wraps = (self.__closed and len(components) > 1 and chords[0] == 0 and lo[0] <= 0.0
                 and chords[-1] == self.n_chords - 1 and hi[-1] >= 1.0)
        if wraps:
            first = components.pop(0)
            last = components.pop()
            components.append((last[0], first[1] + self.__length))
        if len(components) > MAX_COMPONENTS:
            raise ResolutionError(f"Portion has {len(components)} components, "
                                  f"more than {MAX_COMPONENTS} are not supported")
        return components

    def portion_measures(self, t: Point, radii: np.ndarray) -> np.ndarray:
        """|Γ(t,R)| for every R in radii"""
        j = self.index_of(t)
        rel = self.relative(j)[:self.n_chords]
        projected = rel * self.__directions.conjugate()
        beta, perp2 = projected.real, projected.imag ** 2
        ell, seg = self.__chord_lengths, self.__segments
        radii = np.asarray(radii, dtype=float)
        result = np.empty(len(radii))
        for start in range(0, len(radii), 32):
            r = radii[start:start + 32, None]
            disc = r * r - perp2
            root = np.sqrt(np.clip(disc, 0.0, None))
            lo = np.clip(-beta - root, 0.0, ell)
            hi = np.clip(-beta + root, 0.0, ell)
            inside = np.where(disc > 0, (hi - lo) / ell, 0.0)
            result[start:start + 32] = inside @ seg
        return result

    def omega_arc(self, t: Point, delta: float) -> ArcPortion:
        """The single arc of Γ(t,δ) that contains t"""
        j = self.index_of(t)
        d_t = self.d_max(j)
        if not 0 < delta < d_t:
            raise InputError(f"Arc radius must lie in (0, {d_t}): {delta}")
        portion = self.portion(j, delta)
        chords, lo, hi = portion.chords, portion.lo, portion.hi
        breaks = self._component_breaks(chords, lo, hi)
        label = np.zeros(len(chords), dtype=int)
        label[breaks[1:]] = 1
        label = np.cumsum(label)
        if (self.__closed and label[-1] > 0 and chords[0] == 0 and lo[0] <= 0.0
                and chords[-1] == self.n_chords - 1 and hi[-1] >= 1.0):
            label[label == label[-1]] = 0
        own = [k for k in (j, j - 1) if 0 <= k < self.n_chords or (self.__closed and k == -1)]
        own = [k % self.n_chords for k in own]
        position = np.nonzero(np.isin(chords, own))[0]
        keep = label == label[position[0]]
        chords, lo, hi = chords[keep], lo[keep], hi[keep]
        components = self._components(chords, lo, hi) if len(chords) < self.n_chords else \
            [(0.0, self.__length)]
        return ArcPortion(portion.center, j, float(delta), components, chords, lo, hi,
                          self.__segments[chords])

    def arg_branch(self, t: Point) -> np.ndarray:
        """Continuous arg(τ_k − t) over the samples, NaN at t itself"""
        j = self.index_of(t)
        cached = self.__arg_cache.get(j)
        if cached is not None:
            return cached
        rel = self.relative(j)
        n = self.resolution
        result = np.full(n, np.nan)
        if self.__closed:
            runs = [(j + 1 + np.arange(n - 1)) % n]
        else:
            runs = [np.arange(j + 1, n), np.arange(j - 1, -1, -1)]
        for run in runs:
            if len(run) == 0:
                continue
            steps = np.angle(rel[run[1:]] / rel[run[:-1]])
            if len(steps) and np.max(np.abs(steps)) > _MAX_STEP:
                raise ResolutionError(f"Argument step of {np.max(np.abs(steps)):.3f} rad around "
                                      f"t={self.__points[j]:.6f}; resolution insufficient")
            result[run] = np.angle(rel[run[0]]) + np.concatenate(([0.0], np.cumsum(steps)))
        self.__arg_cache[j] = result
        return result

    def arg_at(self, sites: Sites) -> np.ndarray:
        """The branch of arg(τ − t) at sites, t being the centre of the sites. NaN at t."""
        j = sites.centre_index
        branch = self.arg_branch(j)
        rel = self.relative(j)
        start, end = sites.chords, self.next_index(sites.chords)
        nearer = np.where(sites.fractions <= 0.5, start, end)
        other = np.where(sites.fractions <= 0.5, end, start)
        anchor = np.where(nearer == j, other, nearer)
        at_centre = sites.offsets == 0
        safe = np.where(at_centre, 1.0, sites.offsets)
        result = branch[anchor] + np.angle(safe / rel[anchor])
        result[at_centre] = np.nan
        return result

    def arg_function(self, t: Point) -> Callable[[float], float]:
        """s ↦ arg(τ(s) − t) on the branch of arg_branch"""
        j = self.index_of(t)

        def evaluate(s: float) -> float:
            tau = self.point_at(s)
            if abs(tau - self.__points[j]) == 0:
                raise InputError(f"The argument branch is undefined at t={self.__points[j]}")
            k = min(int(np.searchsorted(self.__arclength, s, side='right')) - 1, self.n_chords - 1)
            fraction = (s - self.__arclength[k]) / self.__segments[k]
            offset = self.relative(j)[k] + fraction * self.__chord_lengths[k] * self.__directions[k]
            sites = Sites(j, complex(self.__points[j]), np.array([k]), np.array([fraction]),
                          np.array([offset]))
            return float(self.arg_at(sites)[0])

        return evaluate

    def eta_values(self, t: Point) -> np.ndarray:
        return np.exp(-self.arg_branch(t))

    def radius_grid(self, t: Point, per_decade: int = CARLESON_PER_DECADE) -> np.ndarray:
        """Log-spaced radii from four sample spacings up to d_t inclusive"""
        j = self.index_of(t)
        d_t = self.d_max(j)
        lowest = 4.0 * self.spacing(j)
        if lowest >= d_t:
            return np.array([d_t])
        count = max(2, int(math.ceil(math.log10(d_t / lowest) * per_decade)) + 1)
        return np.geomspace(lowest, d_t, count)

    def radius_table(self, t: Point, decades: int, per_decade: int = TABLE_PER_DECADE) -> np.ndarray:
        """Radii ρ_k = ρ_top·10^{(k−K)/per_decade}, K = per_decade·(decades+1), ρ_top just below d_t"""
        top = self.d_max(t) * (1.0 - 1e-9)
        size = per_decade * (decades + 1)
        return top * 10.0 ** ((np.arange(size + 1) - size) / per_decade)

    def carleson_centres(self, count: int = 32) -> list[int]:
        strided = np.round(np.linspace(0, self.resolution - 1, count)).astype(int).tolist()
        return sorted(set(strided + [0] + list(self.singular_indices)))

    def carleson_constant(self, radii: Optional[np.ndarray] = None,
                          centres: Optional[Sequence[int]] = None) -> CarlesonReport:
        """sup |Γ(t,R)|/R over sampled centres and radii"""
        best = CarlesonReport(0.0, complex(self.__points[0]), 0.0)
        for j in (self.carleson_centres() if centres is None else centres):
            grid = self.radius_grid(j) if radii is None else np.asarray(radii, dtype=float)
            ratios = self.portion_measures(j, grid) / grid
            k = int(np.argmax(ratios))
            if ratios[k] > best.value:
                best = CarlesonReport(float(ratios[k]), complex(self.__points[j]), float(grid[k]))
        logger.debug(f"{self.__class__.__name__}: {best}")
        return best

    def _default_tangents(self) -> np.ndarray:
        p = self.__points
        if self.__closed:
            diff = np.roll(p, -1) - np.roll(p, 1)
        else:
            diff = np.empty_like(p)
            diff[1:-1] = p[2:] - p[:-2]
            diff[0] = p[1] - p[0]
            diff[-1] = p[-1] - p[-2]
        return diff / np.abs(diff)

    def _quadrature_weights(self) -> np.ndarray:
        seg = self.__segments
        if self.__closed:
            return 0.5 * (seg + np.roll(seg, 1))
        weights = np.zeros(len(seg) + 1)
        weights[:-1] += 0.5 * seg
        weights[1:] += 0.5 * seg
        return weights

    def __str__(self) -> str:
        return (f"{self.__class__.__name__}(kind={self.kind.value}, closed={self.closed}, "
                f"length={self.length:.6f}, resolution={self.resolution})")


class UnitCircle(CurveModel):
    """τ(s) = e^{is}, counter-clockwise from 1"""
    def __init__(self, resolution: int = DEFAULT_RESOLUTION):
        s = 2 * math.pi * np.arange(resolution) / resolution
        points = np.exp(1j * s)
        super().__init__(CurveKind.UNIT_CIRCLE, points, True,
                         np.full(resolution, 2 * math.pi / resolution), 1j * points)

    def point_at(self, s: float) -> complex:
        if not 0 <= s <= 2 * math.pi * (1 + 1e-12):
            raise InputError(f"Arclength out of range [0, 2π]: {s}")
        return complex(np.exp(1j * s))


class SmoothJordan(CurveModel):
    """τ(θ) = Σ c_k e^{ikθ}, resampled to equal arclength steps"""
    def __init__(self, coefficients: Sequence[tuple[int, complex]], resolution: int = DEFAULT_RESOLUTION):
        if not coefficients:
            raise InputError("curve.coefficients: at least one coefficient is required")
        self.__coefficients = [(int(k), complex(c)) for k, c in coefficients]
        theta, speed = self._speed(8 * resolution)
        area = self._signed_area(theta)
        if area < 0:
            logger.info("Trigonometric curve is clockwise, reversing the parameterization")
            self.__coefficients = [(-k, c) for k, c in self.__coefficients]
            theta, speed = self._speed(8 * resolution)
        cumulative = integrate.cumulative_trapezoid(speed, theta, initial=0.0)
        length = float(cumulative[-1])
        targets = length * np.arange(resolution) / resolution
        theta_s = np.interp(targets, cumulative, theta)
        points = self._evaluate(theta_s)
        derivative = self._derivative(theta_s)
        turning = np.angle(np.roll(derivative, -1) / derivative).sum() / (2 * math.pi)
        if round(turning) != 1:
            raise InputError("curve.coefficients: they do not describe a simple closed curve")
        super().__init__(CurveKind.SMOOTH_JORDAN, points, True,
                         np.full(resolution, length / resolution), derivative / np.abs(derivative))

    @property
    def coefficients(self) -> list[tuple[int, complex]]:
        return list(self.__coefficients)

    def _evaluate(self, theta: np.ndarray) -> np.ndarray:
        return sum(c * np.exp(1j * k * theta) for k, c in self.__coefficients)

    def _derivative(self, theta: np.ndarray) -> np.ndarray:
        return sum(1j * k * c * np.exp(1j * k * theta) for k, c in self.__coefficients)

    def _speed(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        theta = np.linspace(0.0, 2 * math.pi, count + 1)
        speed = np.abs(self._derivative(theta))
        if np.min(speed) <= 0:
            raise InputError("curve.coefficients: the parameterization is singular")
        return theta, speed

    def _signed_area(self, theta: np.ndarray) -> float:
        p = self._evaluate(theta[:-1])
        return 0.5 * float(np.sum((p.conjugate() * np.roll(p, -1)).imag))


class PolylineSampled(CurveModel):
    """A polygon through the given vertices, densified to the requested resolution"""
    def __init__(self, vertices: Sequence[complex], closed: bool = False,
                 resolution: int = DEFAULT_RESOLUTION):
        vertices = np.asarray(vertices, dtype=complex)
        if len(vertices) < (3 if closed else 2):
            raise InputError(f"curve.points: too few vertices, found: {len(vertices)}")
        if closed:
            area = 0.5 * float(np.sum((vertices.conjugate() * np.roll(vertices, -1)).imag))
            if area < 0:
                logger.info("Closed polyline is clockwise, reversing the vertex order")
                vertices = vertices[::-1]
            vertices = np.append(vertices, vertices[0])
        edges = np.abs(np.diff(vertices))
        if np.any(edges == 0):
            raise InputError("curve.points: consecutive vertices must be distinct")
        cumulative = np.concatenate(([0.0], np.cumsum(edges)))
        length = float(cumulative[-1])
        targets = np.linspace(0.0, length, resolution, endpoint=not closed)
        corners = cumulative[:-1] if closed else cumulative
        gap = 1e-9 * length
        far = np.min(np.abs(targets[:, None] - corners[None, :]), axis=1) > gap
        s = np.unique(np.concatenate((corners, targets[far])))
        points = np.interp(s, cumulative, vertices.real) + 1j * np.interp(s, cumulative, vertices.imag)
        segments = np.diff(np.append(s, length)) if closed else np.diff(s)
        self.__corners = [int(i) for i in np.searchsorted(s, corners)]
        super().__init__(CurveKind.POLYLINE, points, closed, segments)

    @property
    def singular_indices(self) -> list[int]:
        return sorted(set(self.__corners))


class LogSpiralAttached(CurveModel):
    """A closed curve that winds into the attachment point as a logarithmic spiral.

    Inside the disc |τ−t₀| < r₀ the base curve is replaced by the two arms
    t₀ ± r·e^{−iδ log r}, which are joined to the base by arcs of the circle
    |τ−t₀| = r₀. The attachment point is sample 0.
    """
    SMALLEST_RADIUS = 1e-14
    ARM_PER_DECADE = 50

    def __init__(self, base: CurveModel, attach: complex, delta: float, radius: float = 0.5):
        if not base.closed:
            raise InputError("curve.base: a spiral can only be attached to a closed curve")
        j0 = base.index_of(attach)
        t0 = complex(base.points[j0])
        if not 0 < radius < 0.5 * base.d_max(j0):
            raise InputError(f"curve.radius: must lie in (0, {0.5 * base.d_max(j0):.6f}), "
                             f"found: {radius}")
        self.__delta = float(delta)
        self.__radius = float(radius)
        self.__base = base
        self.__attach = t0
        h = base.length / base.resolution

        after, k_after, before, k_before = self._exit_points(base, j0, radius)
        path = self._base_path(base, j0, k_after, k_before, radius, after, before)

        arms = self._arm_radii(h)
        arm_plus = arms * np.exp(-1j * self.__delta * np.log(arms))
        ends = {+1: complex(arm_plus[-1]), -1: complex(-arm_plus[-1])}
        out_sign, out_sweep, in_sweep = self._pair(ends, after - t0, before - t0)
        in_sign = -out_sign

        arc_out = self._arc(ends[out_sign], out_sweep, after - t0, h)
        arc_in = self._arc(before - t0, in_sweep, ends[in_sign], h)
        offsets = np.concatenate((
            [0j],
            out_sign * arm_plus,
            arc_out[1:-1],
            [after - t0],
            base.points[path] - t0,
            [before - t0],
            arc_in[1:-1],
            (in_sign * arm_plus)[::-1]))

        arm_steps = math.sqrt(1.0 + self.__delta ** 2) * np.diff(np.concatenate(([0.0], arms)))
        arc_steps_out = np.full(len(arc_out) - 1, radius * abs(out_sweep) / (len(arc_out) - 1))
        arc_steps_in = np.full(len(arc_in) - 1, radius * abs(in_sweep) / (len(arc_in) - 1))
        base_steps = np.abs(np.diff(np.concatenate(([after], base.points[path], [before]))))
        segments = np.concatenate((arm_steps, arc_steps_out, base_steps, arc_steps_in,
                                   arm_steps[::-1]))
        if len(segments) != len(offsets):
            raise ResolutionError(f"Spiral assembly mismatch: {len(segments)} segments "
                                  f"for {len(offsets)} samples")

        points = t0 + offsets
        winding = float(np.sum(np.angle(np.roll(points, -1) / points))) / (2 * math.pi)
        if winding < 0:
            logger.debug("Spiral loop is clockwise, reversing the sample order")
            offsets = np.concatenate(([0j], offsets[1:][::-1]))
            segments = segments[::-1]
        self.__offsets = offsets
        super().__init__(CurveKind.LOG_SPIRAL, t0 + offsets, True, segments)

    @property
    def delta(self) -> float:
        return self.__delta

    @property
    def base(self) -> CurveModel:
        return self.__base

    @property
    def attach(self) -> complex:
        return self.__attach

    @property
    def singular_indices(self) -> list[int]:
        return [0]

    def relative(self, j: int) -> np.ndarray:
        if j == 0:
            return self.__offsets
        return super().relative(j)

    def _arm_radii(self, h: float) -> np.ndarray:
        decades = math.log10(self.__radius / self.SMALLEST_RADIUS)
        geometric = np.geomspace(self.SMALLEST_RADIUS, self.__radius,
                                 int(math.ceil(decades * self.ARM_PER_DECADE)) + 1)
        step = h / math.sqrt(1.0 + self.__delta ** 2)
        uniform = np.arange(step, self.__radius, step)
        radii = np.unique(np.concatenate((geometric, uniform, [self.__radius])))
        return radii[radii <= self.__radius]

    @staticmethod
    def _exit_points(base: CurveModel, j0: int, radius: float) -> tuple[complex, int, complex, int]:
        n = base.resolution
        rel = base.relative(j0)
        distance = np.abs(rel)
        forward = (j0 + np.arange(1, n)) % n
        backward = (j0 - np.arange(1, n)) % n
        k_after = int(forward[np.argmax(distance[forward] >= radius)])
        k_before = int(backward[np.argmax(distance[backward] >= radius)])

        def crossing(inside: int, outside: int) -> complex:
            a, b = rel[inside], rel[outside]
            e = (b - a) / abs(b - a)
            projected = a * e.conjugate()
            sigma = -projected.real + math.sqrt(max(radius ** 2 - projected.imag ** 2, 0.0))
            return complex(base.points[j0] + a + sigma * e)

        after = crossing((k_after - 1) % n, k_after)
        before = crossing((k_before + 1) % n, k_before)
        return after, k_after, before, k_before

    @staticmethod
    def _base_path(base: CurveModel, j0: int, k_after: int, k_before: int, radius: float,
                   after: complex, before: complex) -> np.ndarray:
        n = base.resolution
        count = (k_before - k_after) % n + 1
        path = (k_after + np.arange(count)) % n
        if np.any(np.abs(base.relative(j0)[path]) < radius):
            raise InputError("curve.radius: the base curve re-enters the spiral disc")
        points = base.points[path]
        distinct = (np.abs(points - after) > 1e-12) & (np.abs(points - before) > 1e-12)
        return path[distinct]

    @staticmethod
    def _adjacent_sweep(start: complex, end: complex, others: list[complex]) -> Optional[float]:
        """Signed sweep from start to end along the circle that passes none of the others"""
        ccw = float(np.angle(end / start)) % (2 * math.pi)
        positions = [float(np.angle(z / start)) % (2 * math.pi) for z in others]
        if not any(0 < p < ccw for p in positions):
            return ccw
        if not any(p > ccw for p in positions):
            return ccw - 2 * math.pi
        return None

    @staticmethod
    def _pair(ends: dict[int, complex], after: complex, before: complex) -> tuple[int, float, float]:
        best = None
        for out_sign in (+1, -1):
            out_end, in_end = ends[out_sign], ends[-out_sign]
            out_sweep = LogSpiralAttached._adjacent_sweep(out_end, after, [in_end, before])
            in_sweep = LogSpiralAttached._adjacent_sweep(before, in_end, [out_end, after])
            if out_sweep is None or in_sweep is None:
                continue
            total = abs(out_sweep) + abs(in_sweep)
            if best is None or total < best[0]:
                best = (total, out_sign, out_sweep, in_sweep)
        if best is None:
            raise ResolutionError("Could not join the spiral arms to the base curve")
        return best[1], best[2], best[3]

    def _arc(self, start: complex, sweep: float, end: complex, h: float) -> np.ndarray:
        count = max(2, int(math.ceil(abs(sweep) * self.__radius / h)) + 1)
        arc = self.__radius * np.exp(1j * (np.angle(start) + np.linspace(0.0, sweep, count)))
        arc[0], arc[-1] = start, end
        return arc
