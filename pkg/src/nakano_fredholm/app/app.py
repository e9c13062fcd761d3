#!/usr/bin/env python3
import logging

from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Optional

from . import artifacts
from .config import CommandType, CurveKind, FredholmVerdict, TrendVerdict, Verdict
from .curve import UnitCircle
from .errors import InputError, NumericError
from .fredholm import (DEFAULT_TOLERANCE, carleson_estimate, decide_S_bounded, decide_fredholm,
                       decide_maximal_bounded, indicator_profile, leaf)
from .indices import DEFAULT_DECADES, V0, W, W0, index_pair, spirality
from .lab import agreement_suite, algebra_suite, circle_criterion_check
from .paths import Paths
from .scene import LabSettings, SceneConfig
from .spaces import Weight

logger = logging.getLogger(__name__)

VALIDATION_RESOLUTION = 4096


@dataclass
class RunResult:
    """Result of one command: exit code, report lines, written files and the step log"""
    command: str = ""
    success: bool = False
    message: str = ""
    exit_code: int = 0
    lines: list[str] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    steps_log: list[str] = field(default_factory=list)

    def add_step(self, step: str, log_level=logging.INFO) -> 'RunResult':
        self.steps_log.append(f"{datetime.now().strftime('%H:%M:%S')} - {step}")
        logger.log(log_level, step)
        return self

    def add_line(self, line: str) -> 'RunResult':
        self.lines.append(line)
        return self

    def as_failure_ex(self, message: str, ex: Exception) -> 'RunResult':
        logger.exception(message, exc_info=ex)
        return self.as_failure(message, NumericError.exit_code)

    def as_failure(self, message: str, exit_code: int) -> 'RunResult':
        self.success = False
        self.exit_code = exit_code
        self.add_step(message, logging.WARNING)
        self.message = message
        return self

    def as_success(self, message: str) -> 'RunResult':
        self.success = True
        self.exit_code = 0
        self.add_step(message, logging.DEBUG)
        self.message = message
        return self

    def __str__(self):
        steps_lines = '\n'.join(self.steps_log)
        return (f"{self.__class__.__name__}"
                f"(success={self.success}, exit_code={self.exit_code}\nmessage={self.message}"
                f"\nsteps_log={steps_lines})")


class App:
    def __init__(self, resolution: Optional[int] = None):
        self.resolution = resolution
        self.__handlers: dict[str, Callable[[SceneConfig, RunResult, str, int], None]] = {
            CommandType.CARLESON.value: self._carleson,
            CommandType.INDICES.value: self._indices,
            CommandType.SPIRALITY.value: self._spirality,
            CommandType.BOUNDED_M.value: self._bounded_m,
            CommandType.BOUNDED_S.value: self._bounded_s,
            CommandType.PROFILE.value: self._profile,
            CommandType.LEAF.value: self._leaf,
            CommandType.FREDHOLM.value: self._fredholm,
            CommandType.VALIDATE.value: self._validate,
        }

    def run(self,
            command: str,
            config_path: Optional[str] = None,
            out_dir: str = "out",
            tol: Optional[float] = None,
            decades: Optional[int] = None,
            seed: int = 0) -> RunResult:

        result = RunResult(command=str(command))
        try:
            handler = self.__handlers.get(str(command).lower())
            if handler is None:
                raise InputError(f"Unknown command: {command}, expected one of {CommandType.values()}")
            out_dir = Paths.output_dir(out_dir)
            scene = self._scene(command, config_path, tol, decades)
            result.add_step(f"Running {command} on {scene}")
            handler(scene, result, out_dir, seed)
            result.as_success(f"{command} done")
        except InputError as ex:
            result.as_failure(f"Input error: {ex}", InputError.exit_code)
        except NumericError as ex:
            result.as_failure(f"Numeric failure: {ex}", NumericError.exit_code)
        except Exception as ex:
            result.as_failure_ex(f"Unexpected failure running {command}: {ex}", ex)

        if result.exit_code != 0:
            result.add_line(result.message)
        try:
            written = Paths.output_dir(out_dir)
            result.files.append(artifacts.write_report(written, str(command), result.lines, result.steps_log))
        except (OSError, InputError) as ex:
            logger.warning(f"Could not write the report to {out_dir}: {ex}")
        return result

    def _scene(self, command: str, config_path: Optional[str], tol: Optional[float],
               decades: Optional[int]) -> SceneConfig:
        if config_path is None and command == CommandType.VALIDATE.value:
            curve = UnitCircle(self.resolution or VALIDATION_RESOLUTION)
            return SceneConfig('<defaults>', curve, None, Weight(), None, None,
                               DEFAULT_TOLERANCE if tol is None else tol,
                               DEFAULT_DECADES if decades is None else decades, [], LabSettings())
        return SceneConfig.load(config_path, tol, decades, self.resolution)

    def _carleson(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        report = scene.curve.carleson_constant()
        estimate = carleson_estimate(scene.curve)
        result.add_line(f"Carleson constant: {report.value:.6f} at t={report.t:.6f}, R={report.radius:.6g}")
        result.add_line(f"refinement: {estimate}")
        if estimate.divergent:
            logger.warning(f"The Carleson ratio of {scene.curve} diverges under refinement")

    def _indices(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        curve = scene.curve
        rows = []
        for t in scene.focus_points():
            j = curve.index_of(t)
            psi = scene.weight.local(curve, j)
            result.add_step(f"Indices at t={t:.6f} of {psi}")
            for name, sample in (('W', W(curve, j, psi, scene.decades)),
                                 ('W0', W0(curve, j, psi, scene.decades)),
                                 ('V0', V0(curve, j, scene.weight, scene.decades))):
                pair = index_pair(sample, scene.tol)
                result.add_line(f"t={t:.6f} {name}: {pair}")
                rows += [[t, name, float(x), float(v)] for x, v in zip(sample.grid, sample.log_values)]
        result.files.append(artifacts.write_csv(out_dir, "indices.csv", ['t', 'function', 'x', 'log_rho'],
                                                rows, complex_columns=['t']))

    def _spirality(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        for t in scene.focus_points():
            spiral = spirality(scene.curve, t, scene.tol, scene.decades)
            result.add_line(f"{spiral}")
            for check in spiral.scaling:
                result.add_line(f"  {check}")

    def _bounded_m(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        scene.space.validate()
        report = decide_maximal_bounded(scene.space)
        self._boundedness_lines(report, result)

    def _bounded_s(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        scene.space.validate()
        report = decide_S_bounded(scene.space)
        self._boundedness_lines(report, result)
        for ersatz in report.ersatz:
            result.add_line(f"ersatz {ersatz}")
        if report.p0 is not None:
            result.add_line(f"{report.p0}")
        for necessity in report.necessity:
            result.add_line(f"necessity {necessity}")

    @staticmethod
    def _boundedness_lines(report, result: RunResult) -> None:
        result.add_line(f"{report}")
        result.add_line(f"Carleson: {report.carleson}")
        for margin in report.points:
            result.add_line(f"  {margin}")
        if report.verdict == Verdict.BORDERLINE:
            logger.warning(f"{report}")

    def _profile(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        space = scene.space
        rows = []
        for idx, t in enumerate(scene.focus_points()):
            profile = indicator_profile(space, t)
            result.add_line(f"{profile}")
            rows += [[t, float(x), float(a), float(b)]
                     for x, a, b in zip(profile.x_grid, profile.alpha_star, profile.beta_star)]
            result.files.append(artifacts.plot_profile(out_dir, f"profile_{idx}.svg", profile.x_grid,
                                                       profile.alpha_star, profile.beta_star,
                                                       f"indicator functions at t={t:.4f}"))
        result.files.append(artifacts.write_csv(out_dir, "profile.csv", ['t', 'x', 'alpha_star', 'beta_star'],
                                                rows, complex_columns=['t']))

    def _leaf(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        space = scene.space
        a, b = scene.symbols()
        c = a.divided(b)
        leaves = []
        for jump in c.jumps():
            drawn = leaf(jump.left, jump.right, space.p_at(jump.t), indicator_profile(space, jump.t))
            result.add_line(f"t={jump.t:.6f}: {drawn}")
            leaves.append(drawn)
        if not leaves:
            result.add_line(f"{c} has no jumps")
        self._write_leaves(out_dir, result, leaves, c.essential_range(), f"leaves of {c.label}")

    def _fredholm(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        space = scene.space
        space.validate()
        a, b = scene.symbols()
        report = decide_fredholm(a, b, space)
        result.add_line(f"{report.verdict.value}")
        result.add_line(f"reason: {report.reason}")
        result.add_line(f"S bounded: {report.s_report.verdict.value} ({report.s_report.reason})")
        result.add_line(f"inf |b| = {report.b_minimum:.6g}")
        if report.quotient_minimum is not None:
            result.add_line(f"min |a/b| = {report.quotient_minimum:.6g}")
        leaves = []
        if report.nonsingularity is not None:
            for criterion in report.nonsingularity.jumps:
                result.add_line(f"  {criterion}")
                if criterion.leaf is not None:
                    leaves.append(criterion.leaf)
        for local in report.locals:
            result.add_line(f"  local {local}")
        if report.verdict == FredholmVerdict.BORDERLINE:
            logger.warning(f"Fredholm verdict is borderline: {report.reason}")
        if report.quotient is not None:
            self._write_leaves(out_dir, result, leaves, report.quotient.essential_range(),
                               f"{report.verdict.value}: leaves of a/b")

    @staticmethod
    def _write_leaves(out_dir: str, result: RunResult, leaves, symbol_range, title: str) -> None:
        result.files.append(artifacts.write_csv(out_dir, "leaf.csv", ['jump', 'x', 'lower', 'upper'],
                                                artifacts.leaf_rows(leaves),
                                                complex_columns=['lower', 'upper']))
        result.files.append(artifacts.plot_leaves(out_dir, "leaf.svg", leaves, symbol_range, title))

    def _validate(self, scene: SceneConfig, result: RunResult, out_dir: str, seed: int) -> None:
        circle = scene.curve if scene.curve.kind == CurveKind.UNIT_CIRCLE else UnitCircle(VALIDATION_RESOLUTION)

        result.add_step("Finite-section agreement suite")
        suite = agreement_suite(circle, scene.lab.orders, scene.tol)
        rows = []
        for idx, case in enumerate(suite.cases):
            result.add_line(f"  {case}")
            if case.trend.verdict == TrendVerdict.INCONCLUSIVE:
                logger.warning(f"Inconclusive σ_min trend: {case}")
            for order, sigma in zip(case.trend.orders, case.trend.sigmas):
                rows.append([idx, case.jump[0], case.jump[1], case.p, case.weight_exponent, order, sigma,
                             case.trend.verdict.value, case.fredholm.value])
        result.files.append(artifacts.write_csv(
            out_dir, "sigma_trends.csv",
            ['case', 'left', 'right', 'p', 'lambda', 'N', 'sigma_min', 'trend', 'fredholm'],
            rows, complex_columns=['left', 'right']))
        result.add_line(f"{suite.agreements}/{suite.decisive} non-Borderline agreements")

        result.add_step(f"Circle criterion check on {scene.lab.jumps} random jumps, seed {seed}")
        check = circle_criterion_check(circle, scene.lab.jumps, seed, tol=scene.tol)
        result.add_line(f"{check}")

        result.add_step(f"Index algebra on {scene.lab.pairs} random factor pairs, seed {seed}")
        algebra = algebra_suite(scene.curve, 0, scene.lab.pairs, seed, decades=scene.decades)
        result.add_line(f"{algebra}")
