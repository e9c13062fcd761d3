"""
A Python app for deciding boundedness of the Cauchy singular integral operator and
Fredholmness of aP+bQ on weighted Nakano spaces over Carleson curves
"""
from .app.app import App, RunResult
from .app.config import CommandType, ConfigFactory, CurveKind, FredholmVerdict, TrendVerdict, Verdict
from .app.curve import CurveModel, LogSpiralAttached, PolylineSampled, SmoothJordan, UnitCircle
from .app.errors import InputError, NotInSpaceError, NumericError, ResolutionError
from .app.fredholm import (Jump, PCSymbol, SpaceSpec, decide_fredholm, decide_maximal_bounded,
                           decide_S_bounded, indicator_profile, leaf)
from .app.indices import V, V0, W, W0, index_pair, spirality
from .app.scene import SceneConfig
from .app.spaces import EtaPower, ExponentField, PhiGamma, Power, RadialOscillating, Weight, nakano_norm

__all__ = ["App", "RunResult", "CommandType", "ConfigFactory", "CurveKind", "FredholmVerdict",
           "TrendVerdict", "Verdict", "CurveModel", "LogSpiralAttached", "PolylineSampled",
           "SmoothJordan", "UnitCircle", "InputError", "NotInSpaceError", "NumericError",
           "ResolutionError", "Jump", "PCSymbol", "SpaceSpec", "decide_fredholm",
           "decide_maximal_bounded", "decide_S_bounded", "indicator_profile", "leaf", "V", "V0", "W", "W0",
           "index_pair", "spirality", "SceneConfig", "EtaPower", "ExponentField", "PhiGamma", "Power",
           "RadialOscillating", "Weight", "nakano_norm"]
