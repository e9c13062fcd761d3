import sys

from enum import Enum, unique
from typing import Any, Optional

from .config import env_out_dir
from .errors import InputError
from .paths import Paths


@unique
class RunArg(str, Enum):
    def __new__(cls, value: str, alias: str = None, kind: str = 'str',
                optional: bool = False, path: bool = False, default_value: Any = None):
        obj = str.__new__(cls, [value])
        obj._value_ = value
        obj.__alias = alias
        obj.__type = kind
        obj.__optional = optional
        obj.__path = path
        obj.__default_value = default_value
        return obj

    @property
    def alias(self) -> str:
        return self.__alias

    @property
    def type(self) -> str:
        return self.__type

    @property
    def is_optional(self) -> bool:
        return self.__optional

    @property
    def is_path(self) -> bool:
        return self.__path

    @property
    def default_value(self) -> Any:
        return self.__default_value

    COMMAND = ('command', None, 'str')
    CONFIG = ('config', 'c', 'str', True, True)
    OUT = ('out', 'o', 'str', True, False, None)
    TOL = ('tol', 't', 'float', True, False, 1e-3)
    GRID_DECADES = ('grid-decades', 'g', 'int', True, False, 12)
    SEED = ('seed', 's', 'int', True, False, 0)
    VERBOSE = ('verbose', 'v', 'bool', True, False, False)

    @staticmethod
    def of(key: str) -> 'RunArg':
        for run_arg in RunArg:
            if run_arg.value == key or run_arg.alias == key:
                return run_arg
        raise InputError(f"No RunArg found for key: {key}")

    @staticmethod
    def of_sys_argv(target: dict['RunArg', Any] = None) -> dict['RunArg', Any]:
        return RunArg.of_list(target, sys.argv[1:])

    @staticmethod
    def of_list(target: dict['RunArg', Any] = None, source: Optional[list[str]] = None) -> dict['RunArg', Any]:
        """Flags as --name value or -alias value. A bare word not taken as a value is the command."""
        if source is None:
            source = sys.argv[1:]

        if target is None:
            target = {}

        consumed = set()
        for idx, arg in enumerate(source):
            if idx in consumed:
                continue
            if arg.startswith('--'):
                key = arg[2:]
            elif arg.startswith('-') and len(arg) > 1 and not arg[1].isdigit():
                key = arg[1:]
            else:
                if RunArg.COMMAND not in target:
                    target[RunArg.COMMAND] = arg
                continue

            run_arg = RunArg.of(key)
            next_idx = idx + 1
            has_value = next_idx < len(source) and not (
                source[next_idx].startswith('-') and not RunArg._is_number(source[next_idx]))

            if run_arg.type == 'bool' and (not has_value or source[next_idx] not in ('true', 'false')):
                target[run_arg] = True
                continue

            if not has_value:
                raise InputError(f"Run option: '{run_arg.value}' expects a value")

            consumed.add(next_idx)
            target[run_arg] = RunArg._parse(run_arg, source[next_idx])

        return target

    @staticmethod
    def value_of(key: str, value: Any) -> Any:
        return RunArg._parse(RunArg.of(key), value)

    @staticmethod
    def get(run_args: dict['RunArg', Any], run_arg: 'RunArg') -> Any:
        value = run_args.get(run_arg)
        if value is not None:
            return value
        if run_arg == RunArg.OUT:
            return env_out_dir()
        return run_arg.default_value

    @staticmethod
    def _is_number(value: str) -> bool:
        try:
            float(value)
            return True
        except ValueError:
            return False

    @staticmethod
    def _parse(run_arg: 'RunArg', value: str) -> Any:
        if value is None or value == '':
            return run_arg.default_value
        try:
            if run_arg.type == "bool":
                value = value is True or str(value).lower() == "true"
            elif run_arg.type == "int":
                value = int(value)
            elif run_arg.type == "float":
                value = float(value)
        except ValueError:
            raise InputError(f"Run option: '{run_arg.value}' expects a value of type {run_arg.type}, "
                             f"found: {value}")
        if run_arg.is_path:
            value = Paths.get_path(value) if run_arg.is_optional else (
                Paths.require_path(value, f"Run option: '{run_arg.value}' is required."))
        return value
