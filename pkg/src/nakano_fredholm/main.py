#!/usr/bin/env python3

import logging
import sys

from nakano_fredholm.app.app import App
from nakano_fredholm.app.errors import InputError
from nakano_fredholm.app.run_arg import RunArg


def main() -> int:
    try:
        run_args = RunArg.of_sys_argv()
    except InputError as ex:
        print(f"Input error: {ex}", file=sys.stderr)
        return InputError.exit_code

    logging.basicConfig(
        level=logging.DEBUG if run_args.get(RunArg.VERBOSE) is True else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    command = RunArg.get(run_args, RunArg.COMMAND)
    out_dir = RunArg.get(run_args, RunArg.OUT)
    print(f"Running `{command}`, writing to `{out_dir}`")

    result = App().run(command,
                       config_path=RunArg.get(run_args, RunArg.CONFIG),
                       out_dir=out_dir,
                       tol=run_args.get(RunArg.TOL),
                       decades=run_args.get(RunArg.GRID_DECADES),
                       seed=RunArg.get(run_args, RunArg.SEED))

    for line in result.lines:
        print(line)
    for path in result.files:
        print(f"wrote {path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
