"""Command-line experiment runner.

Subcommands:
    run <config>                 execute an experiment (path or preset name)
    resume <checkpoint> <config> continue a checkpointed quantum run
    validate <config>            parse and validate, report problems
    list-presets                 show the bundled experiment configs

Output directory: --out, else the RATCHETSIM_OUT environment variable,
else the current directory. Exit codes: 0 success, 1 validation error,
2 numerical-quality failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .experiments import resume_experiment, run_experiment
from .params import ValidationError
from .presets import preset_path, preset_names
from .quantum import NumericalQualityError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _resolve_config(name_or_path: str) -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    preset = preset_path(name_or_path)
    if preset is not None:
        return preset
    raise FileNotFoundError(f"no config file or preset named {name_or_path!r}")


def _out_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get("RATCHETSIM_OUT")
    return Path(env) if env else Path(".")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ratchetsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="config file path or preset name")
    p_run.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="output directory")

    p_res = sub.add_parser("resume", help="continue a checkpointed quantum run")
    p_res.add_argument("checkpoint")
    p_res.add_argument("config")
    p_res.add_argument("--out", default=None)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")

    sub.add_parser("list-presets", help="list bundled experiment configs")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-presets":
            for name in preset_names():
                print(name)
            return EXIT_OK

        cfg_path = _resolve_config(args.config)
        cfg = parse_config(cfg_path)

        if args.command == "validate":
            print(f"{cfg_path}: valid ({cfg.engine} {cfg.kind}, prefix {cfg.output_prefix})")
            return EXIT_OK
        if args.command == "run":
            artifacts = run_experiment(cfg, _out_dir(args), workers=args.workers,
                                       seed_override=args.seed)
            for a in artifacts:
                print(a)
            return EXIT_OK
        if args.command == "resume":
            artifacts = resume_experiment(args.checkpoint, cfg, _out_dir(args))
            for a in artifacts:
                print(a)
            return EXIT_OK
        raise AssertionError("unreachable")
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalQualityError as exc:
        print(f"numerical-quality failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
