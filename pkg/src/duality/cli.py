"""Command-line entry point.

Exit codes: 0 ok, 1 config error, 2 state-validation error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigError, InvariantViolation, StateValidationError
from .experiments import format_rows, load_config, run_experiment, validate_config

COMMANDS = {
    "hom": "hom",
    "bose-hubbard": "bose_hubbard",
    "random-sweep": "random_sweep",
    "measures": "measures",
}

EXIT_OK, EXIT_CONFIG, EXIT_STATE, EXIT_INVARIANT = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="duality", description="Wave-particle duality measures for many particles.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON or YAML experiment config (defaults apply when omitted)")
    parser.add_argument("--state", help="state file for the measures command (overrides the config)")
    parser.add_argument("--out", help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    parser.add_argument("--seed", type=int, help="random seed, unsigned 64-bit")
    parser.add_argument("--threads", type=int, help="worker threads for grid points")
    return parser


def _effective_config(args) -> dict:
    config = load_config(args.config) if args.config else {}
    experiment = COMMANDS[args.command]
    if config.setdefault("experiment", experiment) != experiment:
        raise ConfigError(f"config is for experiment {config['experiment']!r}, command is {args.command!r}")
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"seed {args.seed} is not an unsigned 64-bit integer")
        config["seed"] = args.seed
    if args.state:
        config.setdefault("parameters", {})["state_file"] = args.state
    if args.threads is not None:
        config["threads"] = args.threads
    output = config.setdefault("output", {})
    if args.out:
        output["path"] = args.out
    if args.format:
        output["format"] = args.format
    return validate_config(config)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = _effective_config(args)
        output = config.pop("output", {})
        threads = config.pop("threads", 1)
        if threads < 1:
            raise ConfigError("threads must be at least 1")
        rows, meta = run_experiment(config, threads)
        text = format_rows(rows, meta, output.get("format", "csv"))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StateValidationError as exc:
        print(f"state validation error: {exc}", file=sys.stderr)
        return EXIT_STATE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if output.get("path"):
        Path(output["path"]).write_text(text, encoding="utf-8")
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # downstream reader closed early (e.g. piped into head); not an error
            sys.stdout = open(os.devnull, "w")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
