"""Command-line interface.

    sdelab simulate <config.json> [--out DIR]
    sdelab reproduce <target> [--scale S] [--seed N] [--workers K] [--out DIR]

Exit codes: 0 ok, 2 config error, 3 numerical error, 4 I/O error.
Errors are emitted to stderr as one JSON object {code, module, message}.
The SDELAB_WORKERS environment variable overrides the worker count.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import parse_config
from .errors import (
    ConfigError,
    DegenerateNormalizationError,
    QuadratureConvergenceError,
    SdeLabError,
    TrajectoryOverflowError,
)
from .presets import preset_targets
from .runner import reproduce, run

_NUMERICAL = (QuadratureConvergenceError, TrajectoryOverflowError,
              DegenerateNormalizationError)


def _error_exit(exc: Exception, module: str) -> int:
    if isinstance(exc, ConfigError):
        code = 2
    elif isinstance(exc, _NUMERICAL):
        code = 3
    elif isinstance(exc, OSError):
        code = 4
    elif isinstance(exc, SdeLabError):
        code = 3
    else:
        raise exc
    payload = {"code": getattr(exc, "code", type(exc).__name__),
               "module": module, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _workers_override(value):
    env = os.environ.get("SDELAB_WORKERS")
    if env is not None:
        return int(env)
    return value


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sdelab",
        description="Simulate threshold-restricted diffusions and compare "
                    "them against their closed-form densities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one experiment config")
    p_sim.add_argument("config", help="path to a JSON experiment config")
    p_sim.add_argument("--out", default=None, help="output directory override")

    p_rep = sub.add_parser("reproduce",
                           help="rerun a built-in preset and compare against "
                                "the published numbers")
    p_rep.add_argument("target", help=f"one of: {', '.join(preset_targets())}")
    p_rep.add_argument("--scale", type=float, default=1.0,
                       help="trajectory-count scale factor in (0, 1]")
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--workers", type=int, default=None)
    p_rep.add_argument("--out", default=None, help="output directory")

    args = parser.parse_args(argv)

    if args.command == "simulate":
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            return _error_exit(exc, "cli")
        try:
            cfg = parse_config(text)
        except ConfigError as exc:
            return _error_exit(exc, "config")
        try:
            manifest = run(cfg, out_dir=args.out)
        except Exception as exc:  # noqa: BLE001 - mapped to exit codes
            return _error_exit(exc, "runner")
        print(json.dumps({"config_hash": manifest.config_hash,
                          "outputs": len(manifest.outputs)}))
        return 0

    try:
        manifest = reproduce(args.target, scale=args.scale, seed=args.seed,
                             workers=_workers_override(args.workers),
                             out_dir=args.out)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        return _error_exit(exc, "runner")
    print(json.dumps({"config_hash": manifest.config_hash,
                      "outputs": len(manifest.outputs)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
