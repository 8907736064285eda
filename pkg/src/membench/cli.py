"""Command-line entry points: serve the bench, run experiments, dump params.

``membench run`` is the offline twin of the protocol's ``RUN`` verb: both
spin a fresh simulator from (config, seed), so they produce byte-identical
result tables.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import BenchError
from .experiments import EXPERIMENTS, coerce_knob, write_run
from .params import default_config, dump_config, load_config
from . import server as _server


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="membench",
        description="Behavioral simulator and virtual test bench for a "
        "memristor-CMOS prototyping die.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve the line protocol over TCP or stdio")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--port",
        type=int,
        default=None,
        help="TCP port (0 lets the OS pick; default MEMBENCH_PORT or 7520)",
    )
    serve.add_argument("--stdio", action="store_true", help="serve stdin/stdout instead of TCP")
    serve.add_argument("--config", help="configuration file")
    serve.add_argument("--seed", type=int, default=None, help="initial die seed")
    serve.add_argument(
        "--max-connections", type=int, default=None, help=argparse.SUPPRESS
    )

    run = sub.add_parser("run", help="run a canned experiment and write results")
    run.add_argument("experiment", choices=sorted(EXPERIMENTS))
    run.add_argument("--config", help="configuration file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="runs", help="output root (default: ./runs)")
    run.add_argument(
        "overrides",
        nargs="*",
        metavar="key=value",
        help="experiment knobs (e.g. n_pulses=500) or config keys "
        "(e.g. device.read_noise_sigma=0)",
    )

    params = sub.add_parser("params", help="inspect configuration")
    params.add_argument("action", choices=["dump"])
    params.add_argument("--config", help="configuration file")

    return parser


def _load(config_path: str | None):
    if config_path:
        return load_config(config_path)
    return default_config()


def _split_overrides(pairs, config):
    """key=value words: dotted keys override config, bare keys are knobs."""
    from .params import apply_overrides

    knobs = {}
    config_overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise BenchError(f"expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        if "." in key:
            config_overrides[key] = coerce_knob(value)
        else:
            knobs[key] = coerce_knob(value)
    if config_overrides:
        config = apply_overrides(config, config_overrides)
    return config, knobs


def main(argv=None) -> int:
    parser = _build_parser()
    # parse_known_args so key=value overrides may appear after --seed/--out;
    # argparse alone cannot interleave optionals with a nargs="*" positional.
    args, extra = parser.parse_known_args(argv)
    if extra and (args.command != "run" or any(e.startswith("-") for e in extra)):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.command == "run":
        args.overrides = list(args.overrides) + extra
    try:
        if args.command == "serve":
            config = _load(args.config)
            if args.stdio:
                _server.serve_stdio(config, args.seed)
            else:
                port = args.port
                if port is None:
                    port = int(os.environ.get("MEMBENCH_PORT", "7520"))
                _server.serve_tcp(
                    args.host, port, config, args.seed, max_connections=args.max_connections
                )
            return 0
        if args.command == "run":
            config, knobs = _split_overrides(args.overrides, _load(args.config))
            run_dir = write_run(args.experiment, config, args.seed, args.out, knobs)
            print(run_dir)
            return 0
        if args.command == "params":
            sys.stdout.write(dump_config(_load(args.config)))
            return 0
    except BenchError as exc:
        print(f"membench: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"membench: io error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
