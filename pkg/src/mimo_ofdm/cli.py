"""Command line front end: `sim run` and `sim required-ebn0`.

Exit codes: 0 on success, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness
from .config import ConfigError, parse, parse_override, render, validate

SEED_ENV = "MIMO_SIM_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="MIMO-OFDM CFO/SFO sensitivity Monte Carlo simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a BER sweep and write a CSV")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--preset", choices=("desk", "paper"),
                     help="start from a built-in config")
    run.add_argument("--set", action="append", default=[], metavar="K=V",
                     help="override a config field (repeatable)")
    run.add_argument("--schemes", help="comma-separated scheme sweep")
    run.add_argument("--sweep-cfo", help="comma-separated cfo_rel values")
    run.add_argument("--sweep-sfo", help="comma-separated sfo_rel values")
    run.add_argument("--stop-below-ber", type=float, default=None,
                     help="skip a curve's higher Eb/N0 points once below this")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--no-resume", action="store_true",
                     help="recompute everything, ignore existing rows")
    run.add_argument("--out", required=True, help="output CSV path")

    req = sub.add_parser("required-ebn0",
                         help="interpolate required Eb/N0 at a target BER")
    req.add_argument("--in", dest="in_path", required=True,
                     help="BER CSV from `sim run`")
    req.add_argument("--target", type=float, required=True)
    req.add_argument("--out", required=True, help="output CSV path")
    return parser


def _load_config(args) -> "harness.SystemConfig":
    overrides = dict(parse_override(item) for item in args.set)
    if SEED_ENV in os.environ:
        overrides["seed"] = int(os.environ[SEED_ENV])
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    elif args.preset:
        text = render(harness.preset_config(args.preset))
    else:
        raise ConfigError("run: provide --config and/or --preset")
    if args.config and args.preset:
        # preset supplies defaults, the file and --set override them
        base = harness.preset_config(args.preset)
        import json
        merged = json.loads(render(base))
        merged.update(json.loads(text))
        text = json.dumps(merged)
    return parse(text, overrides)


def _floats(text: str | None):
    if not text:
        return None
    return [float(v) for v in text.split(",") if v.strip()]


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _load_config(args)
            schemes = ([s.strip() for s in args.schemes.split(",") if s.strip()]
                       if args.schemes else None)
            cfo = _floats(args.sweep_cfo)
            sfo = _floats(args.sweep_sfo)
            offsets = None
            if cfo or sfo:
                offsets = ([(v, config.sfo_rel) for v in (cfo or [])]
                           + [(config.cfo_rel, v) for v in (sfo or [])])
            records, computed = harness.run_sweep(
                config, args.out, schemes=schemes, offsets=offsets,
                workers=args.workers, resume=not args.no_resume,
                stop_below_ber=args.stop_below_ber)
            print(f"{len(records)} records ({computed} points computed) "
                  f"-> {args.out}")
        else:
            records = harness.read_ber_csv(args.in_path)
            table = harness.required_ebn0_table(records, args.target)
            harness.write_required_csv(args.out, table)
            for rec in table:
                value = ("FLOOR" if rec.floor
                         else f"{rec.required_ebn0_db:.2f} dB")
                print(f"{rec.scheme:12s} {rec.axis}={rec.offset:<8g} "
                      f"BER {rec.target_ber:g}: {value}")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except harness.SchemaMismatch as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
