"""Command-line entry point: ``cavitywalk {run,snapshot,compare,verify-bounds,configs}``.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import simulation
from .config import bundled_configs, load_config
from .errors import ConfigError, NumericalInvariantError
from .witnesses import w_separable_bound, verify_bound_numerically

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("cavitywalk")


def _run_one(ref: str, out_dir: str) -> list[str]:
    config = load_config(ref)
    return [str(p) for p in simulation.run(config, out_dir)]


def cmd_run(args) -> int:
    out = Path(args.out)
    if len(args.config) > 1 and not args.sweep:
        raise ConfigError("several configs given; pass --sweep to run them all")
    if not args.sweep:
        for path in _run_one(args.config[0], str(out)):
            print(path)
        return EXIT_OK
    # validate everything up front so a bad config fails before any work starts
    configs = [load_config(ref) for ref in args.config]
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError(f"sweep configs must have distinct names, got {names}")
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        futures = [pool.submit(_run_one, ref, str(out / cfg.name))
                   for ref, cfg in zip(args.config, configs)]
        for fut in futures:
            for path in fut.result():
                print(path)
    return EXIT_OK


def cmd_snapshot(args) -> int:
    config = load_config(args.config)
    print(simulation.snapshot(config, args.step, args.out))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = load_config(args.config)
    print(simulation.compare_walks(config, args.out))
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    try:
        bound = w_separable_bound(args.parties)
        best = verify_bound_numerically(args.parties, args.trials, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"parties={args.parties} closed_form={bound!r} numerical={best!r} "
          f"gap={bound - best!r}")
    if best > bound + 1e-6:
        raise NumericalInvariantError(f"product state exceeded the separable bound by {best - bound!r}")
    return EXIT_OK


def cmd_configs(args) -> int:
    for name in bundled_configs():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cavitywalk",
                                 description="Quantum walks and entanglement in lossy cavity networks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a config and write the requested CSV outputs")
    p.add_argument("config", nargs="+", help="config file or bundled config name")
    p.add_argument("--out", required=True)
    p.add_argument("--sweep", action="store_true", help="run several configs in a worker pool")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("snapshot", help="write the cavity/atom grids at one step")
    p.add_argument("config")
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("compare", help="total-variation distance between quantum and classical walks")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify-bounds", help="numerically maximise the W overlap over product states")
    p.add_argument("--parties", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("configs", help="list bundled reproduction configs")
    p.set_defaults(func=cmd_configs)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
