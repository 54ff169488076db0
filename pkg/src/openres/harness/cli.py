"""Command line: ``openres {spectrum,dynamics,laser,ensemble} --config run.json``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..errors import BelowThreshold, ConfigError, NumericalError, OpenResError
from .config import load_config
from .runs import run_dynamics, run_ensemble, run_laser, run_spectrum

EXIT_OK, EXIT_VALIDATION, EXIT_BELOW_THRESHOLD, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4, 5

log = logging.getLogger("openres")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openres", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "dynamics", "laser", "ensemble"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override ensemble.master_seed")
        p.add_argument("--out", help="override outputs.directory")
        p.add_argument("--realizations", type=int, help="override ensemble.n_realizations")
        p.add_argument("--workers", type=int, help="override ensemble.workers")
        p.add_argument("--quiet", action="store_true")
    return parser


def _fail(code: int, kind: str, message: str, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, seed=args.seed, out=args.out, realizations=args.realizations)
        if args.workers is not None:
            cfg.ensemble.workers = args.workers
        cfg.validate()
        if args.command == "spectrum":
            files = run_spectrum(cfg)
        elif args.command == "dynamics":
            files = run_dynamics(cfg)
        elif args.command == "laser":
            files = run_laser(cfg)
        else:
            summary, files = run_ensemble(cfg)
            log.info("ensemble: %d ok, errors %s", summary.aggregates["n_records"], summary.errors)
    except ConfigError as exc:
        return _fail(EXIT_VALIDATION, "validation", str(exc), violations=exc.violations)
    except BelowThreshold as exc:
        return _fail(EXIT_BELOW_THRESHOLD, "below_threshold", str(exc),
                     pump=exc.pump, threshold=exc.threshold)
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    except (OpenResError, ValueError) as exc:
        return _fail(EXIT_VALIDATION, type(exc).__name__, str(exc))
    for name, path in files.items():
        log.info("wrote %s: %s", name, path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
