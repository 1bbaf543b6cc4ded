"""Command-line entry point: ``metarep run`` and ``metarep summarize``."""

import argparse
import logging
import sys
from pathlib import Path

from metarep import __version__
from metarep.errors import ConfigError
from metarep.experiments.config import parse_config
from metarep.experiments.results import read_trials, summary_csv, write_results
from metarep.experiments.runner import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

log = logging.getLogger("metarep")


def _parser():
    p = argparse.ArgumentParser(prog="metarep", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and write trials.csv and summary.csv")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", type=Path, default=None, help="output directory (overrides out_dir)")
    run.add_argument("--timing", action="store_true",
                     help="record wall_millis (makes trials.csv run-dependent)")

    summ = sub.add_parser("summarize", help="recompute the summary table from a trials.csv")
    summ.add_argument("--trials", required=True, type=Path)
    return p


def _run(args):
    cfg = parse_config(args.config)
    if args.workers < 1:
        raise ConfigError("must be >= 1", "--workers")
    out_dir = args.out if args.out is not None else Path(cfg.out_dir)
    log.info("running %d sweep points x %d reps with %d worker(s)",
             len(cfg.sweep_values), cfg.reps, args.workers)
    trials, _ = run_experiment(cfg, workers=args.workers, timing=args.timing)
    trials_path, summary_path = write_results(trials, out_dir)
    (out_dir / "config.resolved").write_text(cfg.to_text(), encoding="utf-8")
    failed = sum(t.failed for t in trials)
    if failed:
        log.warning("%d of %d trials failed", failed, len(trials))
    print(f"wrote {trials_path} and {summary_path}")


def _summarize(args):
    sys.stdout.write(summary_csv(read_trials(args.trials)))


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            _run(args)
        else:
            _summarize(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK
