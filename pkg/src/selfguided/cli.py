"""Command-line entry point: ``selfguided run|sweep|presets``.

Exit codes: 0 success, 1 config error, 2 runtime error, 3 a preset's
embedded assertion failed.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    grid_sweep,
    load_config,
    preset_paths,
    run_experiment,
    write_sweep,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ASSERTION = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="selfguided", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="config file or preset name")
        sp.add_argument("--seed", type=int, help="override the base seed")
        sp.add_argument("--runs", type=int, help="override the number of runs")
        sp.add_argument("-j", "--jobs", type=int, default=1, help="worker processes (wall time only)")
        sp.add_argument("-o", "--output", type=Path, help="output directory (default results/<name>)")

    common(sub.add_parser("run", help="run an experiment"))
    common(sub.add_parser("sweep", help="run an alpha/beta grid sweep"))
    pre = sub.add_parser("presets", help="bundled experiment presets")
    pre.add_argument("action", choices=("list", "show"))
    pre.add_argument("name", nargs="?")
    return p


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    return dataclasses.replace(config, **overrides) if overrides else config


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "presets":
        presets = preset_paths()
        if args.action == "list":
            for name, path in presets.items():
                print(f"{name:24s} {ExperimentConfig.from_file(path).description}")
            return EXIT_OK
        if args.name not in presets:
            print(f"unknown preset {args.name!r}", file=sys.stderr)
            return EXIT_CONFIG
        print(presets[args.name].read_text(), end="")
        return EXIT_OK

    try:
        config = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = args.output or Path("results") / config.name

    try:
        if args.command == "run":
            summary = run_experiment(config, outdir, jobs=args.jobs)
            for tag, res in summary["results"].items():
                print(f"{tag:16s} final {res['final_mean']:.6g} ± {res['final_se']:.2g} (SE)"
                      f"  first k below {res['threshold']:g}: {res['threshold_k']}")
            if "max_abs_diff" in summary:
                print(f"max per-iteration |difference|: {summary['max_abs_diff']['max']:.3e}")
            failed = [a for a in summary["assertions"] if not a["passed"]]
        else:
            if not config.alphas or not config.betas:
                raise ConfigError("sweep config needs alphas and betas")
            sweep = grid_sweep(config.alphas, config.betas, config, jobs=args.jobs)
            write_sweep(config, sweep, outdir)
            for tag, best in sweep.best.items():
                print(f"best {tag:12s} alpha={best['alpha']:g} beta={best['beta']:g} final {best['final_mean']:.6g}")
            failed = []
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure during a run maps to one exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    print(f"results written to {outdir}")
    for a in failed:
        print(f"ASSERTION FAILED: {a['name']} (value {a['value']})", file=sys.stderr)
    return EXIT_ASSERTION if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
