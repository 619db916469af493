"""Command line entry point.

    popstack <experiment> --n INT --trials INT --seed INT [--a R --b R --c R --eps R]
             --format csv|json --out DIR --workers INT|auto [--config FILE]

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiments import (
    EXPERIMENTS, ConfigError, ExperimentConfig, coerce_config_values, load_config_file,
    run_experiment, write_bundle,
)

log = logging.getLogger("popstack")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="popstack", description="Pop-Stack Sorting experiments")
    ap.add_argument("experiment", nargs="?", choices=EXPERIMENTS,
                    help="experiment name (may also come from --config)")
    ap.add_argument("--config", type=Path, help="flat key=value file; flags override it")
    ap.add_argument("--n", help="permutation length, or a comma-separated sweep")
    ap.add_argument("--trials", help="trials per n")
    ap.add_argument("--seed", dest="master_seed", help="64-bit master seed")
    ap.add_argument("--a")
    ap.add_argument("--b")
    ap.add_argument("--c")
    ap.add_argument("--eps", help="epsilon, or a comma-separated sweep for lemma-Y")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--out", dest="output_dir", help="output directory")
    ap.add_argument("--workers", help="worker processes, or 'auto'")
    ap.add_argument("--monitor", action="store_const", const="1",
                    help="write per-step colouring monitors (lemma-reds)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config is not None:
        try:
            raw.update(load_config_file(args.config))
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from None
    flags = {k: getattr(args, k) for k in
             ("n", "trials", "master_seed", "a", "b", "c", "eps", "format", "output_dir", "workers", "monitor")}
    raw.update({k: v for k, v in flags.items() if v is not None})
    if args.experiment is not None:
        raw["experiment"] = args.experiment
    values = coerce_config_values(raw)
    if "experiment" not in values:
        raise ConfigError("no experiment given")
    if "n" not in values:
        raise ConfigError("no n given")
    try:
        return ExperimentConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        out_dir = cfg.output_dir or Path("results") / cfg.experiment
        log.info("running %s n=%s trials=%d seed=%d", cfg.experiment, cfg.n, cfg.trials, cfg.master_seed)
        bundle = run_experiment(cfg)
        files = write_bundle(bundle, out_dir)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    for c in bundle.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    print(f"wrote {len(files)} files to {out_dir}")
    if not bundle.passed:
        for r in bundle.records:
            ce = r.extra.get("counterexample") or r.extra.get("first_violation")
            if ce:
                print(f"counterexample n={r.n} trial={r.trial_index}: {ce}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
