"""Command-line entry point.

Subcommands::

    constrained-gp map        --config cfg.toml [--levels 25,50] [--grid 2001] [--out DIR]
    constrained-gp sample     --config cfg.toml [--n 100] [--seed 42] [--grid 2001] [--out DIR]
    constrained-gp figure     --config cfg.toml [--out DIR]
    constrained-gp check      [--seed 7]
    constrained-gp normladder --config cfg.toml [--levels 4,8,16,32] [--out DIR]

Bundled figure configurations (fig1, fig2, fig3) can be used with
``--config bundled:fig1``.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from importlib import resources

from .config import ExperimentConfig, load_config, parse_config
from .experiments import (
    run_figure_experiment,
    run_map,
    run_norm_ladder,
    run_property_suite,
    run_sample,
)


def bundled_config(name: str) -> ExperimentConfig:
    """Load one of the packaged figure configs (fig1, fig2, fig3)."""
    text = resources.files("constrained_gp.configs").joinpath(f"{name}.toml").read_text()
    return parse_config(text)


def _load(path: str) -> ExperimentConfig:
    if path.startswith("bundled:"):
        return bundled_config(path.split(":", 1)[1])
    return load_config(path)


def _parse_levels(text):
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if getattr(args, "levels", None):
        updates["levels"] = _parse_levels(args.levels)
    if getattr(args, "grid", None):
        updates["grid"] = args.grid
    if getattr(args, "n", None):
        updates["n_samples"] = args.n
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    return dataclasses.replace(cfg, **updates) if updates else cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="constrained-gp",
        description="Constrained Gaussian-process interpolation: MAP curves, "
        "posterior sampling and convergence diagnostics.",
    )
    parser.add_argument("--verbose", action="store_true", help="chatty progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="TOML config path or bundled:NAME")
        p.add_argument("--out", default=None, help="output directory")

    p_map = sub.add_parser("map", help="solve the MAP ladder, write curves and convergence")
    add_common(p_map)
    p_map.add_argument("--levels", help="comma-separated N values, e.g. 25,50,100,200")
    p_map.add_argument("--grid", type=int, help="evaluation grid size")

    p_sample = sub.add_parser("sample", help="sample the constrained posterior")
    add_common(p_sample)
    p_sample.add_argument("--n", type=int, help="number of draws")
    p_sample.add_argument("--seed", type=int, help="RNG seed")
    p_sample.add_argument("--grid", type=int, help="evaluation grid size")

    p_fig = sub.add_parser("figure", help="full figure bundle with manifest")
    add_common(p_fig)
    p_fig.add_argument("--seed", type=int, help="RNG seed override")

    p_check = sub.add_parser("check", help="run the property suite")
    p_check.add_argument("--seed", type=int, default=0)

    p_norm = sub.add_parser("normladder", help="norm sequence of the kriging mean")
    add_common(p_norm)
    p_norm.add_argument("--levels", help="comma-separated N values")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        results = run_property_suite(seed=args.seed)
        failed = 0
        for name, ok, detail in results:
            line = f"[{'PASS' if ok else 'FAIL'}] {name} (seed={args.seed})"
            if detail:
                line += f": {detail}"
            print(line)
            failed += not ok
        print(f"{len(results) - failed}/{len(results)} properties passed")
        return 1 if failed else 0

    cfg = _apply_overrides(_load(args.config), args)
    out = args.out or cfg.out
    if args.command == "map":
        files = run_map(cfg, out)
    elif args.command == "sample":
        files = run_sample(cfg, out)
    elif args.command == "normladder":
        files = run_norm_ladder(cfg, out)
    else:
        run_figure_experiment(cfg, out)
        files = {"manifest.json": 1}
    if args.verbose:
        for name in sorted(files):
            print(f"wrote {out}/{name}")
    print(f"done: {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
