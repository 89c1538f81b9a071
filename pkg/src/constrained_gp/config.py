"""Experiment configuration: a small, strictly validated TOML schema.

Unknown keys are rejected anywhere in the file.  ``to_toml`` emits a
canonical form whose re-parse reproduces the configuration exactly
(round-trip invariant).

Schema (version 1)::

    schema_version = 1

    [kernel]
    family = "squared_exponential"   # or "matern52"
    sigma = 25.0
    theta = 0.2

    [data]
    points = [0.1, 0.4, 0.6, 0.9]
    values = [-20.0, 15.0, 18.0, -10.0]

    [[constraints]]
    type = "bounds"                  # "bounds" | "monotone" | "convex" | "none"
    a = -25.0                        # bounds only; -inf / inf allowed
    b = 20.0

    [run]
    levels = [50]
    n_samples = 100
    seed = 42
    grid = 2001
    out = "results"
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import tomli

from .constraints import ConstraintSpec
from .errors import ConfigError
from .kernels import Kernel
from .rkhs import DesignData

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: Kernel
    data: DesignData
    constraints: tuple
    levels: tuple
    n_samples: int
    seed: int
    grid: int
    out: str


def _require_keys(table: dict, allowed: set, context: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{context}]")


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    _require_keys(raw, {"schema_version", "kernel", "data", "constraints", "run"}, "<root>")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")

    for section in ("kernel", "data", "run"):
        if section not in raw:
            raise ConfigError(f"missing [{section}] section")

    k = raw["kernel"]
    _require_keys(k, {"family", "sigma", "theta"}, "kernel")
    try:
        kernel = Kernel(k["family"], float(k["sigma"]), float(k["theta"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [kernel] section: {exc}") from exc

    d = raw["data"]
    _require_keys(d, {"points", "values"}, "data")
    try:
        data = DesignData(d["points"], d["values"])
    except Exception as exc:
        raise ConfigError(f"bad [data] section: {exc}") from exc

    specs = []
    for i, entry in enumerate(raw.get("constraints", [])):
        _require_keys(entry, {"type", "a", "b"}, f"constraints[{i}]")
        ctype = entry.get("type")
        if ctype == "bounds":
            specs.append(
                ConstraintSpec.bounds(entry.get("a", -math.inf), entry.get("b", math.inf))
            )
        elif ctype in ("monotone", "convex", "none"):
            if "a" in entry or "b" in entry:
                raise ConfigError(f"constraints[{i}]: a/b only valid for type 'bounds'")
            specs.append(ConstraintSpec(ctype))
        else:
            raise ConfigError(f"constraints[{i}]: unknown type {ctype!r}")
    if not specs:
        specs = [ConstraintSpec.none()]

    r = raw["run"]
    _require_keys(r, {"levels", "n_samples", "seed", "grid", "out"}, "run")
    try:
        levels = tuple(int(N) for N in r["levels"])
        n_samples = int(r.get("n_samples", 100))
        seed = int(r.get("seed", 0))
        grid = int(r.get("grid", 2001))
        out = str(r.get("out", "results"))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [run] section: {exc}") from exc
    if not levels or any(N < 1 for N in levels):
        raise ConfigError("run.levels must be a non-empty list of positive integers")
    if grid < 2:
        raise ConfigError("run.grid must be >= 2")
    if n_samples < 1:
        raise ConfigError("run.n_samples must be >= 1")

    return ExperimentConfig(
        kernel=kernel,
        data=data,
        constraints=tuple(specs),
        levels=levels,
        n_samples=n_samples,
        seed=seed,
        grid=grid,
        out=out,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def to_toml(cfg: ExperimentConfig) -> str:
    """Canonical TOML serialization; parse_config(to_toml(cfg)) == cfg."""
    lines = [f"schema_version = {SCHEMA_VERSION}", ""]
    lines += [
        "[kernel]",
        f'family = "{cfg.kernel.family}"',
        f"sigma = {_fmt_float(cfg.kernel.sigma)}",
        f"theta = {_fmt_float(cfg.kernel.theta)}",
        "",
        "[data]",
        "points = [" + ", ".join(_fmt_float(x) for x in cfg.data.points) + "]",
        "values = [" + ", ".join(_fmt_float(x) for x in cfg.data.values) + "]",
        "",
    ]
    for spec in cfg.constraints:
        lines.append("[[constraints]]")
        lines.append(f'type = "{spec.family}"')
        if spec.family == "bounds":
            lines.append(f"a = {_fmt_float(spec.lower)}")
            lines.append(f"b = {_fmt_float(spec.upper)}")
        lines.append("")
    lines += [
        "[run]",
        "levels = [" + ", ".join(str(N) for N in cfg.levels) + "]",
        f"n_samples = {cfg.n_samples}",
        f"seed = {cfg.seed}",
        f"grid = {cfg.grid}",
        f'out = "{cfg.out}"',
        "",
    ]
    return "\n".join(lines)
