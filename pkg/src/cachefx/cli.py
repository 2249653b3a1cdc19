"""Batch experiment runner.

``cachefx <experiment> --config file.json [overrides]`` sweeps a grid of
cache configurations, repeats each cell with fresh seed-derived RNG streams
and randomized region base addresses, and writes one CSV row per
measurement plus min/max/median/mean aggregate rows.  The CSV schema is
fixed: ``experiment,design,lines,ways,policy,params,metric,value,seed,
repetition``; aggregate rows carry repetition -1.

Repetitions run on a process pool; every worker owns its cache instance and
a child RNG stream, and rows are merged in repetition order so a fixed seed
reproduces the output file byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import attack as attack_mod
from . import evset as evset_mod
from . import ree as ree_mod
from . import victims as V
from .cache import DESIGNS, POLICIES, make_cache

EXPERIMENTS = ("ree", "evset", "attack", "sweep")
CSV_HEADER = ["experiment", "design", "lines", "ways", "policy", "params",
              "metric", "value", "seed", "repetition"]
AGGREGATES = ("min", "max", "median", "mean")
REGION_SPACE = 1 << 32            # line-granular region base space
AGGREGATE_REP = -1


class ConfigError(ValueError):
    """Invalid experiment configuration; names the offending field."""


@dataclass
class ExperimentConfig:
    experiment: str
    designs: list[str]
    lines: int = 2048
    ways: int = 16
    policy: str = "random"
    repetitions: int = 1
    seed: int = 0
    out: str = "results.csv"
    workers: int = 0              # 0 = one per CPU, capped at repetitions
    params: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: unknown value {self.experiment!r}")
        for d in self.designs:
            if d not in DESIGNS:
                raise ConfigError(f"design: unknown value {d!r}")
        if not self.designs:
            raise ConfigError("design: at least one required")
        if self.policy not in POLICIES:
            raise ConfigError(f"policy: unknown value {self.policy!r}")
        if self.lines < 1 or self.ways < 1 or self.lines % self.ways:
            raise ConfigError("lines: must be a positive multiple of ways")
        if self.lines & (self.lines - 1):
            raise ConfigError("lines: must be a power of two")
        if self.repetitions < 1:
            raise ConfigError("repetitions: must be >= 1")
        if not isinstance(self.params, dict):
            raise ConfigError("params: must be an object")


def _rep_seed(base: int, rep: int) -> int:
    """Replayable per-repetition seed, recorded in every row."""
    return int(np.random.SeedSequence(base, spawn_key=(rep,))
               .generate_state(1)[0])


def _region_bases(rng: np.random.Generator, n: int,
                  spacing: int = 1 << 26) -> list[int]:
    """n non-overlapping region base lines from the 2^32-line space."""
    slots = rng.choice(REGION_SPACE // spacing, size=n, replace=False)
    return [int(s) * spacing for s in slots]


def _params_str(extra: dict[str, Any]) -> str:
    return ";".join(f"{k}={extra[k]}" for k in sorted(extra))


# ---------------------------------------------------------------------------
# per-repetition measurement bodies; each returns {metric: value}

def _run_ree(cfg: ExperimentConfig, design: str, rep: int) -> dict[str, float]:
    seed = _rep_seed(cfg.seed, rep)
    rng = np.random.default_rng(seed)
    (chunk_base,) = _region_bases(rng, 1)
    cache = make_cache(design, cfg.lines, cfg.ways, cfg.policy, seed=seed,
                       **_design_kwargs(cfg, design))
    rounds = int(cfg.params.get("rounds", 100_000))
    prepin = design == "plcache"
    res = ree_mod.eviction_histogram(cache, rounds, prepin=prepin,
                                     chunk_base=max(chunk_base, 8))
    return {"ree": res.ree, "samples": float(res.samples)}


def _run_evset(cfg: ExperimentConfig, design: str, rep: int) -> dict[str, float]:
    seed = _rep_seed(cfg.seed, rep)
    rng = np.random.default_rng(seed)
    victim_base, attacker_base = _region_bases(rng, 2)
    cache = make_cache(design, cfg.lines, cfg.ways, cfg.policy, seed=seed,
                       **_design_kwargs(cfg, design))
    builder = cfg.params.get("builder", "ppp")
    builders = {"shm": evset_mod.build_shm, "gem": evset_mod.build_gem,
                "ppp": evset_mod.build_ppp}
    if builder not in builders:
        raise ConfigError(f"builder: unknown value {builder!r}")
    report = builders[builder](cache, victim_base + 7, rng,
                               attacker_base=attacker_base)
    return {"accesses": float(report.memory_accesses),
            "setSize": float(len(report.addresses)),
            "trueConflictRate": report.true_conflict_rate,
            "successRate": report.success_rate}


def _run_attack(cfg: ExperimentConfig, design: str, rep: int) -> dict[str, float]:
    seed = _rep_seed(cfg.seed, rep)
    rng = np.random.default_rng(seed)
    cache = make_cache(design, cfg.lines, cfg.ways, cfg.policy, seed=seed,
                       **_design_kwargs(cfg, design))
    kind = cfg.params.get("attack", "evset")
    victim = cfg.params.get("victim", "aes")
    if kind not in ("evset", "occupancy"):
        raise ConfigError(f"attack: unknown value {kind!r}")
    if victim not in ("aes", "modexp"):
        raise ConfigError(f"victim: unknown value {victim!r}")
    if kind == "evset":
        result = attack_mod.eviction_set_attack(cache, victim, rng)
    else:
        result = attack_mod.occupancy_attack(cache, victim, rng)
    return {"encryptions": float(result.encryptions),
            "capped": 1.0 if result.stopped == "capReached" else 0.0}


def _run_sweep(cfg: ExperimentConfig, design: str, rep: int) -> dict[str, float]:
    seed = _rep_seed(cfg.seed, rep)
    rng = np.random.default_rng(seed)
    cache = make_cache(design, cfg.lines, cfg.ways, cfg.policy, seed=seed,
                       **_design_kwargs(cfg, design))
    victim = cfg.params.get("victim", "aes")
    size = int(cfg.params.get("size", cfg.ways))
    if size < 1:
        raise ConfigError("size: must be >= 1")
    monitored = attack_mod.VICTIM_REGION_BASE + V.monitored_line(victim)
    supply = evset_mod.oracle_collider_supply(
        cache, monitored, rng, size,
        attacker_base=attack_mod.EVSET_SUPPLY_BASE)
    result = attack_mod.eviction_set_attack(cache, victim, rng,
                                            evset=supply[:size])
    return {"encryptions": float(result.encryptions),
            "capped": 1.0 if result.stopped == "capReached" else 0.0}


_BODIES = {"ree": _run_ree, "evset": _run_evset, "attack": _run_attack,
           "sweep": _run_sweep}


def _design_kwargs(cfg: ExperimentConfig, design: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if design in ("ceaser-s", "scatter") and "partitions" in cfg.params:
        out["partitions"] = int(cfg.params["partitions"])
    if design == "phantom" and "phantom_r" in cfg.params:
        out["phantom_r"] = int(cfg.params["phantom_r"])
    return out


def _cell_params(cfg: ExperimentConfig) -> str:
    shown = {k: v for k, v in sorted(cfg.params.items())}
    return _params_str(shown)


def _one_cell(args: tuple) -> tuple[int, dict[str, float]]:
    cfg, design, rep = args
    return rep, _BODIES[cfg.experiment](cfg, design, rep)


def run_experiment(cfg: ExperimentConfig) -> list[list]:
    """Execute the grid and return all CSV rows (without header)."""
    cfg.validate()
    rows: list[list] = []
    workers = cfg.workers or min(cfg.repetitions, os.cpu_count() or 1)
    for design in cfg.designs:
        tasks = [(cfg, design, rep) for rep in range(cfg.repetitions)]
        if workers > 1 and cfg.repetitions > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = dict(pool.map(_one_cell, tasks))
        else:
            results = dict(map(_one_cell, tasks))
        per_metric: dict[str, list[float]] = {}
        pstr = _cell_params(cfg)
        for rep in range(cfg.repetitions):
            for metric, value in results[rep].items():
                rows.append([cfg.experiment, design, cfg.lines, cfg.ways,
                             cfg.policy, pstr, metric, value,
                             _rep_seed(cfg.seed, rep), rep])
                per_metric.setdefault(metric, []).append(value)
        for metric, values in per_metric.items():
            arr = np.array(values)
            for agg, val in (("min", arr.min()), ("max", arr.max()),
                             ("median", float(np.median(arr))),
                             ("mean", float(arr.mean()))):
                rows.append([cfg.experiment, design, cfg.lines, cfg.ways,
                             cfg.policy, pstr, f"{metric}_{agg}", val,
                             cfg.seed, AGGREGATE_REP])
    return rows


def write_rows(rows: list[list], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def load_config(path: str | None, overrides: argparse.Namespace,
                experiment: str) -> ExperimentConfig:
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    designs = raw.get("designs", [raw.get("design", "assoc")])
    if isinstance(designs, str):
        designs = [designs]
    cfg = ExperimentConfig(
        experiment=raw.get("experiment", experiment),
        designs=list(designs),
        lines=int(raw.get("lines", 2048)),
        ways=int(raw.get("ways", 16)),
        policy=raw.get("policy", "random"),
        repetitions=int(raw.get("repetitions", 1)),
        seed=int(raw.get("seed", 0)),
        out=raw.get("out", "results.csv"),
        workers=int(raw.get("workers", 0)),
        params=dict(raw.get("params", {})),
    )
    cfg.experiment = experiment        # the positional command wins
    if overrides.design is not None:
        cfg.designs = [overrides.design]
    for name in ("lines", "ways", "policy", "seed", "out"):
        val = getattr(overrides, name)
        if val is not None:
            setattr(cfg, name, val)
    if overrides.reps is not None:
        cfg.repetitions = overrides.reps
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):      # invalid flags are config errors
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cachefx",
        description="Cache side-channel security experiments")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--design", choices=sorted(DESIGNS))
    parser.add_argument("--lines", type=int)
    parser.add_argument("--ways", type=int)
    parser.add_argument("--policy", choices=sorted(POLICIES))
    parser.add_argument("--reps", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, args, args.experiment)
        cfg.validate()
    except ConfigError as exc:
        print(f"cachefx: configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        rows = run_experiment(cfg)
        write_rows(rows, cfg.out)
    except ConfigError as exc:
        print(f"cachefx: configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:            # noqa: BLE001 - CLI boundary
        print(f"cachefx: runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
