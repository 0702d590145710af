"""Command-line entry point: single episodes, sweeps, validation, oracle checks."""

from __future__ import annotations

import argparse
import csv
import sys

from .harness import (CSV_HEADER, SweepSpec, _episode_row, load_config,
                      run_episode, run_sweep, tiny_config, child_rng)
from .model import ConfigError, ScenarioConfig, build_topology, sample_tasks
from .channel import draw_snapshot
from .policies import PolicyKind
from .solver import GaConfig, exhaustive_best, run_ga, search_space_size

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep 2 for I/O errors
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="continuum",
                     description="Task offloading simulator for an "
                                 "IoT-edge-cloud continuum")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one episode and print its metrics")
    run.add_argument("--config", help="JSON config path (defaults when omitted)")
    run.add_argument("--policy", required=True,
                     choices=[p.value for p in PolicyKind])
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="also append the episode as one CSV row")

    sweep = sub.add_parser("sweep", help="run the experiment grid to CSV")
    sweep.add_argument("--config", help="JSON config path")
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.add_argument("--jobs", type=int, default=1)

    val = sub.add_parser("validate", help="check a config against all invariants")
    val.add_argument("--config", help="JSON config path")

    oracle = sub.add_parser("oracle",
                            help="exhaustive search vs GA on a tiny instance")
    oracle.add_argument("--config", help="JSON config path (tiny default when "
                                         "omitted)")
    oracle.add_argument("--seed", type=int, default=0)
    return parser


def _load(config_path):
    if config_path is None:
        return ScenarioConfig(), GaConfig(), SweepSpec()
    return load_config(config_path)


def _print_report(policy: str, seed: int, result) -> None:
    rep = result.report
    print(f"policy={policy} seed={seed}")
    print(f"  satisfaction_ratio  {rep.satisfaction_ratio:.4f}")
    print(f"  per_subnet_sr       {[round(x, 4) for x in rep.per_subnet_sr]}")
    print(f"  jfi                 {rep.jfi:.4f}")
    print(f"  comm_util mean/std  {rep.comm_util_mean:.4f} / {rep.comm_util_std:.4f}")
    print(f"  comp_util mean/std  {rep.comp_util_mean:.4f} / {rep.comp_util_std:.4f}")
    print(f"  local_ratio         {rep.local_ratio:.4f}")
    print(f"  objective           {result.objective:.6g}")
    if result.ga_trace is not None:
        print(f"  ga_best_trace       {[round(x, 4) for x in result.ga_trace]}")
    print(f"  runtime_ms          {result.runtime_s * 1e3:.1f}")


def _cmd_run(args) -> int:
    cfg, ga_cfg, _ = _load(args.config)
    policy = PolicyKind(args.policy)
    result = run_episode(policy, cfg, args.seed, ga_cfg)
    _print_report(args.policy, args.seed, result)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            writer.writerow(_episode_row((policy, cfg, ga_cfg, args.seed)))
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg, ga_cfg, spec = _load(args.config)
    out = run_sweep(spec, cfg, ga_cfg, out_path=args.out, n_jobs=args.jobs)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg, ga_cfg, spec = _load(args.config)
    cfg.validate()
    ga_cfg.validate()
    spec.validate()
    build_topology(cfg)
    print("configuration ok")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    if args.config is None:
        cfg, ga_cfg = tiny_config(), GaConfig()
    else:
        cfg, ga_cfg, _ = _load(args.config)
    topology = build_topology(cfg)
    tasks = sample_tasks(cfg, child_rng(args.seed, "tasks"))
    snapshot = draw_snapshot(topology, cfg, child_rng(args.seed, "channel"))
    space = search_space_size(tasks, topology, cfg)
    print(f"search space: {space} chromosomes")
    for policy in (PolicyKind.MINIMUM, PolicyKind.DETERMINISTIC):
        _, opt = exhaustive_best(policy, tasks, topology, snapshot, cfg, ga_cfg)
        _, score, _ = run_ga(policy, tasks, topology, snapshot, cfg, ga_cfg,
                             child_rng(args.seed, "solver"))
        gap = score - opt
        match = "match" if abs(gap) <= 1e-9 * max(1.0, abs(opt)) else f"gap {gap:.6g}"
        print(f"{policy.value:13s} oracle={opt:.6g} ga={score:.6g} [{match}]")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep,
                "validate": _cmd_validate, "oracle": _cmd_oracle}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
