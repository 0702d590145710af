"""Episode driver, experiment sweeps, and CSV persistence."""

from __future__ import annotations

import csv
import hashlib
import json
import multiprocessing
import time
from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from .channel import draw_snapshot
from .evaluator import task_times
from .metrics import MetricsReport, build_report
from .model import ConfigError, ScenarioConfig, build_topology, sample_tasks
from .policies import (PolicyKind, objective_deterministic, objective_minimum,
                       random_allocate)
from .solver import GaConfig, run_ga

CSV_HEADER = [
    "policy", "n_subnets", "tasks_per_subnet", "sinr_wan_db", "seed",
    "satisfaction_ratio", "jfi", "comm_util_mean", "comm_util_std",
    "comp_util_mean", "comp_util_std", "local_ratio", "objective",
    "ga_best_trace_final", "runtime_ms", "error",
]


@dataclass(frozen=True)
class SweepSpec:
    """Experiment grid: one episode per (N, I, SINR, policy, seed) cell."""

    n_subnets_list: tuple = (2, 3, 4, 5)
    tasks_list: tuple = (5, 15, 25)
    sinr_wan_db_list: tuple = (0.0, 30.0)
    policies: tuple = (PolicyKind.MINIMUM, PolicyKind.DETERMINISTIC,
                       PolicyKind.RANDOM)
    seeds: tuple = tuple(range(20))
    out_path: str = "sweep.csv"

    def validate(self) -> None:
        for name in ("n_subnets_list", "tasks_list", "sinr_wan_db_list",
                     "policies", "seeds"):
            if not getattr(self, name):
                raise ConfigError(f"sweep {name} must be nonempty")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sweep field(s): {sorted(unknown)}")
        kwargs = dict(data)
        for name in ("n_subnets_list", "tasks_list", "sinr_wan_db_list", "seeds"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        if "policies" in kwargs:
            try:
                kwargs["policies"] = tuple(PolicyKind(p) for p in kwargs["policies"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        spec = cls(**kwargs)
        spec.validate()
        return spec


class EpisodeResult(NamedTuple):
    report: MetricsReport
    allocation: dict
    runtime_s: float
    objective: float
    ga_trace: Optional[list]


def child_rng(master_seed: int, label: str) -> np.random.Generator:
    """Labeled child stream: stable across runs, independent across labels,
    and unaffected by which other labels a caller also derives."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    tag = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), tag]))


def run_episode(policy: PolicyKind, cfg: ScenarioConfig, master_seed: int,
                ga_cfg: Optional[GaConfig] = None) -> EpisodeResult:
    """One batch allocation round under one policy.

    Scenario draws (tasks, channel) depend only on the master seed, so every
    policy sees the same episode; the solver stream is likewise shared so the
    two optimizing schemes differ only in their objective.
    """
    cfg.validate()
    ga_cfg = ga_cfg or GaConfig()
    topology = build_topology(cfg)
    tasks = sample_tasks(cfg, child_rng(master_seed, "tasks"))
    snapshot = draw_snapshot(topology, cfg, child_rng(master_seed, "channel"))

    start = time.perf_counter()
    trace = None
    if policy is PolicyKind.RANDOM:
        allocation = random_allocate(tasks, topology, snapshot, cfg,
                                     child_rng(master_seed, "random"))
    else:
        allocation, _, trace = run_ga(policy, tasks, topology, snapshot, cfg,
                                      ga_cfg, child_rng(master_seed, "solver"))
    times = [task_times(t, allocation[t.task_id], topology, snapshot, cfg)
             for t in tasks]
    if policy is PolicyKind.MINIMUM:
        objective = objective_minimum(times)
    else:
        # the random baseline also aims at deadlines, so it reports the same
        # miss-penalty objective as the deterministic scheme
        objective = objective_deterministic(
            times, [t.deadline_s for t in tasks], cfg.penalty_m)
    report = build_report(allocation, times, tasks, cfg, topology)
    runtime_s = time.perf_counter() - start
    return EpisodeResult(report, allocation, runtime_s, objective, trace)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _episode_row(job) -> list:
    policy, cfg, ga_cfg, seed = job
    base = [policy.value, cfg.n_subnets, cfg.tasks_per_subnet,
            cfg.mean_sinr_wan_db, seed]
    try:
        result = run_episode(policy, cfg, seed, ga_cfg)
    except Exception as exc:  # recorded, not raised: one bad cell must not kill a sweep
        return [_fmt(v) for v in base] + [""] * 10 + [f"{type(exc).__name__}: {exc}"]
    rep = result.report
    trace_final = result.ga_trace[-1] if result.ga_trace else None
    row = base + [rep.satisfaction_ratio, rep.jfi, rep.comm_util_mean,
                  rep.comm_util_std, rep.comp_util_mean, rep.comp_util_std,
                  rep.local_ratio, result.objective, trace_final,
                  result.runtime_s * 1e3, ""]
    return [_fmt(v) for v in row]


def run_sweep(spec: SweepSpec, cfg_base: ScenarioConfig,
              ga_cfg: Optional[GaConfig] = None, out_path: Optional[str] = None,
              n_jobs: int = 1) -> str:
    """Run the full grid and stream rows to a CSV file in grid order.

    Returns the output path. Cells are independent; with n_jobs > 1 they run
    in a process pool, but rows are still written in deterministic grid order.
    """
    spec.validate()
    cfg_base.validate()
    ga_cfg = ga_cfg or GaConfig()
    out = out_path or spec.out_path

    jobs = []
    for n in spec.n_subnets_list:
        for i in spec.tasks_list:
            for sinr in spec.sinr_wan_db_list:
                cfg = replace(cfg_base, n_subnets=n, tasks_per_subnet=i,
                              mean_sinr_wan_db=float(sinr))
                for policy in spec.policies:
                    for seed in spec.seeds:
                        jobs.append((policy, cfg, ga_cfg, int(seed)))

    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        if n_jobs > 1:
            with multiprocessing.Pool(n_jobs) as pool:
                for row in pool.imap(_episode_row, jobs):
                    writer.writerow(row)
        else:
            for job in jobs:
                writer.writerow(_episode_row(job))
    return out


def load_config(path: str):
    """Read a JSON config with optional scenario/ga/sweep sections.

    Omitted sections and fields fall back to the defaults above.
    Returns (ScenarioConfig, GaConfig, SweepSpec).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - {"scenario", "ga", "sweep"}
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    scenario = ScenarioConfig.from_dict(data.get("scenario", {}))
    ga_data = data.get("ga", {})
    known = {f.name for f in fields(GaConfig)}
    bad = set(ga_data) - known
    if bad:
        raise ConfigError(f"unknown ga field(s): {sorted(bad)}")
    ga = GaConfig(**ga_data)
    try:
        ga.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sweep = SweepSpec.from_dict(data.get("sweep", {}))
    return scenario, ga, sweep


def tiny_config() -> ScenarioConfig:
    """A deliberately tiny scenario whose chromosome space can be enumerated:
    one subnetwork, two hub-born tasks, two resources per pool."""
    return ScenarioConfig(
        n_subnets=1, tasks_per_subnet=2, sne_per_subnet=1, lc_per_subnet=1,
        hc_per_subnet=1, k_s_count=2, k_p_count=2, task_gen_split=(0.0, 0.0, 1.0))
