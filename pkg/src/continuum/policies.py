"""Objective functions for the three schemes and the random allocation baseline."""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .channel import ChannelSnapshot
from .evaluator import Allocation, AllocationEntry, task_times
from .model import HopKind, ScenarioConfig, TaskSpec, Topology

INF = math.inf


class PolicyKind(str, Enum):
    MINIMUM = "minimum"            # minimize summed execution time
    DETERMINISTIC = "deterministic"  # penalize deadline misses only
    RANDOM = "random"              # random unit, best-effort deadline grants


def penalty_beta(xi: float, m: float) -> float:
    """Step penalty on normalized execution time: 0 up to the deadline, m beyond."""
    if xi < 0:
        raise ValueError(f"xi must be >= 0, got {xi}")
    if m <= 0:
        raise ValueError(f"m must be > 0, got {m}")
    return 0.0 if xi <= 1.0 else m


def objective_minimum(times: list) -> float:
    """Summed task execution time; any infeasible task makes the sum infinite."""
    return float(sum(t.total for t in times))


def objective_deterministic(times: list, deadlines: list, m: float) -> float:
    """Summed miss penalties: exactly m per task finishing after its deadline."""
    total = 0.0
    for t, d in zip(times, deadlines):
        total += penalty_beta(t.total / d, m)
    return total


def _pool_key(hop) -> tuple:
    return ("ks", hop.subnet) if hop.kind is HopKind.INTRA else ("kp",)


def random_allocate(tasks: list, topology: Topology, snapshot: ChannelSnapshot,
                    cfg: ScenarioConfig, rng: np.random.Generator,
                    max_retries: int = 100) -> Allocation:
    """Random unit per task, with resource draws retried to chase the deadline.

    Tasks are handled in random order. Each task draws its computing unit
    uniformly from its candidate set once; if the unit is remote, the resource
    grant for each radio hop is drawn uniformly from the currently free indices
    (grant size uniform in [1, free count]) and redrawn up to `max_retries`
    times until the deadline and all constraints hold. After the retries run
    out, the last structurally valid draw is kept even if the deadline is
    missed. A starved hop (no free resources) downgrades the task to local
    processing when the source can process; otherwise the task keeps empty
    grants and an infinite execution time.
    """
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    free: dict[tuple, np.ndarray] = {("kp",): np.arange(cfg.k_p_count)}
    for n in range(cfg.n_subnets):
        free[("ks", n)] = np.arange(cfg.k_s_count)
    loads: dict[str, float] = {}
    allocation: Allocation = {}

    def capacity_ok(unit_id: str, cycles: float) -> bool:
        unit = topology.units[unit_id]
        return loads.get(unit_id, 0.0) + cycles <= unit.capacity_cycles

    order = rng.permutation(len(tasks))
    for idx in order:
        task: TaskSpec = tasks[int(idx)]
        cands = topology.candidates[task.source]
        unit = cands[int(rng.integers(len(cands)))]
        route = topology.route(task.source, unit)
        radio = [h for h in route if h.kind is not HopKind.BACKHAUL]

        if unit == task.source:
            entry = AllocationEntry(unit=unit, grants=())
        elif any(free[_pool_key(h)].size == 0 for h in radio):
            if task.source in cands:
                entry = AllocationEntry(unit=task.source, grants=())
            else:
                entry = AllocationEntry(unit=unit, grants=tuple(() for _ in radio))
        else:
            entry = None
            for _ in range(max_retries):
                grants = []
                for hop in radio:
                    pool = free[_pool_key(hop)]
                    size = int(rng.integers(1, pool.size + 1))
                    picked = rng.choice(pool, size=size, replace=False)
                    grants.append(tuple(sorted(int(k) for k in picked)))
                entry = AllocationEntry(unit=unit, grants=tuple(grants))
                tt = task_times(task, entry, topology, snapshot, cfg)
                if tt.satisfied and capacity_ok(unit, task.cycles):
                    break

        allocation[task.task_id] = entry
        loads[entry.unit] = loads.get(entry.unit, 0.0) + task.cycles
        if entry.unit != task.source:
            entry_route = topology.route(task.source, entry.unit)
            entry_radio = [h for h in entry_route if h.kind is not HopKind.BACKHAUL]
            for hop, grant in zip(entry_radio, entry.grants):
                key = _pool_key(hop)
                free[key] = np.setdiff1d(free[key], np.asarray(grant, dtype=int),
                                         assume_unique=False)
    return allocation
