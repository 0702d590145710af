"""Post-hoc episode metrics: satisfaction, fairness, utilization, locality."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluator import Allocation
from .model import HopKind, ScenarioConfig, Topology, UnitKind


@dataclass(frozen=True)
class MetricsReport:
    satisfaction_ratio: float
    per_subnet_sr: tuple
    jfi: float
    comm_util_mean: float
    comm_util_std: float
    comp_util_mean: float
    comp_util_std: float
    local_ratio: float


def satisfaction_ratio(times: list, tasks: list) -> tuple:
    """(overall, per-subnet) satisfaction. Overall is the mean of per-subnet
    ratios, not the pooled ratio, so small subnetworks weigh equally."""
    satisfied: dict[int, int] = {}
    count: dict[int, int] = {}
    for tt, task in zip(times, tasks):
        n = task.subnet
        count[n] = count.get(n, 0) + 1
        satisfied[n] = satisfied.get(n, 0) + (1 if tt.satisfied else 0)
    per_subnet = [satisfied[n] / count[n] for n in sorted(count)]
    return float(np.mean(per_subnet)), per_subnet


def jfi(values: list) -> float:
    """Jain fairness index: (sum x)^2 / (n * sum x^2); an all-zero vector is
    treated as perfectly fair."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("jfi needs a nonempty list")
    if np.any(x < 0):
        raise ValueError("jfi entries must be >= 0")
    denom = x.size * float((x ** 2).sum())
    if denom == 0.0:
        return 1.0
    return float(x.sum() ** 2 / denom)


def _merge(intervals: list) -> list:
    """Merge overlapping (start, end) intervals; drops empty ones."""
    spans = sorted((a, b) for a, b in intervals if b > a)
    merged: list[tuple[float, float]] = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _busy_slots(merged: list, window_end: float, slot_s: float) -> int:
    """Count of slot-grid cells touched by the merged intervals within
    [0, window_end]. Adjacent intervals may share a boundary cell; it is
    counted once."""
    total = 0
    next_free = 0  # first slot index not yet counted
    for a, b in merged:
        a = max(a, 0.0)
        b = min(b, window_end)
        if b <= a:
            continue
        lo = max(math.floor(a / slot_s), next_free)
        hi = math.ceil(b / slot_s)
        if hi > lo:
            total += hi - lo
            next_free = hi
    return total


def utilization(allocation: Allocation, times: list, tasks: list,
                cfg: ScenarioConfig, topology: Topology) -> tuple:
    """Utilization seen by each task on the resources it selected.

    A task occupies every granted communication resource during its forward
    window [0, t_c] and its return window [t_c + t_p, total], and its unit
    during [t_c, t_c + t_p]. For each (task, selected resource) pair, the
    utilization is the resource's total busy time by any task, discretized to
    the slot grid and clipped to the task's deadline window, divided by the
    deadline; capped at 1.0. Returns (comm mean, comm std, comp mean, comp std).
    """
    comm_busy: dict[tuple, list] = {}
    unit_busy: dict[str, list] = {}
    comm_selected: list[tuple] = []  # (deadline, resource key)
    comp_selected: list[tuple] = []  # (deadline, unit id)

    for task, tt in zip(tasks, times):
        entry = allocation[task.task_id]
        t_c = tt.t_comm_fwd
        if math.isfinite(t_c):
            unit_busy.setdefault(entry.unit, []).append((t_c, t_c + tt.t_proc))
        comp_selected.append((task.deadline_s, entry.unit))
        if entry.unit == task.source:
            continue
        route = topology.route(task.source, entry.unit)
        radio = [h for h in route if h.kind is not HopKind.BACKHAUL]
        windows = [(0.0, t_c)]
        if math.isfinite(tt.total):
            windows.append((t_c + tt.t_proc, tt.total))
        for hop, grant in zip(radio, entry.grants):
            for k in grant:
                key = (("ks", hop.subnet, int(k)) if hop.kind is HopKind.INTRA
                       else ("kp", int(k)))
                comm_busy.setdefault(key, []).extend(windows)
                comm_selected.append((task.deadline_s, key))

    merged_comm = {key: _merge(spans) for key, spans in comm_busy.items()}
    merged_unit = {uid: _merge(spans) for uid, spans in unit_busy.items()}

    def ratios(selected, merged_map):
        out = []
        for deadline, key in selected:
            merged = merged_map.get(key, [])
            busy = _busy_slots(merged, deadline, cfg.slot_s) * cfg.slot_s
            out.append(min(1.0, busy / deadline))
        return out

    comm = ratios(comm_selected, merged_comm)
    comp = ratios(comp_selected, merged_unit)
    comm_mean = float(np.mean(comm)) if comm else 0.0
    comm_std = float(np.std(comm)) if comm else 0.0
    comp_mean = float(np.mean(comp)) if comp else 0.0
    comp_std = float(np.std(comp)) if comp else 0.0
    return comm_mean, comm_std, comp_mean, comp_std


def local_ratio(allocation: Allocation, topology: Topology) -> float:
    """Fraction of tasks processed on an LC or HC of their own subnetwork."""
    if not allocation:
        return 0.0
    local = 0
    for (_, subnet), entry in allocation.items():
        unit = topology.units[entry.unit]
        if unit.kind in (UnitKind.LC, UnitKind.HC) and unit.subnet == subnet:
            local += 1
    return local / len(allocation)


def build_report(allocation: Allocation, times: list, tasks: list,
                 cfg: ScenarioConfig, topology: Topology) -> MetricsReport:
    overall, per_subnet = satisfaction_ratio(times, tasks)
    comm_mean, comm_std, comp_mean, comp_std = utilization(
        allocation, times, tasks, cfg, topology)
    return MetricsReport(
        satisfaction_ratio=overall,
        per_subnet_sr=tuple(per_subnet),
        jfi=jfi(per_subnet),
        comm_util_mean=comm_mean,
        comm_util_std=comm_std,
        comp_util_mean=comp_mean,
        comp_util_std=comp_std,
        local_ratio=local_ratio(allocation, topology),
    )
