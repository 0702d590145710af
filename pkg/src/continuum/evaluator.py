"""Task timing for a candidate allocation and the six feasibility checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .channel import ChannelSnapshot, InfeasibleLinkError, link_rate, transmission_time
from .model import HopKind, ScenarioConfig, TaskSpec, Topology, UnitKind

INF = math.inf


@dataclass(frozen=True)
class AllocationEntry:
    """Unit choice plus one concrete resource-index grant per radio hop."""

    unit: str
    grants: tuple  # tuple of tuples of resource indices, aligned with radio hops


# task_id -> AllocationEntry. A plain dict keeps one unit per task structurally.
Allocation = dict


@dataclass(frozen=True)
class TaskTimes:
    """Timing breakdown of one task under one allocation."""

    t_comm_fwd: float
    t_proc: float
    t_comm_ret: float
    total: float
    satisfied: bool


class ConstraintKind(str, Enum):
    UNIT_ASSIGNMENT = "unit-assignment"    # not exactly one valid unit per task
    INTRA_COLLISION = "intra-collision"    # subnet resource granted twice
    WAN_COLLISION = "wan-collision"        # shared resource granted twice anywhere
    LINK_RATE = "link-rate"                # per-link task rates exceed link max
    LOCAL_CAPACITY = "local-capacity"      # LC/HC cycle budget exceeded
    SHARED_CAPACITY = "shared-capacity"    # edge/cloud cycle budget exceeded


@dataclass(frozen=True)
class Violation:
    kind: ConstraintKind
    subject: str  # offending unit/resource/task identifier
    detail: str


def process_time(cycles: float, power_hz: float) -> float:
    """Seconds to run `cycles` on a unit of `power_hz` cycles per second."""
    if power_hz <= 0:
        raise ValueError(f"unit cannot process tasks (power_hz={power_hz})")
    if cycles < 0:
        raise ValueError(f"cycles must be >= 0, got {cycles}")
    return cycles / power_hz


def task_times(task: TaskSpec, entry: AllocationEntry, topology: Topology,
               snapshot: ChannelSnapshot, cfg: ScenarioConfig) -> TaskTimes:
    """Forward transfer + processing + return transfer for one task.

    A local assignment (unit == source) has zero communication time. The
    return trip reuses the forward grants over the same links. An unreachable
    hop yields an infinite total with satisfied=False rather than an error.
    """
    unit = topology.units[entry.unit]
    t_proc = process_time(task.cycles, unit.power_hz)
    if entry.unit == task.source:
        total = t_proc
        return TaskTimes(0.0, t_proc, 0.0, total, total <= task.deadline_s)
    route = topology.route(task.source, entry.unit)
    try:
        fwd = transmission_time(task.size_bits, route, entry.grants, snapshot, cfg)
        ret = transmission_time(task.result_bits, route, entry.grants, snapshot, cfg)
    except InfeasibleLinkError:
        return TaskTimes(INF, t_proc, INF, INF, False)
    total = fwd + t_proc + ret
    return TaskTimes(fwd, t_proc, ret, total, total <= task.deadline_s)


def _grant_structure_ok(entry: AllocationEntry, route: tuple) -> str:
    """Empty string if grants line up with the route's radio hops, else a reason."""
    radio = [h for h in route if h.kind is not HopKind.BACKHAUL]
    if len(entry.grants) != len(radio):
        return f"{len(entry.grants)} grants for {len(radio)} radio hops"
    for hop, grant in zip(radio, entry.grants):
        if len(set(grant)) != len(grant):
            return f"duplicate indices within a grant on {hop.link_id}"
    return ""


def check_constraints(allocation: Allocation, tasks: list, topology: Topology,
                      snapshot: ChannelSnapshot, cfg: ScenarioConfig) -> list:
    """Return every constraint violation in `allocation`; an empty list is feasible.

    Checks: single valid unit per task; exclusive use of each subnet resource
    within its subnet; exclusive use of each shared resource system-wide;
    per-link aggregate rate within the link maximum; and per-unit cycle
    budgets for local units and for the edge/cloud.
    """
    violations: list[Violation] = []
    by_id = {t.task_id: t for t in tasks}

    for tid in allocation:
        if tid not in by_id:
            violations.append(Violation(
                ConstraintKind.UNIT_ASSIGNMENT, str(tid), "entry for unknown task"))

    # per-(subnet, resource) and per shared resource usage counts
    intra_users: dict[tuple, list] = {}
    wan_users: dict[int, list] = {}
    # per-link: [(task under that link, grant)] for the rate check
    link_usage: dict[str, list] = {}
    link_hop: dict[str, object] = {}
    loads: dict[str, float] = {}

    for task in tasks:
        entry = allocation.get(task.task_id)
        if entry is None:
            violations.append(Violation(
                ConstraintKind.UNIT_ASSIGNMENT, str(task.task_id), "no unit assigned"))
            continue
        if entry.unit not in topology.candidates.get(task.source, ()):
            violations.append(Violation(
                ConstraintKind.UNIT_ASSIGNMENT, str(task.task_id),
                f"unit {entry.unit} not a candidate for source {task.source}"))
            continue
        loads[entry.unit] = loads.get(entry.unit, 0.0) + task.cycles
        if entry.unit == task.source:
            continue
        route = topology.route(task.source, entry.unit)
        reason = _grant_structure_ok(entry, route)
        if reason:
            violations.append(Violation(
                ConstraintKind.UNIT_ASSIGNMENT, str(task.task_id), reason))
            continue
        gi = 0
        for hop in route:
            if hop.kind is HopKind.BACKHAUL:
                continue
            grant = entry.grants[gi]
            gi += 1
            link_hop[hop.link_id] = hop
            link_usage.setdefault(hop.link_id, []).append(grant)
            for k in grant:
                if hop.kind is HopKind.INTRA:
                    intra_users.setdefault((hop.subnet, k), []).append(task.task_id)
                else:
                    wan_users.setdefault(k, []).append(task.task_id)

    for (subnet, k), users in sorted(intra_users.items()):
        if len(users) > 1:
            violations.append(Violation(
                ConstraintKind.INTRA_COLLISION, f"subnet {subnet} resource {k}",
                f"granted to {len(users)} task-hops: {users}"))
    for k, users in sorted(wan_users.items()):
        if len(users) > 1:
            violations.append(Violation(
                ConstraintKind.WAN_COLLISION, f"shared resource {k}",
                f"granted to {len(users)} task-hops: {users}"))

    for link_id in sorted(link_usage):
        hop = link_hop[link_id]
        pool = cfg.k_s_count if hop.kind is HopKind.INTRA else cfg.k_p_count
        max_rate = link_rate(hop, tuple(range(pool)), snapshot, cfg)
        used = sum(link_rate(hop, grant, snapshot, cfg)
                   for grant in link_usage[link_id])
        if used > max_rate * (1.0 + 1e-9):
            violations.append(Violation(
                ConstraintKind.LINK_RATE, link_id,
                f"aggregate rate {used:.6g} exceeds link max {max_rate:.6g}"))

    for uid, load in sorted(loads.items()):
        unit = topology.units[uid]
        if load > unit.capacity_cycles:
            kind = (ConstraintKind.LOCAL_CAPACITY
                    if unit.kind in (UnitKind.LC, UnitKind.HC)
                    else ConstraintKind.SHARED_CAPACITY)
            violations.append(Violation(
                kind, uid,
                f"{load:.6g} cycles over capacity {unit.capacity_cycles:.6g}"))

    return violations
