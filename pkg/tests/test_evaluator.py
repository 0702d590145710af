import math

import numpy as np
import pytest

from continuum import (AllocationEntry, ConstraintKind, GaConfig,
                       ScenarioConfig, build_topology, check_constraints,
                       child_rng, decode, draw_snapshot, process_time,
                       sample_tasks, task_times)
from continuum.model import TaskSpec
from continuum.solver import Chromosome
from dataclasses import replace


def test_process_time_hand_values():
    assert process_time(50e6, 2.5e9) == pytest.approx(0.02, rel=1e-12)
    assert process_time(20e6, 150e9) == pytest.approx(1.3333333333333334e-4,
                                                      rel=1e-12)
    assert process_time(0.0, 5e9) == 0.0


def test_process_time_rejects_sne_power():
    with pytest.raises(ValueError):
        process_time(1e6, 0.0)


def _hc_task(topology, cycles=50e6, deadline=0.02, subnet=0):
    return TaskSpec(task_id=(0, subnet), source=f"hc-{subnet}-0",
                    cycles=cycles, size_bits=1e6, result_bits=0.15e6,
                    deadline_s=deadline)


def test_task_times_local_run(default_cfg, topology, episode):
    _, snap = episode
    task = _hc_task(topology, cycles=50e6, deadline=0.02)
    entry = AllocationEntry(unit="hc-0-0", grants=())
    tt = task_times(task, entry, topology, snap, default_cfg)
    assert tt.t_comm_fwd == 0.0 and tt.t_comm_ret == 0.0
    assert tt.t_proc == pytest.approx(0.01, rel=1e-12)
    assert tt.total == pytest.approx(0.01, rel=1e-12)
    assert tt.satisfied


def test_task_times_total_additive(default_cfg, topology, episode):
    _, snap = episode
    task = _hc_task(topology, deadline=0.1)
    entry = AllocationEntry(unit="edge", grants=(tuple(range(40)),))
    tt = task_times(task, entry, topology, snap, default_cfg)
    assert tt.total == tt.t_comm_fwd + tt.t_proc + tt.t_comm_ret
    assert tt.t_comm_ret == pytest.approx(0.15 * tt.t_comm_fwd, rel=1e-12)


def test_task_times_boundary_satisfaction(default_cfg, topology, episode):
    _, snap = episode
    task = _hc_task(topology, cycles=50e6, deadline=0.01)
    entry = AllocationEntry(unit="hc-0-0", grants=())
    tt = task_times(task, entry, topology, snap, default_cfg)
    assert tt.total == pytest.approx(task.deadline_s)
    assert tt.satisfied  # non-strict comparison at the boundary
    tight = _hc_task(topology, cycles=50e6, deadline=0.0099)
    assert not task_times(tight, entry, topology, snap, default_cfg).satisfied


def test_task_times_starved_hop_is_infinite(default_cfg, topology, episode):
    _, snap = episode
    task = _hc_task(topology)
    entry = AllocationEntry(unit="edge", grants=((),))
    tt = task_times(task, entry, topology, snap, default_cfg)
    assert math.isinf(tt.total)
    assert not tt.satisfied


def _base_episode(n_subnets=2, tasks_per_subnet=3, seed=0):
    cfg = replace(ScenarioConfig(), n_subnets=n_subnets,
                  tasks_per_subnet=tasks_per_subnet)
    topo = build_topology(cfg)
    tasks = sample_tasks(cfg, child_rng(seed, "tasks"))
    snap = draw_snapshot(topo, cfg, child_rng(seed, "channel"))
    return cfg, topo, tasks, snap


def _local_allocation(tasks, topo):
    alloc = {}
    for t in tasks:
        cands = topo.candidates[t.source]
        unit = cands[0] if t.source == cands[0] else cands[0]
        route = topo.route(t.source, unit)
        radio = [h for h in route if h.kind.value != "backhaul"]
        # one private resource per hop, disjoint across tasks by index
        base = 10 * (t.task_id[0] + 10 * t.task_id[1])
        alloc[t.task_id] = AllocationEntry(
            unit=unit, grants=tuple((base + j,) for j in range(len(radio))))
    return alloc


def test_clean_allocation_has_no_violations():
    cfg, topo, tasks, snap = _base_episode()
    alloc = _local_allocation(tasks, topo)
    assert check_constraints(alloc, tasks, topo, snap, cfg) == []


def test_unit_assignment_violations():
    cfg, topo, tasks, snap = _base_episode()
    alloc = _local_allocation(tasks, topo)
    # wrong subnet's unit
    bad_unit = "lc-1-0" if tasks[0].subnet == 0 else "lc-0-0"
    alloc[tasks[0].task_id] = AllocationEntry(unit=bad_unit, grants=((1,),))
    del alloc[tasks[1].task_id]
    violations = check_constraints(alloc, tasks, topo, snap, cfg)
    kinds = [v.kind for v in violations]
    assert kinds.count(ConstraintKind.UNIT_ASSIGNMENT) == 2


def test_intra_collision_detected():
    cfg, topo, tasks, snap = _base_episode()
    sne = [t for t in tasks if t.source.startswith("sne")]
    a, b = sne[0], [t for t in sne[1:] if t.subnet == sne[0].subnet][0]
    alloc = _local_allocation(tasks, topo)
    lc_a = topo.candidates[a.source][0]
    lc_b = topo.candidates[b.source][0]
    alloc[a.task_id] = AllocationEntry(unit=lc_a, grants=((7,),))
    alloc[b.task_id] = AllocationEntry(unit=lc_b, grants=((7,),))
    violations = check_constraints(alloc, tasks, topo, snap, cfg)
    assert [v.kind for v in violations] == [ConstraintKind.INTRA_COLLISION]


def test_wan_collision_detected_across_subnets():
    cfg, topo, _, snap = _base_episode()
    hc0 = TaskSpec(task_id=(0, 0), source="hc-0-0", cycles=1e6,
                   size_bits=1e6, result_bits=0.1e6, deadline_s=0.1)
    hc1 = TaskSpec(task_id=(0, 1), source="hc-1-0", cycles=1e6,
                   size_bits=1e6, result_bits=0.1e6, deadline_s=0.1)
    alloc = {hc0.task_id: AllocationEntry(unit="edge", grants=((3,),)),
             hc1.task_id: AllocationEntry(unit="edge", grants=((3,),))}
    violations = check_constraints(alloc, [hc0, hc1], topo, snap, cfg)
    assert [v.kind for v in violations] == [ConstraintKind.WAN_COLLISION]


def test_link_rate_violation_via_duplicate_grant():
    # two tasks from the same SNE share one resource on the same link; with
    # a strong first resource the double-counted rate exceeds the link max
    cfg, topo, tasks, snap = _base_episode()
    cfg2 = replace(cfg, k_s_count=2, k_p_count=2)
    topo2 = build_topology(cfg2)
    tasks2 = sample_tasks(cfg2, child_rng(0, "tasks"))
    snap2 = draw_snapshot(topo2, cfg2, child_rng(0, "channel"))
    sne = [t for t in tasks2 if t.source.startswith("sne")]
    same = [t for t in sne if t.source == sne[0].source]
    if len(same) < 2:  # force two tasks through one link
        a = sne[0]
        b = replace_task = TaskSpec(task_id=(99, a.subnet), source=a.source,
                                    cycles=1e6, size_bits=1e6,
                                    result_bits=0.1e6, deadline_s=0.1)
        tasks2 = tasks2 + [b]
        same = [a, b]
    a, b = same[0], same[1]
    link = topo2.route(a.source, topo2.candidates[a.source][0])[0]
    gammas = snap2.gamma[link.link_id]
    strong = int(np.argmax(gammas))
    alloc = {t.task_id: AllocationEntry(
        unit=t.source if t.source == topo2.candidates[t.source][0] else
        topo2.candidates[t.source][0],
        grants=() if t.source == topo2.candidates[t.source][0] else
        ((0,),) * len([h for h in topo2.route(t.source, topo2.candidates[t.source][0])
                       if h.kind.value != "backhaul"]))
        for t in tasks2}
    lc = topo2.candidates[a.source][0]
    alloc[a.task_id] = AllocationEntry(unit=lc, grants=((strong,),))
    alloc[b.task_id] = AllocationEntry(unit=lc, grants=((strong,),))
    violations = check_constraints(alloc, tasks2, topo2, snap2, cfg2)
    kinds = {v.kind for v in violations}
    assert ConstraintKind.INTRA_COLLISION in kinds
    if gammas[strong] > gammas.sum() - gammas[strong]:
        assert ConstraintKind.LINK_RATE in kinds


def test_capacity_violations():
    cfg, topo, tasks, snap = _base_episode()
    lc_tasks = [TaskSpec(task_id=(i, 0), source="hc-0-0", cycles=50e6,
                         size_bits=1e6, result_bits=0.1e6, deadline_s=0.1)
                for i in range(6)]
    # hc capacity is 5e9 * 0.1 = 5e8; use a small-capacity config instead
    cfg_small = replace(cfg, powers_hz={"lc": 2.5e9, "hc": 2.5e9,
                                        "edge": 7e10, "cloud": 1.5e11})
    topo_small = build_topology(cfg_small)
    # 3 tasks x 50e6 = 1.5e8 <= 2.5e8 -> fine
    alloc = {t.task_id: AllocationEntry(unit="hc-0-0", grants=())
             for t in lc_tasks[:3]}
    assert check_constraints(alloc, lc_tasks[:3], topo_small, snap,
                             cfg_small) == []
    # 6 tasks x 50e6 = 3.0e8 > 2.5e8 -> local capacity violation
    alloc = {t.task_id: AllocationEntry(unit="hc-0-0", grants=())
             for t in lc_tasks}
    violations = check_constraints(alloc, lc_tasks, topo_small, snap,
                                   cfg_small)
    assert [v.kind for v in violations] == [ConstraintKind.LOCAL_CAPACITY]


def test_shared_capacity_violation():
    cfg, topo, tasks, snap = _base_episode()
    cfg_small = replace(cfg, powers_hz={"lc": 2.5e9, "hc": 5e9,
                                        "edge": 1e9, "cloud": 1.5e11})
    topo_small = build_topology(cfg_small)
    hc_tasks = [TaskSpec(task_id=(i, 0), source="hc-0-0", cycles=40e6,
                         size_bits=1e6, result_bits=0.1e6, deadline_s=0.1)
                for i in range(3)]
    alloc = {t.task_id: AllocationEntry(unit="edge", grants=((i,),))
             for i, t in enumerate(hc_tasks)}
    violations = check_constraints(alloc, hc_tasks, topo_small, snap,
                                   cfg_small)
    assert [v.kind for v in violations] == [ConstraintKind.SHARED_CAPACITY]


def test_decoded_chromosomes_respect_exclusivity(default_cfg, topology,
                                                 episode, rng):
    tasks, snap = episode
    blocked = {ConstraintKind.UNIT_ASSIGNMENT, ConstraintKind.INTRA_COLLISION,
               ConstraintKind.WAN_COLLISION, ConstraintKind.LINK_RATE}
    for _ in range(50):
        units, demands = [], []
        for t in tasks:
            cands = topology.candidates[t.source]
            ci = int(rng.integers(len(cands)))
            units.append(ci)
            route = topology.route(t.source, cands[ci])
            radio = [h for h in route if h.kind.value != "backhaul"]
            demands.append(tuple(
                int(rng.integers(1, default_cfg.k_s_count + 1))
                for _ in radio))
        chrom = Chromosome(tuple(units), tuple(demands))
        alloc = decode(chrom, tasks, topology, snap, default_cfg)
        violations = check_constraints(alloc, tasks, topology, snap,
                                       default_cfg)
        assert not [v for v in violations if v.kind in blocked]
