"""Elitist genetic algorithm over unit choices and per-hop resource demands.

A chromosome holds, per task, an index into the task's candidate unit set and
one requested resource count per radio hop of the implied route. The decoder
hands out concrete resource indices first-fit in fixed task order, so decoded
allocations can never collide on a resource; shortfalls surface as infeasible
hops and are punished through the objective, and capacity overruns through an
explicit penalty term.

run_ga evaluates whole populations through vectorized tables for speed; the
scalar decode/fitness functions below define the semantics and the two paths
are held together by tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnapshot
from .evaluator import (Allocation, AllocationEntry, ConstraintKind,
                        check_constraints, task_times)
from .model import (CLOUD_ID, EDGE_ID, HopKind, ScenarioConfig, Topology)
from .policies import PolicyKind, objective_deterministic

_CAPACITY_KINDS = (ConstraintKind.LOCAL_CAPACITY, ConstraintKind.SHARED_CAPACITY)

# tie-break shaping weights: communication-resource leanness vs
# computing-load balance (see _Instance.evaluate)
_SHAPING_LEANNESS = 0.1
_SHAPING_BALANCE = 2.0

# surrogate execution time an unreachable task contributes to the
# time-minimizing fitness; sits at the deadline scale so that scheme may
# sacrifice an awkward task instead of treating it as catastrophic
_UNREACHABLE_TIME_S = 1e4


@dataclass(frozen=True)
class GaConfig:
    population: int = 1000
    elite_fraction: float = 0.20
    generations: int = 10
    mutation_rate: float = 0.20
    infeasibility_penalty: float = 1e4  # per capacity violation, dominates the objective

    def validate(self) -> None:
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 0 < self.elite_fraction < 1:
            raise ValueError("elite_fraction must be in (0, 1)")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.infeasibility_penalty <= 0:
            raise ValueError("infeasibility_penalty must be > 0")

    @property
    def elite_count(self) -> int:
        return min(max(2, round(self.population * self.elite_fraction)),
                   self.population - 1)


@dataclass(frozen=True)
class Chromosome:
    """Per task: candidate-set index, then one demand per radio hop of its route."""

    unit_genes: tuple
    demand_genes: tuple  # tuple per task, length matches the decoded route


def decode(chromosome: Chromosome, tasks: list, topology: Topology,
           snapshot: ChannelSnapshot, cfg: ScenarioConfig) -> Allocation:
    """Turn demands into concrete grants, first-fit per pool in task order.

    Free indices of each pool always form a contiguous suffix, so a grant is a
    run of consecutive indices. A hop demanding more than remains gets all
    remaining indices; a hop facing an empty pool gets an empty grant, which
    the evaluator prices as an infinite execution time.
    """
    ptr: dict[tuple, int] = {("kp",): 0}
    for n in range(cfg.n_subnets):
        ptr[("ks", n)] = 0
    sizes = {("kp",): cfg.k_p_count}
    for n in range(cfg.n_subnets):
        sizes[("ks", n)] = cfg.k_s_count

    allocation: Allocation = {}
    for t, task in enumerate(tasks):
        cands = topology.candidates[task.source]
        unit = cands[chromosome.unit_genes[t]]
        route = topology.route(task.source, unit)
        radio = [h for h in route if h.kind is not HopKind.BACKHAUL]
        demands = chromosome.demand_genes[t]
        if len(demands) != len(radio):
            raise ValueError(f"task {task.task_id}: {len(demands)} demands for "
                             f"{len(radio)} radio hops")
        grants = []
        for hop, demand in zip(radio, demands):
            key = ("ks", hop.subnet) if hop.kind is HopKind.INTRA else ("kp",)
            start = ptr[key]
            take = min(int(demand), sizes[key] - start)
            take = max(take, 0)
            grants.append(tuple(range(start, start + take)))
            ptr[key] = start + take
        allocation[task.task_id] = AllocationEntry(unit=unit, grants=tuple(grants))
    return allocation


def fitness(chromosome: Chromosome, policy: PolicyKind, tasks: list,
            topology: Topology, snapshot: ChannelSnapshot, cfg: ScenarioConfig,
            ga_cfg: GaConfig) -> float:
    """Objective of the decoded allocation plus a penalty per capacity overrun.

    For the time-minimizing policy each task's contribution is capped at the
    infeasibility penalty: an unreachable task scores that large constant
    instead of infinity, so selection can still count unreachable tasks and
    climb out of fully infeasible populations.
    """
    allocation = decode(chromosome, tasks, topology, snapshot, cfg)
    times = [task_times(t, allocation[t.task_id], topology, snapshot, cfg)
             for t in tasks]
    if policy is PolicyKind.MINIMUM:
        objective = float(sum(min(t.total, _UNREACHABLE_TIME_S) for t in times))
    else:
        objective = objective_deterministic(
            times, [t.deadline_s for t in tasks], cfg.penalty_m)
    overruns = sum(1 for v in check_constraints(allocation, tasks, topology,
                                                snapshot, cfg)
                   if v.kind in _CAPACITY_KINDS)
    return objective + ga_cfg.infeasibility_penalty * overruns


class _Instance:
    """Precomputed per-episode tables for vectorized population evaluation."""

    def __init__(self, tasks: list, topology: Topology,
                 snapshot: ChannelSnapshot, cfg: ScenarioConfig):
        self.tasks = tasks
        self.topology = topology
        self.cfg = cfg
        n = cfg.n_subnets
        self.n_pools = n + 1  # one per-subnet pool, then the shared pool
        self.pool_sizes = np.array([cfg.k_s_count] * n + [cfg.k_p_count],
                                   dtype=np.int64)
        self.total_pool = float(self.pool_sizes.sum())

        procs = topology.processing_units()
        unit_index = {u.id: i for i, u in enumerate(procs)}
        self.caps = np.array([u.capacity_cycles for u in procs])
        self.n_units = len(procs)

        prefix_cache: dict[str, np.ndarray] = {}

        def prefix(hop) -> np.ndarray:
            arr = prefix_cache.get(hop.link_id)
            if arr is None:
                gamma = snapshot.gamma[hop.link_id]
                rates = (cfg.resource_bw_hz * np.log2(1.0 + gamma)
                         * (1.0 - cfg.ber))
                arr = np.concatenate(([0.0], np.cumsum(rates)))
                prefix_cache[hop.link_id] = arr
            return arr

        self.n_tasks = len(tasks)
        self.cand_count = []
        self.route_len = []     # per task: hops per candidate (np array)
        self.slot_pool = []     # per task: pool index per slot
        self.slot_prefix = []   # per task: rate prefix array per slot
        self.proc_s = []        # per task: processing time per candidate
        self.backhaul_s = []    # per task: fixed-wire time per candidate
        self.unit_idx = []      # per task: global unit index per candidate
        self.cycles = np.array([t.cycles for t in tasks])
        self.deadline = np.array([t.deadline_s for t in tasks])
        self.bits_total = np.array([t.size_bits + t.result_bits for t in tasks])

        unit_cols = []
        demand_cols = []
        lo, hi = [], []
        col = 0
        for task in tasks:
            cands = topology.candidates[task.source]
            template = [h for h in topology.route(task.source, EDGE_ID)
                        if h.kind is not HopKind.BACKHAUL]
            self.cand_count.append(len(cands))
            self.route_len.append(np.array(
                [sum(1 for h in topology.route(task.source, c)
                     if h.kind is not HopKind.BACKHAUL) for c in cands],
                dtype=np.int64))
            pools = [hop.subnet if hop.kind is HopKind.INTRA else n
                     for hop in template]
            self.slot_pool.append(pools)
            self.slot_prefix.append([prefix(hop) for hop in template])
            self.proc_s.append(np.array(
                [task.cycles / topology.units[c].power_hz for c in cands]))
            self.backhaul_s.append(np.array(
                [(task.size_bits + task.result_bits) / cfg.backhaul_rate_bps
                 if c == CLOUD_ID else 0.0 for c in cands]))
            self.unit_idx.append(np.array([unit_index[c] for c in cands],
                                          dtype=np.int64))
            unit_cols.append(col)
            lo.append(0)
            hi.append(len(cands) - 1)
            col += 1
            cols = []
            for pool in pools:
                cols.append(col)
                lo.append(1)
                hi.append(int(self.pool_sizes[pool]))
                col += 1
            demand_cols.append(cols)

        self.unit_col = unit_cols
        self.demand_cols = demand_cols
        self.n_genes = col
        self.gene_lo = np.array(lo, dtype=np.int64)
        self.gene_hi = np.array(hi, dtype=np.int64)

    def fitness_batch(self, pop: np.ndarray, policy: PolicyKind,
                      penalty: float, m: float) -> np.ndarray:
        """Fitness of every row of `pop`; mirrors decode + fitness."""
        return self.evaluate(pop, policy, penalty, m)[0]

    def evaluate(self, pop: np.ndarray, policy: PolicyKind,
                 penalty: float, m: float) -> tuple:
        """(fitness, shaping) per row.

        The shaping value never feeds the reported score; it only breaks
        fitness ties in selection: summed normalized lateness plus a small
        resource-consumption term, so equally-scoring individuals rank by how
        close their misses are to feasibility and how lean their grants are.
        """
        p = pop.shape[0]
        rows = np.arange(p)
        ptrs = np.zeros((p, self.n_pools), dtype=np.int64)
        loads = np.zeros((p, self.n_units))
        minimize = policy is PolicyKind.MINIMUM
        obj = np.zeros(p)
        lateness = np.zeros(p)
        for t in range(self.n_tasks):
            c = pop[:, self.unit_col[t]]
            hops = self.route_len[t][c]
            inv = np.zeros(p)
            infeasible = np.zeros(p, dtype=bool)
            for j, pool in enumerate(self.slot_pool[t]):
                active = hops > j
                if not active.any():
                    break
                demand = pop[:, self.demand_cols[t][j]]
                ptr = ptrs[:, pool]
                avail = self.pool_sizes[pool] - ptr
                take = np.where(active, np.minimum(demand, avail), 0)
                take = np.maximum(take, 0)
                pref = self.slot_prefix[t][j]
                rate = pref[ptr + take] - pref[ptr]
                usable = take > 0
                ok = usable & (rate > 0.0)
                inv += np.where(ok, 1.0 / np.where(ok, rate, 1.0), 0.0)
                infeasible |= active & ~ok
                ptrs[:, pool] = ptr + take
            total = (self.proc_s[t][c] + self.bits_total[t] * inv
                     + self.backhaul_s[t][c])
            total = np.where(infeasible, np.inf, total)
            if minimize:
                obj += np.minimum(total, _UNREACHABLE_TIME_S)
            else:
                obj += m * (total > self.deadline[t])
            lateness += np.minimum(
                np.maximum(total / self.deadline[t] - 1.0, 0.0), 1e3)
            loads[rows, self.unit_idx[t][c]] += self.cycles[t]
        overruns = (loads > self.caps[None, :]).sum(axis=1)
        balance = ((loads / self.caps[None, :]) ** 2).mean(axis=1)
        shaped = (lateness
                  + _SHAPING_LEANNESS * ptrs.sum(axis=1) / self.total_pool
                  + _SHAPING_BALANCE * balance)
        return obj + penalty * overruns, shaped

    def simulate(self, row: np.ndarray) -> tuple:
        """Per-task totals of one row plus each task's pre-decode pool state."""
        ptrs = np.zeros(self.n_pools, dtype=np.int64)
        ptr_at = np.zeros((self.n_tasks, self.n_pools), dtype=np.int64)
        totals = np.empty(self.n_tasks)
        for t in range(self.n_tasks):
            ptr_at[t] = ptrs
            ci = int(row[self.unit_col[t]])
            length = int(self.route_len[t][ci])
            inv = 0.0
            infeasible = False
            for j in range(length):
                pool = self.slot_pool[t][j]
                avail = int(self.pool_sizes[pool] - ptrs[pool])
                take = min(int(row[self.demand_cols[t][j]]), avail) if avail > 0 else 0
                pref = self.slot_prefix[t][j]
                rate = float(pref[ptrs[pool] + take] - pref[ptrs[pool]])
                if take <= 0 or rate <= 0.0:
                    infeasible = True
                else:
                    inv += 1.0 / rate
                ptrs[pool] += take
            total = (self.proc_s[t][ci] + self.bits_total[t] * inv
                     + self.backhaul_s[t][ci])
            totals[t] = math.inf if infeasible else total
        return totals, ptr_at

    def min_demands(self, t: int, ci: int, ptrs: np.ndarray, margin: float,
                    greedy_last: bool = False) -> list:
        """Smallest per-hop grant sizes that meet the deadline if each hop

        carries an equal share of the transfer-time budget, given the pool
        state `ptrs`. With greedy_last, a final wide-area hop instead takes
        everything left in the shared pool and only the preceding hops split
        the remaining budget; that spares the scarcer per-subnet pools.
        Falls back to maximal demands when no budget remains.
        """
        length = int(self.route_len[t][ci])
        if length == 0:
            return []
        budget = (self.deadline[t] - self.proc_s[t][ci]
                  - self.backhaul_s[t][ci])
        bits = self.bits_total[t]
        demands = [0] * length
        split = list(range(length))
        if (greedy_last and budget > 0 and length == len(self.slot_pool[t])
                and length > 1):
            j = length - 1
            pool = self.slot_pool[t][j]
            ptr = int(ptrs[pool])
            avail = int(self.pool_sizes[pool]) - ptr
            if avail > 0:
                pref = self.slot_prefix[t][j]
                rate = float(pref[ptr + avail] - pref[ptr])
                if rate > 0:
                    demands[j] = avail
                    budget -= bits / rate
                    split = split[:-1]
        for j in split:
            pool = self.slot_pool[t][j]
            size = int(self.pool_sizes[pool])
            if budget <= 0:
                # past saving: token demand, leave the pool to others
                demands[j] = 1
                continue
            target = bits * len(split) / budget * margin
            pref = self.slot_prefix[t][j]
            base = float(pref[int(ptrs[pool])])
            k = int(np.searchsorted(pref, base + target)) - int(ptrs[pool])
            demands[j] = max(1, min(k, size))
        return demands

    def predicted_total(self, t: int, ci: int, demands: list,
                        ptrs: np.ndarray) -> float:
        """Execution time task t would see on candidate ci with `demands`,
        given pool state `ptrs`; +inf when a hop would come up empty."""
        inv = 0.0
        for j in range(int(self.route_len[t][ci])):
            pool = self.slot_pool[t][j]
            avail = int(self.pool_sizes[pool] - ptrs[pool])
            take = min(demands[j], avail) if avail > 0 else 0
            pref = self.slot_prefix[t][j]
            rate = float(pref[int(ptrs[pool]) + take] - pref[int(ptrs[pool])])
            if take <= 0 or rate <= 0.0:
                return math.inf
            inv += 1.0 / rate
        return (self.proc_s[t][ci] + self.bits_total[t] * inv
                + self.backhaul_s[t][ci])

    def _commit(self, t: int, ptrs: np.ndarray, loads: np.ndarray,
                margin: float, mode: str = "local"):
        """Pick a candidate for task t under the running pool/capacity state.

        mode "local": the most local deadline-meeting candidate.
        mode "fast": the deadline-meeting candidate with the smallest
        predicted execution time.
        mode "spread": the deadline-meeting candidate leaving the most
        relative capacity headroom on its unit.
        Returns (candidate index, demands, met); met=False means no candidate
        meets the deadline and capacity, and the first/fastest fallback is
        returned instead."""
        fallback = None
        best_fallback_time = math.inf
        best = None
        best_key = math.inf
        for ci in range(self.cand_count[t]):
            unit = self.unit_idx[t][ci]
            load_after = loads[unit] + self.cycles[t]
            fits_cap = load_after <= self.caps[unit]
            for greedy_last in (False, True):
                demands = self.min_demands(t, ci, ptrs, margin,
                                           greedy_last=greedy_last)
                total = self.predicted_total(t, ci, demands, ptrs)
                if total <= self.deadline[t] and fits_cap:
                    if mode == "local":
                        return ci, demands, True
                    key = total if mode == "fast" else load_after / self.caps[unit]
                    if key < best_key:
                        best_key = key
                        best = (ci, demands)
                    break
                if fallback is None or total < best_fallback_time:
                    best_fallback_time = total
                    fallback = (ci, demands)
        if best is not None:
            return best[0], best[1], True
        return fallback[0], fallback[1], False

    def _park(self, t: int, loads: np.ndarray):
        """Cheapest shelf for a task that will miss anyway: the most local
        candidate with capacity headroom, token grants only."""
        best = None
        for ci in range(self.cand_count[t]):
            unit = self.unit_idx[t][ci]
            headroom = self.caps[unit] - loads[unit] - self.cycles[t]
            if headroom >= 0:
                return ci, [1] * int(self.route_len[t][ci])
            if best is None or headroom > best[1]:
                best = (ci, headroom)
        ci = best[0]
        return ci, [1] * int(self.route_len[t][ci])

    def greedy_rows(self) -> list:
        """From-scratch constructions injected as offspring.

        Per margin: a most-local walk in decode order; a miss-count-oriented
        walk that commits tasks cheapest-footprint-first and parks the rest
        with token grants; a time-greedy walk; and a capacity-spreading walk.
        Selection decides which, if any, survive."""
        rows = []
        # time-greedy walks get generous grants so faster units actually
        # show up as faster; the others aim just past the deadline
        mode_margins = {"local": (1.0, 1.2), "fast": (2.0, 3.0),
                        "spread": (1.0, 1.2)}
        for mode, margins in mode_margins.items():
            for margin in margins:
                row = np.empty(self.n_genes, dtype=np.int64)
                ptrs = np.zeros(self.n_pools, dtype=np.int64)
                loads = np.zeros(self.n_units)
                for t in range(self.n_tasks):
                    ci, demands, met = self._commit(t, ptrs, loads, margin, mode)
                    if not met:
                        ci, demands = self._park(t, loads)
                    self._write_task(row, t, ci, demands, ptrs, loads)
                rows.append(row)

        # cheapest footprint first, most-local placement
        for margin in (1.0, 1.2):
            empty = np.zeros(self.n_pools, dtype=np.int64)
            zero_loads = np.zeros(self.n_units)
            cost = []
            for t in range(self.n_tasks):
                ci, demands, met = self._commit(t, empty, zero_loads, margin)
                cost.append((sum(demands) if met else math.inf, t))
            row = np.empty(self.n_genes, dtype=np.int64)
            ptrs = np.zeros(self.n_pools, dtype=np.int64)
            loads = np.zeros(self.n_units)
            for _, t in sorted(cost):
                ci, demands, met = self._commit(t, ptrs, loads, margin)
                if not met:
                    ci, demands = self._park(t, loads)
                self._write_task(row, t, ci, demands, ptrs, loads)
            rows.append(row)
        return rows

    def _write_task(self, row: np.ndarray, t: int, ci: int, demands: list,
                    ptrs: np.ndarray, loads: np.ndarray) -> None:
        row[self.unit_col[t]] = ci
        for col in self.demand_cols[t]:
            row[col] = 1
        for col, d in zip(self.demand_cols[t], demands):
            row[col] = d
        for j in range(int(self.route_len[t][ci])):
            pool = self.slot_pool[t][j]
            avail = int(self.pool_sizes[pool] - ptrs[pool])
            ptrs[pool] += min(demands[j], avail) if avail > 0 else 0
        loads[self.unit_idx[t][ci]] += self.cycles[t]

    def repair_probes(self, row: np.ndarray) -> list:
        """Deterministic repair candidates for the worst late task of `row`.

        Two families per safety margin: re-aim the late task alone at each of
        its candidate units with minimal-needed grants, and a global variant
        that also right-sizes every other task's grants for its current unit.
        The probes are only suggestions; selection decides their fate.
        """
        totals, ptr_at = self.simulate(row)
        lateness = totals / self.deadline - 1.0  # starved tasks land at +inf
        if not np.any(lateness > 0):
            return []
        tau = int(np.argmax(lateness))

        def uses_wan(t: int, ct: int) -> bool:
            return int(self.route_len[t][ct]) == len(self.slot_pool[t])

        def hub_index(t: int) -> int:
            # own HC for SNE/LC sources; HC sources already are the hub
            return 0 if self.cand_count[t] == 3 else 1

        tau_subnet = self.tasks[tau].subnet

        def global_probe(ci: int, margin: float, evict: int,
                         greedy: bool) -> np.ndarray:
            # evict: -1 keep other units, 0 move other wan users to their
            # first candidate, 1 move them to their hub, 2 additionally move
            # the late task's subnet mates to their most-local candidate
            probe = row.copy()
            ptrs = np.zeros(self.n_pools, dtype=np.int64)
            for t in range(self.n_tasks):
                if t == tau:
                    ct = ci
                elif evict == 2 and self.tasks[t].subnet == tau_subnet:
                    ct = 0
                else:
                    ct = int(row[self.unit_col[t]])
                    if evict >= 0 and uses_wan(t, ct):
                        ct = 0 if evict == 0 else hub_index(t)
                probe[self.unit_col[t]] = ct
                demands = self.min_demands(t, ct, ptrs, margin,
                                           greedy_last=greedy and t == tau)
                for col, d in zip(self.demand_cols[t], demands):
                    probe[col] = d
                for j in range(int(self.route_len[t][ct])):
                    pool = self.slot_pool[t][j]
                    avail = int(self.pool_sizes[pool] - ptrs[pool])
                    ptrs[pool] += min(demands[j], avail) if avail > 0 else 0
            return probe

        probes = []
        seen = set()
        for margin in (1.0, 1.2):
            for ci in range(self.cand_count[tau]):
                for greedy in (False, True):
                    probe = row.copy()
                    probe[self.unit_col[tau]] = ci
                    for col, d in zip(self.demand_cols[tau],
                                      self.min_demands(tau, ci, ptr_at[tau],
                                                       margin, greedy)):
                        probe[col] = d
                    candidates = [probe]
                    candidates += [global_probe(ci, margin, evict, greedy)
                                   for evict in (-1, 0, 1, 2)]
                    for cand in candidates:
                        key = cand.tobytes()
                        if key not in seen:
                            seen.add(key)
                            probes.append(cand)
        return probes

    def materialize(self, row: np.ndarray) -> Chromosome:
        units = []
        demands = []
        for t in range(self.n_tasks):
            c = int(row[self.unit_col[t]])
            units.append(c)
            length = int(self.route_len[t][c])
            demands.append(tuple(int(row[col])
                                 for col in self.demand_cols[t][:length]))
        return Chromosome(unit_genes=tuple(units), demand_genes=tuple(demands))


def run_ga(policy: PolicyKind, tasks: list, topology: Topology,
           snapshot: ChannelSnapshot, cfg: ScenarioConfig, ga_cfg: GaConfig,
           rng: np.random.Generator):
    """Evolve allocations for one episode.

    Generation 0 is uniform over the gene domains. Every later generation
    keeps the elite unchanged, refills with uniform per-gene crossover of two
    distinct elite parents, and resamples one uniformly chosen gene in a
    mutated offspring. A handful of offspring slots are overwritten with
    deterministic repair probes derived from the current best individual;
    like any offspring they survive only if selection favors them. Ties in
    fitness break by the lateness/leanness shaping, then towards the older
    individual, so identical seeds reproduce identical runs.

    Returns (best allocation, best fitness, per-generation best-fitness trace).
    """
    ga_cfg.validate()
    inst = _Instance(tasks, topology, snapshot, cfg)
    pop_size = ga_cfg.population
    n_elite = ga_cfg.elite_count
    n_off = pop_size - n_elite

    pop = rng.integers(inst.gene_lo, inst.gene_hi + 1,
                       size=(pop_size, inst.n_genes), dtype=np.int64)
    serial = np.arange(pop_size, dtype=np.int64)
    next_serial = pop_size

    fits, shaped = inst.evaluate(pop, policy, ga_cfg.infeasibility_penalty,
                                 cfg.penalty_m)
    order = np.lexsort((serial, shaped, fits))
    trace = [float(fits[order[0]])]

    for _ in range(ga_cfg.generations):
        elite_rows = pop[order[:n_elite]]
        elite_serial = serial[order[:n_elite]]
        p1 = rng.integers(0, n_elite, size=n_off)
        p2 = rng.integers(0, n_elite - 1, size=n_off)
        p2 = p2 + (p2 >= p1)
        mask = rng.random((n_off, inst.n_genes)) < 0.5
        offspring = np.where(mask, elite_rows[p1], elite_rows[p2])
        mutate = np.flatnonzero(rng.random(n_off) < ga_cfg.mutation_rate)
        if mutate.size:
            cols = rng.integers(0, inst.n_genes, size=mutate.size)
            offspring[mutate, cols] = rng.integers(inst.gene_lo[cols],
                                                   inst.gene_hi[cols] + 1)
        probes = (inst.greedy_rows() + inst.repair_probes(pop[order[0]]))[:n_off]
        if probes:
            offspring[n_off - len(probes):] = probes
        pop = np.concatenate([elite_rows, offspring])
        serial = np.concatenate([
            elite_serial,
            np.arange(next_serial, next_serial + n_off, dtype=np.int64)])
        next_serial += n_off
        fits, shaped = inst.evaluate(pop, policy, ga_cfg.infeasibility_penalty,
                                     cfg.penalty_m)
        order = np.lexsort((serial, shaped, fits))
        trace.append(float(fits[order[0]]))

    best = inst.materialize(pop[order[0]])
    allocation = decode(best, tasks, topology, snapshot, cfg)
    score = fitness(best, policy, tasks, topology, snapshot, cfg, ga_cfg)
    return allocation, score, trace


def search_space_size(tasks: list, topology: Topology, cfg: ScenarioConfig) -> int:
    """Number of distinct chromosomes; used to guard exhaustive enumeration."""
    total = 1
    for task in tasks:
        options = 0
        for cand in topology.candidates[task.source]:
            combos = 1
            for hop in topology.route(task.source, cand):
                if hop.kind is HopKind.BACKHAUL:
                    continue
                pool = cfg.k_s_count if hop.kind is HopKind.INTRA else cfg.k_p_count
                combos *= pool
            options += combos
        total *= options
    return total


def exhaustive_best(policy: PolicyKind, tasks: list, topology: Topology,
                    snapshot: ChannelSnapshot, cfg: ScenarioConfig,
                    ga_cfg: GaConfig, limit: int = 2_000_000):
    """Brute-force optimum over every (unit, demands) combination.

    Only viable for tiny instances; raises ValueError when the search space
    exceeds `limit`. Returns (best chromosome, best fitness); ties keep the
    first combination in enumeration order.
    """
    space = search_space_size(tasks, topology, cfg)
    if space > limit:
        raise ValueError(f"search space {space} exceeds enumeration limit {limit}")

    per_task = []
    for task in tasks:
        options = []
        cands = topology.candidates[task.source]
        for ci, cand in enumerate(cands):
            radio = [h for h in topology.route(task.source, cand)
                     if h.kind is not HopKind.BACKHAUL]
            pools = [cfg.k_s_count if h.kind is HopKind.INTRA else cfg.k_p_count
                     for h in radio]
            for demands in itertools.product(*[range(1, k + 1) for k in pools]):
                options.append((ci, demands))
        per_task.append(options)

    best_chrom = None
    best_score = math.inf
    for combo in itertools.product(*per_task):
        chrom = Chromosome(unit_genes=tuple(c for c, _ in combo),
                           demand_genes=tuple(d for _, d in combo))
        score = fitness(chrom, policy, tasks, topology, snapshot, cfg, ga_cfg)
        if score < best_score:
            best_score = score
            best_chrom = chrom
    return best_chrom, best_score
