"""Topology, task, and configuration types for the IoT-edge-cloud simulator.

A scenario is a set of subnetworks, each holding sensor-class elements (SNE),
low-capability processors (LC) and one high-capability hub (HC), plus a single
shared edge node and cloud node. Tasks are born inside subnetworks and may be
offloaded up the hierarchy SNE -> serving LC -> HC -> edge -> cloud.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    """Raised when a scenario configuration violates an invariant."""


class UnitKind(str, Enum):
    SNE = "sne"
    LC = "lc"
    HC = "hc"
    EDGE = "edge"
    CLOUD = "cloud"


class HopKind(str, Enum):
    INTRA = "intra"      # inside a subnetwork, draws from that subnet's pool
    WAN = "wan"          # subnetwork to wide-area network, draws from the shared pool
    BACKHAUL = "backhaul"  # edge <-> cloud wire, fixed rate, no resource grant


# Source kinds that can generate tasks, in quota order.
TASK_SOURCE_KINDS = (UnitKind.SNE, UnitKind.LC, UnitKind.HC)


@dataclass(frozen=True)
class ComputeUnit:
    """A processing element. SNEs have power_hz == 0: they only generate tasks."""

    id: str
    kind: UnitKind
    subnet: Optional[int]  # None for edge and cloud
    power_hz: float        # cycles per second
    capacity_cycles: float  # max cycles schedulable in one episode

    @property
    def can_process(self) -> bool:
        return self.power_hz > 0.0


@dataclass(frozen=True)
class TaskSpec:
    """One task: workload in cycles, payload sizes in bits, deadline in seconds."""

    task_id: tuple[int, int]  # (index within subnet, subnet index)
    source: str               # id of the generating unit
    cycles: float
    size_bits: float
    result_bits: float
    deadline_s: float
    birth_s: float = 0.0      # snapshot episodes: every task is born at t=0

    def __post_init__(self) -> None:
        if self.cycles <= 0:
            raise ConfigError(f"task {self.task_id}: cycles must be > 0")
        if self.size_bits <= 0:
            raise ConfigError(f"task {self.task_id}: size_bits must be > 0")
        if not 0 <= self.result_bits <= self.size_bits:
            raise ConfigError(f"task {self.task_id}: result_bits outside [0, size_bits]")
        if self.deadline_s <= 0:
            raise ConfigError(f"task {self.task_id}: deadline_s must be > 0")

    @property
    def subnet(self) -> int:
        return self.task_id[1]


@dataclass(frozen=True)
class Hop:
    """One directed link of a route."""

    src: str
    dst: str
    kind: HopKind
    subnet: Optional[int]  # owning subnet for intra/wan hops, None for backhaul

    @property
    def link_id(self) -> str:
        return f"{self.src}->{self.dst}"


Route = tuple[Hop, ...]


@dataclass(frozen=True)
class ResourcePool:
    """Communication resource plan: per-subnet pool sizes and the shared pool size."""

    k_s_count: int       # orthogonal resources per subnetwork (reused across subnets)
    k_p_count: int       # shared wide-area resources
    resource_bw_hz: float  # bandwidth of one resource


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario parameters. Defaults describe the reference industrial scenario."""

    n_subnets: int = 5
    tasks_per_subnet: int = 5
    sne_per_subnet: int = 15
    lc_per_subnet: int = 4
    hc_per_subnet: int = 1
    # processing power per unit kind, cycles/s
    powers_hz: dict = field(
        default_factory=lambda: {"lc": 2.5e9, "hc": 5e9, "edge": 7e10, "cloud": 1.5e11}
    )
    bw_s_hz: float = 1e8       # dedicated band per subnetwork
    bw_p_hz: float = 5e7       # shared band towards the wide-area network
    resource_bw_hz: float = 360e3  # one resource block: 12 subcarriers x 30 kHz
    k_s_count: int = 273
    k_p_count: int = 133
    mean_sinr_intra_db: float = 30.0
    mean_sinr_wan_db: float = 30.0
    ber: float = 0.0
    backhaul_rate_bps: float = 1e10  # fixed edge<->cloud wire
    episode_horizon_s: float = 0.1   # capacity window; equals the max deadline
    task_gen_split: tuple[float, float, float] = (0.6, 0.2, 0.2)  # SNE, LC, HC
    workload_range_cycles: tuple[float, float] = (2e7, 5e7)
    size_range_bits: tuple[float, float] = (7.5e5, 2.25e6)
    result_fraction: float = 0.15
    deadline_range_s: tuple[float, float] = (0.02, 0.1)
    penalty_m: float = 100.0
    slot_s: float = 5e-4

    def validate(self) -> None:
        """Raise ConfigError naming the first offending field."""
        if self.n_subnets < 1:
            raise ConfigError("n_subnets must be >= 1")
        if self.tasks_per_subnet < 1:
            raise ConfigError("tasks_per_subnet must be >= 1")
        for name in ("sne_per_subnet", "lc_per_subnet", "hc_per_subnet"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for kind in ("lc", "hc", "edge", "cloud"):
            if self.powers_hz.get(kind, 0.0) <= 0:
                raise ConfigError(f"powers_hz[{kind!r}] must be > 0")
        if self.resource_bw_hz <= 0:
            raise ConfigError("resource_bw_hz must be > 0")
        if self.k_s_count < 1 or self.k_p_count < 1:
            raise ConfigError("k_s_count and k_p_count must be >= 1")
        if self.k_s_count * self.resource_bw_hz > self.bw_s_hz:
            raise ConfigError("k_s_count * resource_bw_hz exceeds bw_s_hz")
        if self.k_p_count * self.resource_bw_hz > self.bw_p_hz:
            raise ConfigError("k_p_count * resource_bw_hz exceeds bw_p_hz")
        if not 0 <= self.ber < 1:
            raise ConfigError("ber must be in [0, 1)")
        if self.backhaul_rate_bps <= 0:
            raise ConfigError("backhaul_rate_bps must be > 0")
        if self.episode_horizon_s <= 0:
            raise ConfigError("episode_horizon_s must be > 0")
        if len(self.task_gen_split) != 3 or any(x < 0 for x in self.task_gen_split):
            raise ConfigError("task_gen_split needs 3 nonnegative fractions")
        if abs(sum(self.task_gen_split) - 1.0) > 1e-9:
            raise ConfigError("task_gen_split must sum to 1.0")
        for name in ("workload_range_cycles", "size_range_bits", "deadline_range_s"):
            lo, hi = getattr(self, name)
            if lo <= 0 or lo > hi:
                raise ConfigError(f"{name} must satisfy 0 < min <= max")
        if not 0 <= self.result_fraction <= 1:
            raise ConfigError("result_fraction must be in [0, 1]")
        if self.penalty_m <= 0:
            raise ConfigError("penalty_m must be > 0")
        if self.slot_s <= 0:
            raise ConfigError("slot_s must be > 0")

    @property
    def pool(self) -> ResourcePool:
        return ResourcePool(self.k_s_count, self.k_p_count, self.resource_bw_hz)

    def mean_sinr_linear(self, hop_kind: HopKind) -> float:
        db = self.mean_sinr_intra_db if hop_kind is HopKind.INTRA else self.mean_sinr_wan_db
        return 10.0 ** (db / 10.0)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown scenario field(s): {sorted(unknown)}")
        kwargs = dict(data)
        for name in ("task_gen_split", "workload_range_cycles", "size_range_bits",
                     "deadline_range_s"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


EDGE_ID = "edge"
CLOUD_ID = "cloud"


@dataclass(frozen=True)
class Topology:
    """Immutable unit inventory plus the route table and candidate sets."""

    cfg: ScenarioConfig
    units: dict            # unit id -> ComputeUnit, insertion ordered
    serving_lc: dict       # sne id -> lc id
    routes: dict           # (source id, unit id) -> Route
    candidates: dict       # source id -> tuple of candidate unit ids

    def route(self, source: str, unit: str) -> Route:
        return self.routes[(source, unit)]

    def links(self, kind: HopKind) -> list[Hop]:
        """Distinct hops of one kind appearing anywhere in the route table."""
        seen: dict[str, Hop] = {}
        for route in self.routes.values():
            for hop in route:
                if hop.kind is kind and hop.link_id not in seen:
                    seen[hop.link_id] = hop
        return sorted(seen.values(), key=lambda h: h.link_id)

    def processing_units(self) -> list[ComputeUnit]:
        return [u for u in self.units.values() if u.can_process]


def _unit_id(kind: UnitKind, subnet: int, index: int) -> str:
    return f"{kind.value}-{subnet}-{index}"


def build_topology(cfg: ScenarioConfig) -> Topology:
    """Construct all units, the SNE->LC serving map, and the full route table."""
    cfg.validate()
    horizon = cfg.episode_horizon_s
    units: dict[str, ComputeUnit] = {}

    def add(uid: str, kind: UnitKind, subnet: Optional[int], power: float) -> None:
        units[uid] = ComputeUnit(uid, kind, subnet, power, power * horizon)

    for n in range(cfg.n_subnets):
        for i in range(cfg.sne_per_subnet):
            add(_unit_id(UnitKind.SNE, n, i), UnitKind.SNE, n, 0.0)
        for i in range(cfg.lc_per_subnet):
            add(_unit_id(UnitKind.LC, n, i), UnitKind.LC, n, cfg.powers_hz["lc"])
        for i in range(cfg.hc_per_subnet):
            add(_unit_id(UnitKind.HC, n, i), UnitKind.HC, n, cfg.powers_hz["hc"])
    add(EDGE_ID, UnitKind.EDGE, None, cfg.powers_hz["edge"])
    add(CLOUD_ID, UnitKind.CLOUD, None, cfg.powers_hz["cloud"])

    serving_lc: dict[str, str] = {}
    routes: dict[tuple[str, str], Route] = {}
    candidates: dict[str, tuple[str, ...]] = {}

    for n in range(cfg.n_subnets):
        hc = _unit_id(UnitKind.HC, n, 0)  # first HC is the uplink hub
        wan = Hop(hc, EDGE_ID, HopKind.WAN, n)
        backhaul = Hop(EDGE_ID, CLOUD_ID, HopKind.BACKHAUL, None)

        for i in range(cfg.sne_per_subnet):
            sne = _unit_id(UnitKind.SNE, n, i)
            lc = _unit_id(UnitKind.LC, n, i % cfg.lc_per_subnet)
            serving_lc[sne] = lc
            to_lc = Hop(sne, lc, HopKind.INTRA, n)
            lc_to_hc = Hop(lc, hc, HopKind.INTRA, n)
            candidates[sne] = (lc, hc, EDGE_ID, CLOUD_ID)
            routes[(sne, lc)] = (to_lc,)
            routes[(sne, hc)] = (to_lc, lc_to_hc)
            routes[(sne, EDGE_ID)] = (to_lc, lc_to_hc, wan)
            routes[(sne, CLOUD_ID)] = (to_lc, lc_to_hc, wan, backhaul)

        for i in range(cfg.lc_per_subnet):
            lc = _unit_id(UnitKind.LC, n, i)
            lc_to_hc = Hop(lc, hc, HopKind.INTRA, n)
            candidates[lc] = (lc, hc, EDGE_ID, CLOUD_ID)
            routes[(lc, lc)] = ()
            routes[(lc, hc)] = (lc_to_hc,)
            routes[(lc, EDGE_ID)] = (lc_to_hc, wan)
            routes[(lc, CLOUD_ID)] = (lc_to_hc, wan, backhaul)

        for i in range(cfg.hc_per_subnet):
            hcu = _unit_id(UnitKind.HC, n, i)
            candidates[hcu] = (hcu, EDGE_ID, CLOUD_ID)
            routes[(hcu, hcu)] = ()
            if hcu == hc:
                routes[(hcu, EDGE_ID)] = (wan,)
                routes[(hcu, CLOUD_ID)] = (wan, backhaul)
            else:
                # secondary HCs relay through the hub like an LC would
                relay = Hop(hcu, hc, HopKind.INTRA, n)
                routes[(hcu, EDGE_ID)] = (relay, wan)
                routes[(hcu, CLOUD_ID)] = (relay, wan, backhaul)

    return Topology(cfg=cfg, units=units, serving_lc=serving_lc,
                    routes=routes, candidates=candidates)


def _largest_remainder_quota(fractions: tuple[float, ...], total: int) -> list[int]:
    """Integer quotas summing to `total`, each within 1 of its exact share."""
    exact = [f * total for f in fractions]
    quotas = [math.floor(x) for x in exact]
    leftover = total - sum(quotas)
    by_remainder = sorted(range(len(fractions)),
                          key=lambda k: (-(exact[k] - quotas[k]), k))
    for k in by_remainder[:leftover]:
        quotas[k] += 1
    return quotas


def sample_tasks(cfg: ScenarioConfig, rng: np.random.Generator) -> list[TaskSpec]:
    """Draw one episode's task set: exactly tasks_per_subnet tasks per subnetwork.

    Source kinds follow task_gen_split with largest-remainder rounding, so the
    per-subnet kind counts are exact up to rounding; the assignment of kinds to
    task indices and the source unit within a kind are drawn from `rng`.
    """
    cfg.validate()
    counts = {UnitKind.SNE: cfg.sne_per_subnet,
              UnitKind.LC: cfg.lc_per_subnet,
              UnitKind.HC: cfg.hc_per_subnet}
    tasks: list[TaskSpec] = []
    for n in range(cfg.n_subnets):
        quotas = _largest_remainder_quota(cfg.task_gen_split, cfg.tasks_per_subnet)
        kinds = [k for k, q in zip(TASK_SOURCE_KINDS, quotas) for _ in range(q)]
        rng.shuffle(kinds)
        for i in range(cfg.tasks_per_subnet):
            kind = kinds[i]
            source = _unit_id(kind, n, int(rng.integers(counts[kind])))
            cycles = float(rng.uniform(*cfg.workload_range_cycles))
            size = float(rng.uniform(*cfg.size_range_bits))
            deadline = float(rng.uniform(*cfg.deadline_range_s))
            tasks.append(TaskSpec(
                task_id=(i, n), source=source, cycles=cycles, size_bits=size,
                result_bits=cfg.result_fraction * size, deadline_s=deadline))
    return tasks
