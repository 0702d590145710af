"""Fading draws and rate/time computations for communication links.

Fading is Rayleigh in amplitude, so the per-resource SINR is exponentially
distributed around the configured linear mean. One snapshot is drawn per
episode and held fixed: every (link, resource) pair gets an independent draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Hop, HopKind, ScenarioConfig, Topology


class GrantError(ValueError):
    """A granted resource index does not exist in the link's pool."""


class InfeasibleLinkError(RuntimeError):
    """A radio hop has zero aggregate rate; the transfer can never finish."""


@dataclass(frozen=True)
class ChannelSnapshot:
    """Per-link arrays of linear SINR, indexed by resource. Immutable."""

    gamma: dict  # link id -> np.ndarray of linear SINR, one entry per resource

    def sinr(self, link_id: str, resource: int) -> float:
        return float(self.gamma[link_id][resource])


def draw_snapshot(topology: Topology, cfg: ScenarioConfig,
                  rng: np.random.Generator) -> ChannelSnapshot:
    """Draw i.i.d. exponential SINR for every hop in the route table.

    Intra-subnet links get k_s_count entries at the intra mean; WAN links get
    k_p_count entries at the WAN mean. Backhaul hops carry no fading state.
    """
    gamma: dict[str, np.ndarray] = {}
    for hop in topology.links(HopKind.INTRA):
        gamma[hop.link_id] = rng.exponential(
            cfg.mean_sinr_linear(HopKind.INTRA), size=cfg.k_s_count)
    for hop in topology.links(HopKind.WAN):
        gamma[hop.link_id] = rng.exponential(
            cfg.mean_sinr_linear(HopKind.WAN), size=cfg.k_p_count)
    for arr in gamma.values():
        arr.flags.writeable = False
    return ChannelSnapshot(gamma=gamma)


def resource_rate(bw_hz: float, gamma_linear: float, ber: float) -> float:
    """Achievable rate of one resource in bit/s: BW * log2(1 + SINR) * (1 - BER)."""
    if bw_hz <= 0:
        raise ValueError(f"bw_hz must be > 0, got {bw_hz}")
    if gamma_linear < 0:
        raise ValueError(f"gamma_linear must be >= 0, got {gamma_linear}")
    if not 0 <= ber < 1:
        raise ValueError(f"ber must be in [0, 1), got {ber}")
    return bw_hz * math.log2(1.0 + gamma_linear) * (1.0 - ber)


def link_rate(hop: Hop, granted: tuple, snapshot: ChannelSnapshot,
              cfg: ScenarioConfig) -> float:
    """Aggregate rate of a hop: the sum over its granted resources.

    Backhaul hops run at the configured fixed rate regardless of grants.
    """
    if hop.kind is HopKind.BACKHAUL:
        return cfg.backhaul_rate_bps
    gamma = snapshot.gamma[hop.link_id]
    pool_size = gamma.shape[0]
    total = 0.0
    for k in granted:
        if not 0 <= k < pool_size:
            raise GrantError(f"resource {k} outside pool of size {pool_size} "
                             f"on link {hop.link_id}")
        total += resource_rate(cfg.resource_bw_hz, float(gamma[k]), cfg.ber)
    return total


def transmission_time(bits: float, route: tuple, grants: tuple,
                      snapshot: ChannelSnapshot, cfg: ScenarioConfig) -> float:
    """Time to push `bits` across every hop of a route, in seconds.

    `grants` holds one resource-index tuple per radio hop, in route order;
    backhaul hops take no grant. Raises InfeasibleLinkError if any radio hop
    has zero aggregate rate (the caller treats that as a deadline miss).
    """
    if bits < 0:
        raise ValueError(f"bits must be >= 0, got {bits}")
    if bits == 0:
        return 0.0
    radio_hops = [h for h in route if h.kind is not HopKind.BACKHAUL]
    if len(grants) != len(radio_hops):
        raise GrantError(f"expected {len(radio_hops)} grants for route, "
                         f"got {len(grants)}")
    total = 0.0
    gi = 0
    for hop in route:
        if hop.kind is HopKind.BACKHAUL:
            rate = cfg.backhaul_rate_bps
        else:
            rate = link_rate(hop, grants[gi], snapshot, cfg)
            gi += 1
        if rate <= 0.0:
            raise InfeasibleLinkError(f"zero rate on link {hop.link_id}")
        total += bits / rate
    return total
