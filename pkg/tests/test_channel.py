import math

import numpy as np
import pytest

from continuum import (GrantError, HopKind, InfeasibleLinkError,
                       ScenarioConfig, build_topology, child_rng,
                       draw_snapshot, link_rate, resource_rate,
                       transmission_time)
from continuum.model import Hop
from dataclasses import replace

RATE_1000 = 3588201.4531809576  # 360 kHz, gamma 1000, ber 0
RATE_BER = 180000.0             # 360 kHz, gamma 1, ber 0.5


def test_resource_rate_hand_values():
    assert resource_rate(360e3, 1000.0, 0.0) == pytest.approx(RATE_1000, rel=1e-12)
    assert resource_rate(360e3, 1.0, 0.5) == pytest.approx(RATE_BER, rel=1e-12)
    assert resource_rate(1e6, 0.0, 0.0) == 0.0


def test_resource_rate_argument_errors():
    with pytest.raises(ValueError):
        resource_rate(-1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        resource_rate(360e3, -0.1, 0.0)
    with pytest.raises(ValueError):
        resource_rate(360e3, 1.0, 1.0)


def test_resource_rate_monotonicity(rng):
    for _ in range(200):
        bw = rng.uniform(1e3, 1e7)
        g1, g2 = sorted(rng.uniform(0.01, 1e4, size=2))
        b1, b2 = sorted(rng.uniform(0.0, 0.99, size=2))
        assert resource_rate(bw, g2 + 1e-6, b1) > resource_rate(bw, g1, b1)
        assert resource_rate(bw, g1, b2 + 1e-9) <= resource_rate(bw, g1, b1)


def test_snapshot_exponential_means():
    cfg = replace(ScenarioConfig(), n_subnets=2, mean_sinr_wan_db=0.0)
    topo = build_topology(cfg)
    rng = np.random.default_rng(5)
    intra = rng.exponential(cfg.mean_sinr_linear(HopKind.INTRA), size=100_000)
    wan = rng.exponential(cfg.mean_sinr_linear(HopKind.WAN), size=100_000)
    assert np.mean(intra) == pytest.approx(1000.0, rel=0.02)
    assert np.mean(wan) == pytest.approx(1.0, rel=0.02)
    # the deployed snapshot draws from the same family
    snap = draw_snapshot(topo, cfg, child_rng(0, "channel"))
    pooled = np.concatenate([g for g in snap.gamma.values()])
    assert np.all(pooled >= 0)


def test_snapshot_covers_every_link_and_is_deterministic(default_cfg, topology):
    a = draw_snapshot(topology, default_cfg, child_rng(9, "channel"))
    b = draw_snapshot(topology, default_cfg, child_rng(9, "channel"))
    assert set(a.gamma) == set(b.gamma)
    for link in a.gamma:
        assert np.array_equal(a.gamma[link], b.gamma[link])
    for hop in topology.links(HopKind.INTRA):
        assert a.gamma[hop.link_id].shape == (default_cfg.k_s_count,)
    for hop in topology.links(HopKind.WAN):
        assert a.gamma[hop.link_id].shape == (default_cfg.k_p_count,)


def test_link_rate_sums_resources(default_cfg, topology, episode):
    _, snap = episode
    hop = topology.route("sne-0-0", "hc-0-0")[0]
    grant = (0, 5, 17)
    total = link_rate(hop, grant, snap, default_cfg)
    parts = sum(resource_rate(default_cfg.resource_bw_hz,
                              snap.sinr(hop.link_id, k), default_cfg.ber)
                for k in grant)
    assert total == pytest.approx(parts, rel=1e-12)
    assert link_rate(hop, (), snap, default_cfg) == 0.0


def test_link_rate_bad_index(default_cfg, topology, episode):
    _, snap = episode
    hop = topology.route("sne-0-0", "hc-0-0")[0]
    with pytest.raises(GrantError):
        link_rate(hop, (default_cfg.k_s_count,), snap, default_cfg)


def test_backhaul_rate_fixed(default_cfg, topology, episode):
    _, snap = episode
    backhaul = topology.route("hc-0-0", "cloud")[-1]
    assert backhaul.kind is HopKind.BACKHAUL
    assert link_rate(backhaul, (), snap, default_cfg) == default_cfg.backhaul_rate_bps
    assert link_rate(backhaul, (1, 2, 3), snap, default_cfg) == default_cfg.backhaul_rate_bps


def test_transmission_time_single_hop(default_cfg, topology, episode):
    _, snap = episode
    hop = topology.route("sne-0-0", "hc-0-0")[0]
    grant = tuple(range(10))
    rate = link_rate(hop, grant, snap, default_cfg)
    t = transmission_time(1e6, (hop,), (grant,), snap, default_cfg)
    assert t == pytest.approx(1e6 / rate, rel=1e-12)
    assert transmission_time(0.0, (hop,), (grant,), snap, default_cfg) == 0.0


def test_transmission_time_accumulates_hops(default_cfg, topology, episode):
    _, snap = episode
    route = topology.route("sne-0-0", "hc-0-0")
    grants = ((0, 1, 2), (3, 4))
    expected = sum(1e6 / link_rate(h, g, snap, default_cfg)
                   for h, g in zip(route, grants))
    got = transmission_time(1e6, route, grants, snap, default_cfg)
    assert got == pytest.approx(expected, rel=1e-12)


def test_transmission_time_homogeneous_in_bits(default_cfg, topology, episode):
    _, snap = episode
    route = topology.route("sne-0-0", "cloud")
    grants = ((0, 1), (2, 3), (4, 5, 6))
    one = transmission_time(1e6, route, grants, snap, default_cfg)
    two = transmission_time(2e6, route, grants, snap, default_cfg)
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_transmission_time_zero_rate_hop(default_cfg, topology, episode):
    _, snap = episode
    route = topology.route("sne-0-0", "hc-0-0")
    with pytest.raises(InfeasibleLinkError):
        transmission_time(1e6, route, ((0, 1), ()), snap, default_cfg)


def test_fixed_rate_two_hop_example(default_cfg):
    # 1 Mbit over two hops of exactly 1e7 bit/s each -> 0.2 s
    hop = Hop("a", "b", HopKind.BACKHAUL, None)
    cfg = replace(default_cfg, backhaul_rate_bps=1e7)
    t = transmission_time(1e6, (hop, hop), (), None, cfg)
    assert t == pytest.approx(0.2, rel=1e-12)
