import numpy as np
import pytest

from continuum import (GaConfig, ScenarioConfig, build_topology, child_rng,
                       draw_snapshot, sample_tasks)
from continuum.harness import tiny_config


@pytest.fixture(scope="session")
def default_cfg():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def topology(default_cfg):
    return build_topology(default_cfg)


@pytest.fixture(scope="session")
def episode(default_cfg, topology):
    """One fixed default-scale episode: (tasks, snapshot)."""
    tasks = sample_tasks(default_cfg, child_rng(0, "tasks"))
    snapshot = draw_snapshot(topology, default_cfg, child_rng(0, "channel"))
    return tasks, snapshot


@pytest.fixture(scope="session")
def tiny():
    """Tiny enumerable scenario: (cfg, topology, tasks, snapshot)."""
    cfg = tiny_config()
    topo = build_topology(cfg)
    tasks = sample_tasks(cfg, child_rng(0, "tasks"))
    snap = draw_snapshot(topo, cfg, child_rng(0, "channel"))
    return cfg, topo, tasks, snap


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_ga():
    """Reduced GA budget for unit tests; acceptance uses the defaults."""
    return GaConfig(population=80, generations=5)
