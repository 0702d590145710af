"""Task offloading and resource allocation simulator for an IoT-edge-cloud
continuum: deadline-driven, time-minimizing, and random policies over a
shared OFDMA resource model, optimized with an elitist genetic algorithm."""

from .model import (ComputeUnit, ConfigError, Hop, HopKind, ResourcePool,
                    ScenarioConfig, TaskSpec, Topology, UnitKind,
                    build_topology, sample_tasks)
from .channel import (ChannelSnapshot, GrantError, InfeasibleLinkError,
                      draw_snapshot, link_rate, resource_rate,
                      transmission_time)
from .evaluator import (Allocation, AllocationEntry, ConstraintKind, TaskTimes,
                        Violation, check_constraints, process_time, task_times)
from .policies import (PolicyKind, objective_deterministic, objective_minimum,
                       penalty_beta, random_allocate)
from .solver import (Chromosome, GaConfig, decode, exhaustive_best, fitness,
                     run_ga)
from .metrics import (MetricsReport, build_report, jfi, local_ratio,
                      satisfaction_ratio, utilization)
from .harness import (EpisodeResult, SweepSpec, child_rng, load_config,
                      run_episode, run_sweep, tiny_config)

__version__ = "0.1.0"
