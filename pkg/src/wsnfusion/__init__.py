"""Clustered wireless sensor network simulator with tree routing and neural data fusion."""

from .config import SimConfig, load_config
from .energy import EnergyBreakdown, RadioParams
from .metrics import RoundMetrics, RunSummary, compare_runs
from .sim import NodeState, SimResult, run_simulation

__all__ = [
    "EnergyBreakdown",
    "NodeState",
    "RadioParams",
    "RoundMetrics",
    "RunSummary",
    "SimConfig",
    "SimResult",
    "compare_runs",
    "load_config",
    "run_simulation",
]

__version__ = "0.1.0"
