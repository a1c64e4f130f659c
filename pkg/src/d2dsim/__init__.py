"""D2D multicast underlay spectrum-sharing simulator and solvers."""

from .config import ScenarioConfig, load_config, parse_config
from .gains import GainTable, sample_gains
from .harness import PointMetrics, Sweep, run_point, run_sweep
from .matching import hungarian_match
from .metrics import Assignment, PowerProfile, outage_probability
from .power import corner_search_gk2, pair_power, stim_channel
from .topology import Topology, generate_topology

__all__ = [
    "ScenarioConfig", "load_config", "parse_config",
    "Topology", "generate_topology",
    "GainTable", "sample_gains",
    "Assignment", "PowerProfile", "outage_probability",
    "hungarian_match", "pair_power", "corner_search_gk2", "stim_channel",
    "PointMetrics", "Sweep", "run_point", "run_sweep",
]

__version__ = "0.1.0"
