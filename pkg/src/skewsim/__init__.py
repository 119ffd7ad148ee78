"""skewsim: cycle-stepped simulator of a skew-oblivious data-routing
pipeline with dynamically scheduled secondary processing elements."""

from .analyzer import bram_capacity, pe_counts, select_implementation, select_secpe_count
from .config import ArchConfig, ConfigError, load_config, validate_config
from .engine import active_core, run_simulation
from .types import SimMetrics, TupleRecord

__version__ = "0.1.0"

__all__ = [
    "ArchConfig",
    "ConfigError",
    "SimMetrics",
    "TupleRecord",
    "active_core",
    "bram_capacity",
    "load_config",
    "pe_counts",
    "run_simulation",
    "select_implementation",
    "select_secpe_count",
    "validate_config",
]
