"""Wolf-note simulation of a bowed or plucked string coupled to a plate body.

The main entry points are :func:`run_simulation` / :func:`run_all_notes`
for time-domain runs, :func:`evaluate` for the indicators, and the sweep
functions for placement maps and parameter scans.
"""

from .analysis import IndicatorParams, IndicatorReport, evaluate, wolf_indicator
from .config import SCENARIOS, build_scenario, load_config
from .errors import ConfigError, GridError, InstabilityError, SimulationError, WolfsimError
from .params import (
    BridgeParams,
    PlateParams,
    SimGridConfig,
    StringParams,
    SuppressorParams,
    derive_plate_coeffs,
    derive_string_coeffs,
)
from .simulator import PhysicalConfig, Recording, ScenarioConfig, run_all_notes, run_simulation
from .sweep import HeatMap, cross_sweep_two, placement_sweep, sensitivity_scan

__all__ = [
    "BridgeParams",
    "ConfigError",
    "GridError",
    "HeatMap",
    "IndicatorParams",
    "IndicatorReport",
    "InstabilityError",
    "PhysicalConfig",
    "PlateParams",
    "Recording",
    "SCENARIOS",
    "ScenarioConfig",
    "SimGridConfig",
    "SimulationError",
    "StringParams",
    "SuppressorParams",
    "WolfsimError",
    "build_scenario",
    "cross_sweep_two",
    "derive_plate_coeffs",
    "derive_string_coeffs",
    "evaluate",
    "load_config",
    "placement_sweep",
    "run_all_notes",
    "run_simulation",
    "sensitivity_scan",
    "wolf_indicator",
]
