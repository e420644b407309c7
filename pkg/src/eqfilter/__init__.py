"""Equivariant filter for systems on homogeneous spaces, with SE(2) localisation."""

from .charts import Chart, component_chart, exponential_chart, transition_matrix
from .errors import ConfigError, CutLocus, NonFiniteState, OriginMismatch
from .filter import FilterState, GainConfig, filter_step, state_estimate
from .lie import GroupElement
from .scenario import ScenarioConfig, default_scenario
from .sim import RunRecord, run
from .symmetry import run_equivalence_experiment, transport_filter
from .system import LandmarkSet, SE2Localisation

__all__ = [
    "Chart",
    "ConfigError",
    "CutLocus",
    "FilterState",
    "GainConfig",
    "GroupElement",
    "LandmarkSet",
    "NonFiniteState",
    "OriginMismatch",
    "RunRecord",
    "SE2Localisation",
    "ScenarioConfig",
    "component_chart",
    "default_scenario",
    "exponential_chart",
    "filter_step",
    "run",
    "run_equivalence_experiment",
    "state_estimate",
    "transition_matrix",
    "transport_filter",
]
