"""Value/cost trade-off model of temporal-network growth.

Analytic curves and scenario classification live in :mod:`.model`, the
stochastic growth engine in :mod:`.simulator`, numerical oracles and phase
sweeps in :mod:`.analysis`.
"""

from .errors import CapacityError, ConfigError, DomainError, InvariantViolation
from .model import (
    DerivedConstants,
    GrowthStatus,
    ModelParams,
    Scenario,
    ScenarioKind,
    characteristic_time,
    classify_scenario,
    constant_c,
    cost_curve,
    crossover_time,
    derive_constants,
    growth_status,
    net_value,
    value_curve,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "DerivedConstants",
    "DomainError",
    "GrowthStatus",
    "InvariantViolation",
    "ModelParams",
    "Scenario",
    "ScenarioKind",
    "characteristic_time",
    "classify_scenario",
    "constant_c",
    "cost_curve",
    "crossover_time",
    "derive_constants",
    "growth_status",
    "net_value",
    "value_curve",
    "__version__",
]
