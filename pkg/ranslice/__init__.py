"""5G RAN network slicing simulator with an RL flooding adversary."""

from .attacker import AttackConfig, AttackStrategy, SensingErrors, WeightPolicy
from .config import ConfigurationError, load_sim_config, sim_config_from_dict
from .engine import (
    MetricsReport,
    SimConfig,
    SliceSimulator,
    UndefinedRatioError,
    compute_ratio,
    report_to_dict,
    run,
    run_with_reference,
)
from .model import (
    ADVERSARY,
    RATE_PER_RB,
    AccountingError,
    ActiveGrant,
    AllocationError,
    DomainError,
    LinkParams,
    Request,
    ResourcePool,
)
from .rl import QHyperparams, QTable
from .schemes import Scheme
from .traffic import TrafficConfig

__all__ = [
    "ADVERSARY",
    "AccountingError",
    "ActiveGrant",
    "AllocationError",
    "AttackConfig",
    "AttackStrategy",
    "ConfigurationError",
    "DomainError",
    "LinkParams",
    "MetricsReport",
    "QHyperparams",
    "QTable",
    "RATE_PER_RB",
    "Request",
    "ResourcePool",
    "Scheme",
    "SensingErrors",
    "SimConfig",
    "SliceSimulator",
    "TrafficConfig",
    "UndefinedRatioError",
    "WeightPolicy",
    "compute_ratio",
    "load_sim_config",
    "report_to_dict",
    "run",
    "run_with_reference",
    "sim_config_from_dict",
]

__version__ = "0.1.0"
