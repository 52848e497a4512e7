"""Flooding adversary: sensing, rate control, demand learning and fake weights."""

from .agent import (
    AttackConfig,
    AttackerRewardMode,
    AttackStrategy,
    FloodingAttacker,
    attacker_feedback,
    choose_rb_demand,
    craft_fake_request,
    init_attacker_table,
    resolve_weight_tables,
)
from .limiter import RateLimiter, should_emit
from .sensing import SensingErrors, observe_free_rbs, occupancy_from_pool
from .weights import (
    HIGH_WEIGHT_TARGET,
    RDLW_TABLE,
    RDW_TABLE,
    UNIFORM_TARGET,
    AwState,
    WeightPolicy,
    WeightTable,
    WeightTableError,
    WeightTables,
    aw_stationary_mix,
    aw_transition_matrix,
    load_weight_table,
    update_aw,
    validate_weight_table,
    weight_from_policy,
)

__all__ = [
    "AttackConfig",
    "AttackStrategy",
    "AttackerRewardMode",
    "AwState",
    "FloodingAttacker",
    "HIGH_WEIGHT_TARGET",
    "RDLW_TABLE",
    "RDW_TABLE",
    "RateLimiter",
    "SensingErrors",
    "UNIFORM_TARGET",
    "WeightPolicy",
    "WeightTable",
    "WeightTableError",
    "WeightTables",
    "attacker_feedback",
    "aw_stationary_mix",
    "aw_transition_matrix",
    "choose_rb_demand",
    "craft_fake_request",
    "init_attacker_table",
    "load_weight_table",
    "observe_free_rbs",
    "occupancy_from_pool",
    "resolve_weight_tables",
    "should_emit",
    "update_aw",
    "validate_weight_table",
    "weight_from_policy",
]
