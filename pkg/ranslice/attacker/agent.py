"""The flooding adversary: demand selection, fake crafting, and learning."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from ..link import rate_for_rbs, required_rbs
from ..model import (
    ADVERSARY,
    DEFAULT_LINK,
    DEFAULT_RB_COUNT,
    LinkParams,
    Request,
    ResourcePool,
)
from ..rl import QHyperparams, QTable, epsilon_at, q_update, select_action
from ..traffic import TrafficConfig
from .limiter import RateLimiter, should_emit
from .sensing import SensingErrors, observe_free_rbs, occupancy_from_pool
from .weights import (
    AwState,
    WeightPolicy,
    WeightTableError,
    WeightTables,
    load_weight_table,
    update_aw,
    weight_from_policy,
)


class AttackStrategy(str, Enum):
    NONE = "none"
    QLEARNING = "qlearning"
    MINRES = "minres"
    RANDOM = "random"

    @classmethod
    def parse(cls, raw: str | "AttackStrategy") -> "AttackStrategy":
        if isinstance(raw, AttackStrategy):
            return raw
        try:
            return cls(str(raw).strip().lower())
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise ValueError(
                f"Unknown attack strategy {raw!r}; expected one of {choices}"
            ) from exc


class AttackerRewardMode(str, Enum):
    COUNT = "count"
    WEIGHT = "weight"


@dataclass(frozen=True)
class AttackConfig:
    strategy: AttackStrategy = AttackStrategy.QLEARNING
    fake_rate: float = 0.5
    weight_policy: WeightPolicy = WeightPolicy.LW
    aw3_decrease_prob: float = 0.4
    sensing: SensingErrors = field(default_factory=SensingErrors)
    reward_mode: AttackerRewardMode = AttackerRewardMode.WEIGHT
    weight_table: str | None = None
    high_weight_table: str | None = None

    def __post_init__(self) -> None:
        if self.fake_rate < 0:
            raise ValueError(f"fake_rate must be non-negative, got {self.fake_rate}")
        if not 0.0 <= self.aw3_decrease_prob <= 1.0:
            raise ValueError("aw3_decrease_prob must be in [0, 1]")

    @property
    def active(self) -> bool:
        return self.strategy is not AttackStrategy.NONE and self.fake_rate > 0

    @classmethod
    def disabled(cls) -> "AttackConfig":
        return cls(strategy=AttackStrategy.NONE)


def resolve_weight_tables(cfg: AttackConfig) -> WeightTables:
    """Return the embedded tables with any configured file replacements."""

    tables = WeightTables()
    if cfg.weight_table:
        tables = WeightTables(load_weight_table(cfg.weight_table, name="rdw"), tables.rdlw)
    if cfg.high_weight_table:
        tables = WeightTables(
            tables.rdw, load_weight_table(cfg.high_weight_table, name="rdlw")
        )
    return tables


def check_table_coverage(cfg: AttackConfig, tables: WeightTables, rb_count: int) -> None:
    """Reject resource-dependent policies whose table misses an RB state."""

    if cfg.weight_policy not in (WeightPolicy.RDW, WeightPolicy.RDLW):
        return
    table = tables.for_policy(cfg.weight_policy)
    if table.rb_states < rb_count:
        raise WeightTableError(
            f"{cfg.weight_policy.value} table {table.name} covers {table.rb_states} "
            f"RB states but the link has {rb_count} RBs"
        )


def _optimistic(_state: int, action: int) -> float:
    return 0.0 if action == 0 else 1.0


def init_attacker_table(total_rbs: int) -> QTable:
    """State ``i`` (sensed free RBs) offers demands ``0..i``; any demand starts at 1."""

    if total_rbs < 1:
        raise ValueError("total_rbs must be >= 1")

    def action_count(state: int) -> int:
        if not 0 <= state <= total_rbs:
            raise ValueError(f"Attacker state {state} outside [0, {total_rbs}]")
        return state + 1

    return QTable(action_count=action_count, initializer=_optimistic)


def choose_rb_demand(
    table: QTable, observed_free: int, epsilon: float, rng: np.random.Generator
) -> int:
    if observed_free < 0:
        raise ValueError("observed_free must be non-negative")
    if observed_free == 0:
        return 0
    return select_action(table, observed_free, epsilon, rng)


def plan_rb_demand(
    cfg: AttackConfig,
    observed_free: int,
    rng: np.random.Generator,
    *,
    table: QTable | None = None,
    epsilon: float = 0.0,
    total_rbs: int = DEFAULT_RB_COUNT,
) -> int:
    """RB count the next fake will ask for; 0 means stay silent.

    The random benchmark ignores what it sensed and draws from every RB.
    """

    if observed_free <= 0 or not cfg.active:
        return 0
    if cfg.strategy is AttackStrategy.MINRES:
        return 1
    if cfg.strategy is AttackStrategy.RANDOM:
        return int(rng.integers(1, total_rbs + 1))
    if table is None:
        raise ValueError("The Q-learning attack needs a Q-table")
    return choose_rb_demand(table, observed_free, epsilon, rng)


def build_fake_request(
    demand: int,
    slot: int,
    weight: int,
    traffic_cfg: TrafficConfig,
    rng: np.random.Generator,
    *,
    request_id: int,
    link: LinkParams = DEFAULT_LINK,
) -> Request:
    """A fake asking for exactly ``demand`` RBs and the least CPU and power."""

    lifetime = int(rng.integers(traffic_cfg.lifetime_range[0], traffic_cfg.lifetime_range[1] + 1))
    offset = int(
        rng.integers(
            traffic_cfg.deadline_offset_range[0], traffic_cfg.deadline_offset_range[1] + 1
        )
    )
    snr = float(rng.uniform(*traffic_cfg.snr_range))
    return Request(
        id=request_id,
        origin=ADVERSARY,
        is_fake=True,
        weight=weight,
        min_rate=rate_for_rbs(demand, snr, c=link.c),
        min_processing=traffic_cfg.processing_range[0],
        min_comm_power=traffic_cfg.comm_power_range[0],
        snr=snr,
        lifetime=lifetime,
        deadline_slot=slot + offset,
        arrival_slot=slot,
    )


def craft_fake_request(
    cfg: AttackConfig,
    observed_free: int,
    slot: int,
    traffic_cfg: TrafficConfig,
    rng: np.random.Generator,
    *,
    table: QTable | None = None,
    epsilon: float = 0.0,
    aw: AwState | None = None,
    tables: WeightTables | None = None,
    request_id: int = 0,
    ids: Iterator[int] | None = None,
    link: LinkParams = DEFAULT_LINK,
) -> Request | None:
    """Plan the demand, pick the weight, then build the fake.

    With ``ids`` the request id is drawn from it, and only when a fake is
    actually built.
    """

    demand = plan_rb_demand(
        cfg, observed_free, rng, table=table, epsilon=epsilon, total_rbs=link.rb_count
    )
    if demand == 0:
        return None
    weight = weight_from_policy(
        cfg.weight_policy, observed_free, aw or AwState(), tables or WeightTables(), rng
    )
    if ids is not None:
        request_id = next(ids)
    return build_fake_request(
        demand, slot, weight, traffic_cfg, rng, request_id=request_id, link=link
    )


def attacker_reward(served_fakes: Sequence[Request], mode: AttackerRewardMode) -> float:
    if mode is AttackerRewardMode.COUNT:
        return float(len(served_fakes))
    return float(sum(req.weight for req in served_fakes))


def attacker_feedback(
    served_fakes: Sequence[Request],
    cfg: AttackConfig,
    table: QTable,
    prev_state: int,
    action: int,
    new_state: int,
    hp: QHyperparams,
) -> QTable:
    reward = attacker_reward(served_fakes, cfg.reward_mode)
    return q_update(table, prev_state, action, reward, new_state, hp)


@dataclass
class FloodingAttacker:
    """One run's adversary: its Q-table, rate limiter, AW state and random stream.

    :meth:`act` runs before the scheduler in each slot and :meth:`observe`
    after it. Both the learner and the adaptive weight only judge the fake
    emitted in the same slot; older fakes still waiting earn nothing. A slot
    in which the limiter blocks the attacker leaves no transition to learn
    from.
    """

    cfg: AttackConfig
    traffic: TrafficConfig
    rng: np.random.Generator
    hp: QHyperparams = field(default_factory=QHyperparams)
    link: LinkParams = DEFAULT_LINK
    tables: WeightTables = field(default_factory=WeightTables)
    limiter: RateLimiter = field(default_factory=RateLimiter)
    aw: AwState = field(default_factory=AwState)
    table: QTable = field(init=False)
    _pending: tuple[int, int, Request | None] | None = field(
        default=None, init=False, repr=False
    )

    def __post_init__(self) -> None:
        self.table = init_attacker_table(self.link.rb_count)
        check_table_coverage(self.cfg, self.tables, self.link.rb_count)

    def act(self, slot: int, pool: ResourcePool, ids: Iterator[int]) -> Request | None:
        """Sense ``pool`` and possibly return one fake request for this slot.

        ``ids`` is only advanced when a fake is actually built.
        """

        self._pending = None
        if not self.cfg.active:
            return None
        self.limiter.tick()
        if not should_emit(self.limiter, self.cfg.fake_rate):
            return None
        observed = observe_free_rbs(occupancy_from_pool(pool), self.cfg.sensing, self.rng)
        fake = craft_fake_request(
            self.cfg,
            observed,
            slot,
            self.traffic,
            self.rng,
            table=self.table,
            epsilon=epsilon_at(slot, self.hp),
            aw=self.aw,
            tables=self.tables,
            link=self.link,
            ids=ids,
        )
        demand = 0 if fake is None else required_rbs(fake, self.link)
        self._pending = (observed, demand, fake)
        if fake is not None:
            self.limiter.record_emission()
        return fake

    def observe(self, pool: ResourcePool, served_fakes: Sequence[Request]) -> None:
        """Learn whether this slot's own fake was among those served."""

        pending, self._pending = self._pending, None
        if pending is None:
            return
        observed, demand, fake = pending
        own = [req for req in served_fakes if fake is not None and req.id == fake.id]
        if self.cfg.strategy is AttackStrategy.QLEARNING:
            new_state = observe_free_rbs(
                occupancy_from_pool(pool), self.cfg.sensing, self.rng
            )
            attacker_feedback(
                own, self.cfg, self.table, observed, demand, new_state, self.hp
            )
        if fake is not None and self.cfg.weight_policy.adaptive:
            self.aw = update_aw(
                self.aw,
                bool(own),
                self.cfg.weight_policy,
                self.cfg.aw3_decrease_prob,
                self.rng,
            )
