"""Slot-stepped simulation of gNodeB admission under a flooding attack.

Each slot runs the same phases in order: grants ending now are released,
requests past their deadline leave the waiting list, real arrivals join it,
the adversary may add one fake, the scheme admits what it chooses, and both
learners see the outcome. Rewards are only counted in the final
``measure_window`` slots.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from .attacker import AttackConfig, FloodingAttacker, resolve_weight_tables
from .events import EventKind, SlotEvent, SlotEventLog
from .model import MAX_WEIGHT, AccountingError, ActiveGrant, LinkParams, Request, ResourcePool
from .resources import check_conservation, release
from .rl import QHyperparams
from .schemes import ActiveSet, Decision, Scheduler, Scheme
from .traffic import TrafficConfig, generate_arrivals

logger = logging.getLogger(__name__)


class UndefinedRatioError(RuntimeError):
    """Raised when the no-attack reference earned no reward."""


@dataclass(frozen=True)
class SimConfig:
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    scheme: Scheme = Scheme.QLEARNING
    gnb_hp: QHyperparams = field(default_factory=QHyperparams)
    attacker_hp: QHyperparams = field(default_factory=QHyperparams)
    total_slots: int = 10_000
    measure_window: int = 1_000
    link: LinkParams = field(default_factory=LinkParams)
    seed: int = 0
    check_invariants: bool = False

    def __post_init__(self) -> None:
        if self.total_slots < 0:
            raise ValueError(f"total_slots must be non-negative, got {self.total_slots}")
        if self.measure_window < 0:
            raise ValueError(f"measure_window must be non-negative, got {self.measure_window}")
        if self.measure_window > self.total_slots:
            raise ValueError(
                f"measure_window ({self.measure_window}) exceeds total_slots "
                f"({self.total_slots})"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @property
    def window_start(self) -> int:
        return self.total_slots - self.measure_window

    def without_attack(self) -> "SimConfig":
        return replace(self, attack=AttackConfig.disabled())


@dataclass(frozen=True)
class MetricsReport:
    total_reward: int = 0
    real_reward: int = 0
    fake_reward: int = 0
    requested_real_reward: int = 0
    requested_fake_reward: int = 0
    real_served: int = 0
    fake_served: int = 0
    real_arrivals: int = 0
    fake_emitted: int = 0
    fake_weight_histogram: tuple[int, ...] = (0,) * MAX_WEIGHT
    ratio_percent: float | None = None

    def __post_init__(self) -> None:
        if self.total_reward != self.real_reward + self.fake_reward:
            raise AccountingError(
                f"Reward split broken: total {self.total_reward} != real "
                f"{self.real_reward} + fake {self.fake_reward}"
            )


@dataclass(frozen=True)
class SlotOutcome:
    slot: int
    released: tuple[ActiveGrant, ...]
    expired: tuple[Request, ...]
    arrivals: tuple[Request, ...]
    fake: Request | None
    decision: Decision
    pool: ResourcePool


@dataclass
class _Tally:
    real_reward: int = 0
    fake_reward: int = 0
    requested_real: int = 0
    requested_fake: int = 0
    real_served: int = 0
    fake_served: int = 0
    real_arrivals: int = 0
    fake_emitted: int = 0
    histogram: list[int] = field(default_factory=lambda: [0] * MAX_WEIGHT)


def spawn_streams(
    seed: int,
) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent traffic, attacker, and scheduler streams for one run."""

    traffic, attacker, scheduler = np.random.SeedSequence(seed).spawn(3)
    return (
        np.random.default_rng(traffic),
        np.random.default_rng(attacker),
        np.random.default_rng(scheduler),
    )


class SliceSimulator:
    """Owns every piece of mutable state of one run.

    ``arrivals`` replaces the random traffic with a fixed schedule mapping a
    slot to the real requests arriving in it.
    """

    def __init__(
        self,
        cfg: SimConfig,
        *,
        arrivals: Mapping[int, Sequence[Request]] | None = None,
        event_log: SlotEventLog | None = None,
    ) -> None:
        self.cfg = cfg
        self.event_log = event_log
        traffic_rng, attacker_rng, scheduler_rng = spawn_streams(cfg.seed)
        self._traffic_rng = traffic_rng
        self._use_script = arrivals is not None
        self._scripted = {slot: tuple(reqs) for slot, reqs in (arrivals or {}).items()}
        first_id = 0
        if arrivals is not None:
            first_id = 1 + max(
                (req.id for reqs in self._scripted.values() for req in reqs), default=-1
            )
        self._ids = itertools.count(first_id)
        self.pool = ResourcePool.full(cfg.link.rb_count)
        self.active = ActiveSet()
        self.grants: dict[int, ActiveGrant] = {}
        self._ending: dict[int, list[ActiveGrant]] = defaultdict(list)
        self._served: set[int] = set()
        self.scheduler = Scheduler(cfg.scheme, scheduler_rng, cfg.gnb_hp, cfg.link)
        self.attacker = FloodingAttacker(
            cfg.attack,
            cfg.traffic,
            attacker_rng,
            cfg.attacker_hp,
            cfg.link,
            tables=resolve_weight_tables(cfg.attack),
        )
        self._tally = _Tally()

    def _log(self, event: SlotEvent) -> None:
        if self.event_log is not None:
            self.event_log.emit(event)

    def _arrivals(self, slot: int) -> tuple[Request, ...]:
        if self._use_script:
            scripted = self._scripted.get(slot, ())
            for req in scripted:
                if req.arrival_slot != slot:
                    raise ValueError(
                        f"Scripted request {req.id} arrives at {req.arrival_slot}, "
                        f"scheduled for slot {slot}"
                    )
            return scripted
        return tuple(generate_arrivals(slot, self.cfg.traffic, self._traffic_rng, self._ids))

    def step(self, t: int) -> SlotOutcome:
        # 1. grants whose lifetime ends now hand their resources back
        released = tuple(self._ending.pop(t, ()))
        if released:
            self.pool = release(self.pool, released)
            for grant in released:
                del self.grants[grant.request_id]
                self._log(SlotEvent.for_grant(t, EventKind.RELEASE, grant))

        # 2. requests past their deadline leave the waiting list
        expired = tuple(self.active.drop_expired(t))
        for req in expired:
            self._log(SlotEvent.for_request(t, EventKind.EXPIRE, req, self.cfg.link))

        # 3. real arrivals
        arrivals = self._arrivals(t)
        for req in arrivals:
            self.active.add(req)
            self._log(SlotEvent.for_request(t, EventKind.ARRIVAL, req, self.cfg.link))

        # 4. the adversary senses the pool before scheduling
        fake = self.attacker.act(t, self.pool, self._ids)
        if fake is not None:
            self.active.add(fake)
            self._log(SlotEvent.for_request(t, EventKind.FAKE, fake, self.cfg.link))

        # 5. admission
        decision = self.scheduler.decide(self.active, self.pool, t)
        self.pool = decision.pool
        for admission in decision.admitted:
            self._admit(t, admission.request, admission.grant)

        # 6. the adversary learns from this slot's served fakes
        served_fakes = [item.request for item in decision.admitted if item.request.is_fake]
        self.attacker.observe(self.pool, served_fakes)

        if self.cfg.check_invariants:
            check_conservation(self.pool, self.grants.values())

        # 7. metrics
        if t >= self.cfg.window_start:
            self._accumulate(arrivals, fake, decision)

        return SlotOutcome(
            slot=t,
            released=released,
            expired=expired,
            arrivals=arrivals,
            fake=fake,
            decision=decision,
            pool=self.pool,
        )

    def _admit(self, t: int, request: Request, grant: ActiveGrant) -> None:
        if self.cfg.check_invariants:
            if request.id in self._served:
                raise AccountingError(f"Request {request.id} served twice")
            if not request.arrival_slot <= t <= request.deadline_slot:
                raise AccountingError(
                    f"Request {request.id} served at slot {t} outside "
                    f"[{request.arrival_slot}, {request.deadline_slot}]"
                )
            self._served.add(request.id)
        self.active.remove(request.id)
        self.grants[request.id] = grant
        self._ending[grant.end_slot].append(grant)
        self._log(SlotEvent.for_request(t, EventKind.ADMIT, request, self.cfg.link))

    def _accumulate(
        self, arrivals: Sequence[Request], fake: Request | None, decision: Decision
    ) -> None:
        tally = self._tally
        tally.real_arrivals += len(arrivals)
        tally.requested_real += sum(req.weight for req in arrivals)
        if fake is not None:
            tally.fake_emitted += 1
            tally.requested_fake += fake.weight
            tally.histogram[fake.weight - 1] += 1
        for admission in decision.admitted:
            request = admission.request
            if request.is_fake:
                tally.fake_reward += request.weight
                tally.fake_served += 1
            else:
                tally.real_reward += request.weight
                tally.real_served += 1

    def report(self) -> MetricsReport:
        tally = self._tally
        return MetricsReport(
            total_reward=tally.real_reward + tally.fake_reward,
            real_reward=tally.real_reward,
            fake_reward=tally.fake_reward,
            requested_real_reward=tally.requested_real,
            requested_fake_reward=tally.requested_fake,
            real_served=tally.real_served,
            fake_served=tally.fake_served,
            real_arrivals=tally.real_arrivals,
            fake_emitted=tally.fake_emitted,
            fake_weight_histogram=tuple(tally.histogram),
        )

    def run(self) -> MetricsReport:
        cfg = self.cfg
        logger.debug(
            "Starting run: seed=%d scheme=%s attack=%s rate=%s slots=%d",
            cfg.seed,
            cfg.scheme.value,
            cfg.attack.strategy.value,
            cfg.attack.fake_rate,
            cfg.total_slots,
        )
        for t in range(cfg.total_slots):
            self.step(t)
        report = self.report()
        logger.debug(
            "Finished run: seed=%d total=%d real=%d fake=%d",
            cfg.seed,
            report.total_reward,
            report.real_reward,
            report.fake_reward,
        )
        return report


def run(cfg: SimConfig, *, event_log: SlotEventLog | None = None) -> MetricsReport:
    return SliceSimulator(cfg, event_log=event_log).run()


def compute_ratio(attack_report: MetricsReport, no_attack_report: MetricsReport) -> float:
    """Real reward under attack as a percentage of the no-attack total."""

    if no_attack_report.total_reward <= 0:
        raise UndefinedRatioError(
            "No-attack reference earned no reward; the ratio is undefined"
        )
    return 100.0 * attack_report.real_reward / no_attack_report.total_reward


def with_ratio(report: MetricsReport, reference: MetricsReport) -> MetricsReport:
    return replace(report, ratio_percent=compute_ratio(report, reference))


def run_with_reference(cfg: SimConfig) -> MetricsReport:
    """Run ``cfg`` and its no-attack twin; fill ``ratio_percent`` from the pair."""

    return with_ratio(run(cfg), run(cfg.without_attack()))


def report_to_dict(report: MetricsReport) -> dict[str, Any]:
    return {
        "total_reward": report.total_reward,
        "real_reward": report.real_reward,
        "fake_reward": report.fake_reward,
        "requested_real_reward": report.requested_real_reward,
        "requested_fake_reward": report.requested_fake_reward,
        "real_served": report.real_served,
        "fake_served": report.fake_served,
        "real_arrivals": report.real_arrivals,
        "fake_emitted": report.fake_emitted,
        "fake_weight_histogram": {
            str(weight): count
            for weight, count in enumerate(report.fake_weight_histogram, start=1)
        },
        "ratio_percent": report.ratio_percent,
    }
