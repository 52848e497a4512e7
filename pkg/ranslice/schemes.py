"""gNodeB admission schemes: Q-learning, myopic, FCFS, and random."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .link import required_rbs
from .model import (
    ADVERSARY,
    DEFAULT_LINK,
    MAX_WEIGHT,
    ActiveGrant,
    LinkParams,
    Request,
    ResourcePool,
)
from .resources import allocate, feasible
from .rl import QHyperparams, QTable, epsilon_at, q_update, select_action

ADMIT = 0
SKIP = 1
GNB_ACTIONS = 2
BUDGET_BINS = 10


class Scheme(str, Enum):
    QLEARNING = "qlearning"
    MYOPIC = "myopic"
    FCFS = "fcfs"
    RANDOM = "random"

    @classmethod
    def parse(cls, raw: str | "Scheme") -> "Scheme":
        if isinstance(raw, Scheme):
            return raw
        try:
            return cls(str(raw).strip().lower())
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise ValueError(f"Unknown scheme {raw!r}; expected one of {choices}") from exc


class ActiveSet:
    """Waiting list A(t): pending requests in arrival order."""

    def __init__(self, requests: Iterable[Request] = ()) -> None:
        self._requests: dict[int, Request] = {}
        for request in requests:
            self.add(request)

    def add(self, request: Request) -> None:
        if request.id in self._requests:
            raise ValueError(f"Request {request.id} is already waiting")
        self._requests[request.id] = request

    def remove(self, request_id: int) -> Request:
        return self._requests.pop(request_id)

    def drop_expired(self, slot: int) -> list[Request]:
        """Remove and return requests whose deadline lies before ``slot``."""

        expired = [req for req in self._requests.values() if req.deadline_slot < slot]
        for req in expired:
            del self._requests[req.id]
        return expired

    def get(self, request_id: int) -> Request | None:
        return self._requests.get(request_id)

    def __contains__(self, request_id: object) -> bool:
        return request_id in self._requests

    def __iter__(self) -> Iterator[Request]:
        return iter(list(self._requests.values()))

    def __len__(self) -> int:
        return len(self._requests)


@dataclass(frozen=True)
class Admission:
    request: Request
    grant: ActiveGrant

    @property
    def request_id(self) -> int:
        return self.request.id


@dataclass(frozen=True)
class GnbTransition:
    """The last decision of a slot, waiting for the next slot's first state."""

    state: int
    action: int
    reward: float


@dataclass(frozen=True)
class Decision:
    """Admissions x_ij(t) = 1 taken in one slot and the pool they leave.

    ``carry`` is the Q-learning transition left open at the end of the slot.
    """

    admitted: tuple[Admission, ...]
    pool: ResourcePool
    carry: GnbTransition | None = None

    @property
    def reward(self) -> int:
        return sum(item.request.weight for item in self.admitted)


def budget_bin(fraction: float) -> int:
    return min(int(fraction * BUDGET_BINS), BUDGET_BINS - 1)


def encode_gnb_state(
    free_rbs: int,
    processing_bin: int,
    comm_bin: int,
    weight: int,
    needed_rbs: int,
    total_rbs: int,
) -> int:
    """Pack the scheduler state into a single mixed-radix key.

    ``weight`` and ``needed_rbs`` are both 0 for a slot with nothing waiting.
    ``needed_rbs`` is capped at ``total_rbs`` so the key space stays finite.
    """

    if not 0 <= free_rbs <= total_rbs:
        raise ValueError(f"free_rbs {free_rbs} outside [0, {total_rbs}]")
    if not (0 <= processing_bin < BUDGET_BINS and 0 <= comm_bin < BUDGET_BINS):
        raise ValueError("budget bins must lie in [0, 9]")
    if not 0 <= weight <= MAX_WEIGHT:
        raise ValueError(f"weight {weight} outside [0, {MAX_WEIGHT}]")
    if needed_rbs < 0:
        raise ValueError("needed_rbs must be non-negative")
    needed = min(needed_rbs, total_rbs)
    key = free_rbs
    key = key * BUDGET_BINS + processing_bin
    key = key * BUDGET_BINS + comm_bin
    key = key * (MAX_WEIGHT + 1) + weight
    return key * (total_rbs + 1) + needed


def _state_for(pool: ResourcePool, weight: int, needed: int) -> int:
    return encode_gnb_state(
        pool.free_rbs,
        budget_bin(pool.free_processing),
        budget_bin(pool.free_comm_power),
        weight,
        needed,
        pool.total_rbs,
    )


def new_gnb_table() -> QTable:
    return QTable(action_count=lambda _state: GNB_ACTIONS)


def _admit_in_order(
    ordered: Sequence[Request], pool: ResourcePool, slot: int, link: LinkParams
) -> Decision:
    admitted: list[Admission] = []
    for request in ordered:
        if feasible(pool, request, link):
            pool, grant = allocate(pool, request, slot, link)
            admitted.append(Admission(request, grant))
    return Decision(tuple(admitted), pool)


def ql_key(request: Request, link: LinkParams = DEFAULT_LINK) -> tuple:
    return (
        -request.weight,
        required_rbs(request, link),
        request.deadline_slot,
        request.arrival_slot,
        request.id,
    )


def decide_ql(
    active: ActiveSet,
    pool: ResourcePool,
    table: QTable,
    hp: QHyperparams,
    slot: int,
    rng: np.random.Generator,
    link: LinkParams = DEFAULT_LINK,
    *,
    carry: GnbTransition | None = None,
) -> Decision:
    """Admit or skip each waiting request in priority order, learning as it goes.

    Requests are visited by weight (heaviest first), then fewest RBs, then
    earliest deadline. An ``admit`` choice that does not fit is carried out
    as ``skip``; the update is applied to the action actually taken. Each
    transition bootstraps from the next request's state. The slot's last
    transition is returned as ``Decision.carry`` and closed by the next call,
    against that slot's first state or, with nothing waiting, its pool.
    """

    ordered = sorted(active, key=lambda req: ql_key(req, link))
    if not ordered:
        if carry is not None:
            q_update(table, carry.state, carry.action, carry.reward, _state_for(pool, 0, 0), hp)
        return Decision((), pool)
    epsilon = epsilon_at(slot, hp)
    admitted: list[Admission] = []
    for request in ordered:
        state = _state_for(pool, request.weight, required_rbs(request, link))
        if carry is not None:
            q_update(table, carry.state, carry.action, carry.reward, state, hp)
        action = select_action(table, state, epsilon, rng)
        reward = 0.0
        if action == ADMIT and feasible(pool, request, link):
            pool, grant = allocate(pool, request, slot, link)
            admitted.append(Admission(request, grant))
            reward = float(request.weight)
        else:
            action = SKIP
        carry = GnbTransition(state, action, reward)
    return Decision(tuple(admitted), pool, carry)


def myopic_key(request: Request, link: LinkParams = DEFAULT_LINK) -> tuple:
    return (-request.weight, required_rbs(request, link), request.arrival_slot, request.id)


def decide_myopic(
    active: ActiveSet,
    pool: ResourcePool,
    slot: int = 0,
    link: LinkParams = DEFAULT_LINK,
) -> Decision:
    """Greedy by weight, then fewest RBs, then earliest arrival."""

    ordered = sorted(active, key=lambda req: myopic_key(req, link))
    return _admit_in_order(ordered, pool, slot, link)


def fcfs_key(request: Request) -> tuple:
    # Fake requests carry no UE index; they queue behind real UEs of the same slot.
    ue_rank = request.origin if request.origin != ADVERSARY else float("inf")
    return (request.arrival_slot, ue_rank, request.id)


def decide_fcfs(
    active: ActiveSet,
    pool: ResourcePool,
    slot: int = 0,
    link: LinkParams = DEFAULT_LINK,
) -> Decision:
    ordered = sorted(active, key=fcfs_key)
    return _admit_in_order(ordered, pool, slot, link)


def decide_random(
    active: ActiveSet,
    pool: ResourcePool,
    rng: np.random.Generator,
    slot: int = 0,
    link: LinkParams = DEFAULT_LINK,
) -> Decision:
    requests = list(active)
    if not requests:
        return Decision((), pool)
    order = rng.permutation(len(requests))
    return _admit_in_order([requests[i] for i in order], pool, slot, link)


@dataclass
class Scheduler:
    """Per-run owner of a scheme, its random stream and, for Q-learning, its table.

    The Q-learning transition left open by one slot is kept in ``carry`` until
    the next slot closes it.
    """

    scheme: Scheme
    rng: np.random.Generator
    hp: QHyperparams = field(default_factory=QHyperparams)
    link: LinkParams = DEFAULT_LINK
    table: QTable = field(default_factory=new_gnb_table)
    carry: GnbTransition | None = None

    def decide(self, active: ActiveSet, pool: ResourcePool, slot: int) -> Decision:
        if self.scheme is Scheme.QLEARNING:
            decision = decide_ql(
                active, pool, self.table, self.hp, slot, self.rng, self.link, carry=self.carry
            )
            self.carry = decision.carry
            return decision
        if self.scheme is Scheme.MYOPIC:
            return decide_myopic(active, pool, slot, self.link)
        if self.scheme is Scheme.FCFS:
            return decide_fcfs(active, pool, slot, self.link)
        return decide_random(active, pool, self.rng, slot, self.link)
