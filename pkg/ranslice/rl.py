"""Tabular Q-learning shared by the gNodeB scheduler and the adversary."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, TextIO

import numpy as np

logger = logging.getLogger(__name__)

ActionCount = Callable[[int], int]
Initializer = Callable[[int, int], float]


class RLError(RuntimeError):
    """Raised for malformed Q-learning inputs."""


def _zero(_state: int, _action: int) -> float:
    return 0.0


@dataclass(frozen=True)
class QHyperparams:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon_start: float = 0.1
    epsilon_end: float = 0.01
    epsilon_decay_slots: int = 5000

    def __post_init__(self) -> None:
        # alpha == 0 freezes a table, e.g. to replay a trained policy.
        if not 0.0 <= self.alpha <= 1.0:
            raise RLError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise RLError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise RLError(
                "epsilon must satisfy 0 <= epsilon_end <= epsilon_start <= 1 "
                f"(got {self.epsilon_start} -> {self.epsilon_end})"
            )
        if self.epsilon_decay_slots < 0:
            raise RLError("epsilon_decay_slots must be non-negative")


@dataclass
class QTable:
    """Lazily materialized Q-table keyed by encoded state.

    ``action_count(state)`` gives the size of the action set for a state and
    ``initializer(state, action)`` the value an entry holds before its first
    update. Rows are created on first access.
    """

    action_count: ActionCount
    initializer: Initializer = _zero
    _rows: Dict[int, np.ndarray] = field(default_factory=dict, init=False, repr=False)

    def row(self, state: int) -> np.ndarray:
        values = self._rows.get(state)
        if values is None:
            count = self.action_count(state)
            if count < 1:
                raise RLError(f"State {state} has no actions")
            values = np.fromiter(
                (self.initializer(state, action) for action in range(count)),
                dtype=float,
                count=count,
            )
            self._rows[state] = values
        return values

    def value(self, state: int, action: int) -> float:
        return float(self.row(state)[action])

    def set_value(self, state: int, action: int, value: float) -> None:
        self.row(state)[action] = value

    def max_value(self, state: int) -> float:
        return float(self.row(state).max())

    def __len__(self) -> int:
        return len(self._rows)

    def entries(self) -> Iterator[tuple[int, int, float]]:
        for state in sorted(self._rows):
            for action, value in enumerate(self._rows[state]):
                yield state, action, float(value)

    def dump(self, stream: TextIO) -> int:
        """Write ``state_key action value`` rows; return the row count."""

        written = 0
        for state, action, value in self.entries():
            stream.write(f"{state} {action} {value!r}\n")
            written += 1
        logger.debug("Dumped %d Q-table entries", written)
        return written


def q_update(
    table: QTable,
    s: int,
    a: int,
    r: float,
    s_next: int,
    hp: QHyperparams,
) -> QTable:
    """Apply ``Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a'))``."""

    row = table.row(s)
    if not 0 <= a < len(row):
        raise RLError(f"Action {a} undefined for state {s}")
    target = r + hp.gamma * table.max_value(s_next)
    row[a] = (1.0 - hp.alpha) * row[a] + hp.alpha * target
    return table


def select_action(
    table: QTable, s: int, epsilon: float, rng: np.random.Generator
) -> int:
    """Epsilon-greedy choice; greedy ties go to the lowest action index."""

    row = table.row(s)
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(len(row)))
    return int(np.argmax(row))


def epsilon_at(slot: int, hp: QHyperparams) -> float:
    """Linearly anneal exploration over ``epsilon_decay_slots``, then clamp."""

    if slot < 0:
        raise RLError(f"slot must be non-negative, got {slot}")
    if hp.epsilon_decay_slots == 0 or slot >= hp.epsilon_decay_slots:
        return hp.epsilon_end
    fraction = slot / hp.epsilon_decay_slots
    return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * fraction
