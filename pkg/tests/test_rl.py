import io

import numpy as np
import pytest

from ranslice.rl import (
    QHyperparams,
    QTable,
    RLError,
    epsilon_at,
    q_update,
    select_action,
)

# Deterministic 3-state, 2-action MDP: NEXT[s][a] and REWARD[s][a].
NEXT = np.array([[0, 1], [0, 2], [2, 0]])
REWARD = np.array([[0.0, 1.0], [0.0, 2.0], [1.0, 5.0]])


def _value_iteration(gamma: float, tol: float = 1e-12) -> np.ndarray:
    q = np.zeros(REWARD.shape)
    while True:
        updated = REWARD + gamma * q.max(axis=1)[NEXT]
        if np.max(np.abs(updated - q)) < tol:
            return updated
        q = updated


def _two_action_table() -> QTable:
    return QTable(action_count=lambda _state: 2)


def test_q_update_examples() -> None:
    table = _two_action_table()
    table.set_value(0, 1, -3.0)
    q_update(table, 0, 1, 5.0, 1, QHyperparams(alpha=1.0, gamma=0.0))
    assert table.value(0, 1) == 5.0

    frozen = _two_action_table()
    frozen.set_value(0, 0, 1.5)
    q_update(frozen, 0, 0, 9.0, 1, QHyperparams(alpha=0.0))
    assert frozen.value(0, 0) == 1.5

    table = _two_action_table()
    table.set_value(1, 0, 4.0)
    q_update(table, 0, 0, 2.0, 1, QHyperparams(alpha=0.5, gamma=0.9))
    assert table.value(0, 0) == pytest.approx(2.8)


def test_q_update_touches_one_entry() -> None:
    table = _two_action_table()
    for state in range(3):
        table.row(state)
    before = list(table.entries())
    q_update(table, 2, 1, 1.0, 0, QHyperparams())
    after = list(table.entries())
    changed = [old for old, new in zip(before, after) if old != new]
    assert [(state, action) for state, action, _ in changed] == [(2, 1)]


def test_q_update_rejects_unknown_action() -> None:
    with pytest.raises(RLError):
        q_update(_two_action_table(), 0, 2, 1.0, 0, QHyperparams())


def test_select_action_greedy_and_ties() -> None:
    rng = np.random.default_rng(0)
    table = QTable(action_count=lambda _state: 3)
    for action, value in enumerate((1.0, 7.0, 3.0)):
        table.set_value(0, action, value)
    assert select_action(table, 0, 0.0, rng) == 1

    tied = _two_action_table()
    tied.set_value(0, 0, 4.0)
    tied.set_value(0, 1, 4.0)
    assert select_action(tied, 0, 0.0, rng) == 0


def test_select_action_is_uniform_when_exploring() -> None:
    rng = np.random.default_rng(11)
    table = QTable(action_count=lambda _state: 4)
    draws = np.array([select_action(table, 0, 1.0, rng) for _ in range(100_000)])
    frequencies = np.bincount(draws, minlength=4) / draws.size
    assert np.all(np.abs(frequencies - 0.25) < 0.01)


def test_empty_action_set_is_rejected() -> None:
    table = QTable(action_count=lambda _state: 0)
    with pytest.raises(RLError):
        select_action(table, 0, 0.0, np.random.default_rng(0))


def test_epsilon_schedule() -> None:
    hp = QHyperparams(epsilon_start=0.2, epsilon_end=0.02, epsilon_decay_slots=100)
    assert epsilon_at(0, hp) == pytest.approx(0.2)
    assert epsilon_at(100, hp) == pytest.approx(0.02)
    assert epsilon_at(10_000, hp) == pytest.approx(0.02)
    assert epsilon_at(50, hp) == pytest.approx(0.11)


def test_hyperparams_validation() -> None:
    with pytest.raises(RLError):
        QHyperparams(alpha=1.5)
    with pytest.raises(RLError):
        QHyperparams(epsilon_start=0.01, epsilon_end=0.1)


def test_learned_policy_matches_value_iteration() -> None:
    hp = QHyperparams(alpha=0.1, gamma=0.9)
    oracle = _value_iteration(hp.gamma)
    table = _two_action_table()
    rng = np.random.default_rng(3)
    state = 0
    for _ in range(100_000):
        action = select_action(table, state, 1.0, rng)
        next_state = int(NEXT[state, action])
        q_update(table, state, action, float(REWARD[state, action]), next_state, hp)
        state = next_state

    learned = np.array([table.row(s) for s in range(3)])
    assert np.array_equal(learned.argmax(axis=1), oracle.argmax(axis=1))
    assert np.max(np.abs(learned - oracle)) < 1e-2


def test_dump_writes_sorted_rows() -> None:
    table = _two_action_table()
    table.set_value(3, 1, 0.5)
    table.set_value(1, 0, 2.0)
    buffer = io.StringIO()

    assert table.dump(buffer) == 4
    assert buffer.getvalue().splitlines() == ["1 0 2.0", "1 1 0.0", "3 0 0.0", "3 1 0.5"]
