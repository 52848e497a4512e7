"""Weights carried by fake requests.

The largest weight gives a fake request the best chance of being served.
The other policies pull the weight distribution towards the uniform one
real UEs produce, at some cost in attack strength.

Resource-dependent policies sample from a matrix ``p[j, i]``: the probability
that the weight is ``j + 1`` when ``i + 1`` RBs remain. Matrix files store one
row per weight and one column per RB state, whitespace separated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from ..model import MAX_WEIGHT

logger = logging.getLogger(__name__)

TABLE_TOLERANCE = 1e-9


class WeightTableError(RuntimeError):
    """Raised when a weight table is malformed or queried out of range."""


class WeightPolicy(str, Enum):
    LW = "LW"
    UW = "UW"
    ULW = "ULW"
    RDW = "RDW"
    RDLW = "RDLW"
    AW1 = "AW1"
    AW2 = "AW2"
    AW3 = "AW3"

    @classmethod
    def parse(cls, raw: str | "WeightPolicy") -> "WeightPolicy":
        if isinstance(raw, WeightPolicy):
            return raw
        normalized = str(raw).replace(" ", "").replace("_", "").upper()
        try:
            return cls(normalized)
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise ValueError(
                f"Unknown weight policy {raw!r}; expected one of {choices}"
            ) from exc

    @property
    def adaptive(self) -> bool:
        return self in (WeightPolicy.AW1, WeightPolicy.AW2, WeightPolicy.AW3)


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Conditional weight distribution, shape ``(weights, rb_states)``."""

    probs: np.ndarray = field(repr=False)
    name: str = "custom"

    def __post_init__(self) -> None:
        matrix = np.asarray(self.probs, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise WeightTableError(
                f"Weight table {self.name} must be a non-empty 2-D matrix, "
                f"got shape {matrix.shape}"
            )
        if np.any(matrix < 0):
            raise WeightTableError(f"Weight table {self.name} has negative entries")
        matrix.setflags(write=False)
        object.__setattr__(self, "probs", matrix)

    @property
    def weight_count(self) -> int:
        return int(self.probs.shape[0])

    @property
    def rb_states(self) -> int:
        return int(self.probs.shape[1])

    def column(self, remaining_rbs: int) -> np.ndarray:
        if not 1 <= remaining_rbs <= self.rb_states:
            raise WeightTableError(
                f"Weight table {self.name} covers 1..{self.rb_states} remaining RBs, "
                f"got {remaining_rbs}"
            )
        return self.probs[:, remaining_rbs - 1]

    def sample(
        self,
        remaining_rbs: int,
        rng: np.random.Generator,
        size: int | None = None,
    ) -> int | np.ndarray:
        """Draw weight(s) in ``1..weight_count`` for the given RB state."""

        column = self.column(remaining_rbs)
        total = column.sum()
        if abs(total - 1.0) > 1e-6:
            raise WeightTableError(
                f"Column {remaining_rbs} of weight table {self.name} sums to {total}"
            )
        draws = rng.choice(self.weight_count, size=size, p=column / total) + 1
        if size is None:
            return int(draws)
        return draws


def expand_grouped_columns(
    groups: Sequence[tuple[Sequence[int], Sequence[float]]],
    *,
    name: str,
) -> WeightTable:
    """Build a table from columns shared by groups of RB states."""

    states = sorted(state for members, _ in groups for state in members)
    if states != list(range(1, len(states) + 1)):
        raise WeightTableError(f"Grouped columns of {name} do not cover 1..{len(states)}")
    matrix = np.zeros((len(groups[0][1]), len(states)))
    for members, column in groups:
        for state in members:
            matrix[:, state - 1] = column
    return WeightTable(matrix, name=name)


RDW_TABLE = expand_grouped_columns(
    [
        ((1, 2), (0.5, 0.4, 0.1, 0.0, 0.0)),
        ((3, 4), (0.4, 0.4, 0.2, 0.0, 0.0)),
        ((5,), (0.2, 0.3, 0.4, 0.1, 0.0)),
        ((6,), (0.2, 0.2, 0.2, 0.2, 0.2)),
        ((7,), (0.0, 0.1, 0.4, 0.3, 0.2)),
        ((8, 9), (0.0, 0.0, 0.2, 0.4, 0.4)),
        ((10, 11), (0.0, 0.0, 0.1, 0.4, 0.5)),
    ],
    name="rdw",
)

RDLW_TABLE = expand_grouped_columns(
    [
        ((1,), (0.0, 0.0, 0.0, 1.0, 0.0)),
        ((2, 3), (0.0, 0.0, 0.0, 0.9, 0.1)),
        ((4, 5), (0.0, 0.0, 0.0, 0.8, 0.2)),
        ((6,), (0.0, 0.0, 0.0, 0.5, 0.5)),
        ((7, 8), (0.0, 0.0, 0.0, 0.2, 0.8)),
        ((9, 10), (0.0, 0.0, 0.0, 0.1, 0.9)),
        ((11,), (0.0, 0.0, 0.0, 0.0, 1.0)),
    ],
    name="rdlw",
)

UNIFORM_TARGET = np.full(MAX_WEIGHT, 1.0 / MAX_WEIGHT)
HIGH_WEIGHT_TARGET = np.array([0.0, 0.0, 0.0, 0.5, 0.5])


@dataclass(frozen=True)
class WeightTables:
    """Tables consulted by the RDW and RDLW policies."""

    rdw: WeightTable = RDW_TABLE
    rdlw: WeightTable = RDLW_TABLE

    def for_policy(self, policy: WeightPolicy) -> WeightTable:
        if policy is WeightPolicy.RDW:
            return self.rdw
        if policy is WeightPolicy.RDLW:
            return self.rdlw
        raise WeightTableError(f"Policy {policy.value} does not use a weight table")


def load_weight_table(path: str | Path, *, name: str | None = None) -> WeightTable:
    """Read a whitespace-separated matrix file into a :class:`WeightTable`."""

    path = Path(path)
    if not path.exists():
        raise WeightTableError(f"Weight table file does not exist: {path}")
    try:
        matrix = np.loadtxt(path, dtype=float, ndmin=2)
    except ValueError as exc:
        raise WeightTableError(f"Failed to parse weight table {path}: {exc}") from exc
    table = WeightTable(matrix, name=name or path.stem)
    logger.debug("Loaded weight table %s with shape %s", path, matrix.shape)
    return table


def weight_table_errors(
    table: WeightTable, target_mean_prob: Sequence[float]
) -> list[str]:
    """Describe every column-sum and row-mean mismatch of ``table``."""

    target = np.asarray(target_mean_prob, dtype=float)
    if target.shape != (table.weight_count,):
        raise WeightTableError(
            f"Target has {target.size} weights but table {table.name} has "
            f"{table.weight_count}"
        )
    problems: list[str] = []
    for state, total in enumerate(table.probs.sum(axis=0), start=1):
        if abs(total - 1.0) > TABLE_TOLERANCE:
            problems.append(f"column {state} sums to {total:.12g}")
    for weight, (mean, expected) in enumerate(
        zip(table.probs.mean(axis=1), target), start=1
    ):
        if abs(mean - expected) > TABLE_TOLERANCE:
            problems.append(
                f"weight {weight} averages {mean:.12g}, expected {expected:.12g}"
            )
    return problems


def validate_weight_table(
    table: WeightTable, target_mean_prob: Sequence[float]
) -> bool:
    return not weight_table_errors(table, target_mean_prob)


@dataclass(frozen=True)
class AwState:
    current_weight: int = MAX_WEIGHT

    def __post_init__(self) -> None:
        if not 1 <= self.current_weight <= MAX_WEIGHT:
            raise ValueError(
                f"AW weight {self.current_weight} outside [1, {MAX_WEIGHT}]"
            )


def weight_from_policy(
    policy: WeightPolicy,
    remaining_rbs: int,
    aw: AwState,
    tables: WeightTables,
    rng: np.random.Generator,
) -> int:
    """Pick the weight of the next fake request."""

    if policy is WeightPolicy.LW:
        return MAX_WEIGHT
    if policy is WeightPolicy.UW:
        return int(rng.integers(1, MAX_WEIGHT + 1))
    if policy is WeightPolicy.ULW:
        return int(rng.integers(MAX_WEIGHT - 1, MAX_WEIGHT + 1))
    if policy in (WeightPolicy.RDW, WeightPolicy.RDLW):
        return int(tables.for_policy(policy).sample(remaining_rbs, rng))
    return aw.current_weight


def update_aw(
    aw: AwState,
    was_selected: bool,
    variant: WeightPolicy,
    decrease_prob: float,
    rng: np.random.Generator,
) -> AwState:
    """Move the adaptive weight after learning whether a fake was served."""

    weight = aw.current_weight
    if variant is WeightPolicy.AW1:
        weight = min(weight + 1, MAX_WEIGHT) if was_selected else max(weight - 1, 1)
    elif variant is WeightPolicy.AW2:
        weight = MAX_WEIGHT if was_selected else max(weight - 1, 1)
    elif variant is WeightPolicy.AW3:
        if was_selected:
            weight = MAX_WEIGHT
        elif rng.random() < decrease_prob:
            weight = max(weight - 1, 1)
    else:
        raise ValueError(f"{variant.value} is not an adaptive weight policy")
    return AwState(weight)


def aw_transition_matrix(
    variant: WeightPolicy,
    select_prob: Sequence[float],
    decrease_prob: float = 0.4,
) -> np.ndarray:
    """Weight-to-weight transitions of an adaptive policy between emissions.

    ``select_prob[w - 1]`` is the chance a fake of weight ``w`` is admitted in
    the slot it was sent. Row ``w - 1`` is the distribution of the next
    emitted weight.
    """

    if not variant.adaptive:
        raise ValueError(f"{variant.value} is not an adaptive weight policy")
    probs = np.asarray(select_prob, dtype=float)
    if probs.shape != (MAX_WEIGHT,) or np.any((probs < 0) | (probs > 1)):
        raise ValueError(f"select_prob needs {MAX_WEIGHT} probabilities in [0, 1]")
    matrix = np.zeros((MAX_WEIGHT, MAX_WEIGHT))
    for index, selected in enumerate(probs):
        weight = index + 1
        up = min(weight + 1, MAX_WEIGHT) if variant is WeightPolicy.AW1 else MAX_WEIGHT
        down = max(weight - 1, 1)
        matrix[index, up - 1] += selected
        if variant is WeightPolicy.AW3:
            matrix[index, down - 1] += (1 - selected) * decrease_prob
            matrix[index, index] += (1 - selected) * (1 - decrease_prob)
        else:
            matrix[index, down - 1] += 1 - selected
    return matrix


def aw_stationary_mix(
    variant: WeightPolicy,
    select_prob: Sequence[float],
    decrease_prob: float = 0.4,
) -> np.ndarray:
    """Long-run share of each weight among emitted fakes."""

    matrix = aw_transition_matrix(variant, select_prob, decrease_prob)
    system = np.vstack([matrix.T - np.eye(MAX_WEIGHT), np.ones(MAX_WEIGHT)])
    rhs = np.zeros(MAX_WEIGHT + 1)
    rhs[-1] = 1.0
    mix, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return np.clip(mix, 0.0, None)
