"""Spectrum sensing of the gNodeB's free RBs, with false alarms and misdetections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import ResourcePool


@dataclass(frozen=True)
class SensingErrors:
    p_false_alarm: float = 0.0
    p_misdetect: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_false_alarm", "p_misdetect"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")

    @property
    def perfect(self) -> bool:
        return self.p_false_alarm == 0.0 and self.p_misdetect == 0.0

    @classmethod
    def symmetric(cls, probability: float) -> "SensingErrors":
        return cls(probability, probability)


def occupancy_from_pool(pool: ResourcePool) -> np.ndarray:
    """Per-RB busy flags for ``pool``.

    Only the count of busy RBs is tracked, and sensing errors are independent
    per RB, so which RBs are marked busy does not matter.
    """

    occupancy = np.zeros(pool.total_rbs, dtype=bool)
    occupancy[: pool.busy_rbs] = True
    return occupancy


def observe_free_rbs(
    occupancy: np.ndarray,
    sensing: SensingErrors | tuple[float, float],
    rng: np.random.Generator,
) -> int:
    """Count the RBs the adversary believes are free.

    A free RB is reported free with probability ``1 - p_false_alarm``; a busy
    RB is reported free with probability ``p_misdetect``. Perfect sensing
    returns the exact count without touching ``rng``.
    """

    if not isinstance(sensing, SensingErrors):
        sensing = SensingErrors(*sensing)
    busy = np.asarray(occupancy, dtype=bool)
    if sensing.perfect:
        return int(busy.size - busy.sum())
    draws = rng.random(busy.size)
    seen_free = np.where(busy, draws < sensing.p_misdetect, draws >= sensing.p_false_alarm)
    return int(seen_free.sum())
