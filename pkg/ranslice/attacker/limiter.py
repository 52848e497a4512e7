"""Rate control for fake request emission."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class RateLimiter:
    """Tracks emitted fakes against elapsed slots."""

    emitted_count: int = 0
    elapsed_slots: int = 0

    def tick(self) -> None:
        self.elapsed_slots += 1

    def record_emission(self) -> None:
        if self.emitted_count >= self.elapsed_slots:
            raise RuntimeError(
                f"At most one fake per slot: {self.emitted_count} emitted "
                f"in {self.elapsed_slots} slots"
            )
        self.emitted_count += 1

    @property
    def observed_rate(self) -> float:
        if self.elapsed_slots == 0:
            return 0.0
        return self.emitted_count / self.elapsed_slots


def should_emit(limiter: RateLimiter, fake_rate: float) -> bool:
    """Allow a fake only while the rate so far is strictly below ``fake_rate``."""

    if limiter.elapsed_slots < 1:
        raise ValueError("should_emit needs at least one elapsed slot; call tick() first")
    return limiter.emitted_count / limiter.elapsed_slots < fake_rate
