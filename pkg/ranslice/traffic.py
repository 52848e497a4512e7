"""Stochastic generation of real UE slicing requests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .model import MAX_WEIGHT, RATE_PER_RB, DomainError, Request

SNR_BANDS: dict[str, tuple[float, float]] = {
    "low": (0.5, 1.5),
    "medium": (1.5, 3.0),
    "high": (3.0, 6.0),
}


@dataclass(frozen=True)
class TrafficConfig:
    ue_count: int = 3
    arrival_prob: float = 0.5
    weight_range: tuple[int, int] = (1, MAX_WEIGHT)
    lifetime_range: tuple[int, int] = (1, 10)
    deadline_offset_range: tuple[int, int] = (1, 20)
    snr_range: tuple[float, float] = SNR_BANDS["medium"]
    rate_demand_range: tuple[float, float] = (1.0 * RATE_PER_RB, 4.0 * RATE_PER_RB)
    processing_range: tuple[float, float] = (0.1, 0.3)
    comm_power_range: tuple[float, float] = (0.1, 0.3)

    def __post_init__(self) -> None:
        if self.ue_count < 0:
            raise DomainError("ue_count must be non-negative")
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise DomainError("arrival_prob must be in [0, 1]")
        for name in (
            "weight_range",
            "lifetime_range",
            "deadline_offset_range",
            "snr_range",
            "rate_demand_range",
            "processing_range",
            "comm_power_range",
        ):
            low, high = getattr(self, name)
            if low > high:
                raise DomainError(f"{name} is empty: [{low}, {high}]")
        if self.weight_range[0] < 1 or self.weight_range[1] > MAX_WEIGHT:
            raise DomainError(f"weight_range must lie within [1, {MAX_WEIGHT}]")
        if self.lifetime_range[0] < 1:
            raise DomainError("lifetime_range must start at 1 or later")
        if self.deadline_offset_range[0] < 0:
            raise DomainError("deadline_offset_range must be non-negative")
        if self.snr_range[0] <= 0:
            raise DomainError("snr_range must be positive")
        if self.rate_demand_range[0] <= 0:
            raise DomainError("rate_demand_range must be positive")
        for name in ("processing_range", "comm_power_range"):
            low, high = getattr(self, name)
            if low <= 0 or high > 1:
                raise DomainError(f"{name} must lie within (0, 1]")

    def with_snr_band(self, band: str) -> "TrafficConfig":
        if band not in SNR_BANDS:
            raise DomainError(f"Unknown SNR band {band!r}; expected one of {sorted(SNR_BANDS)}")
        return replace(self, snr_range=SNR_BANDS[band])


def _uniform_int(rng: np.random.Generator, bounds: tuple[int, int]) -> int:
    return int(rng.integers(bounds[0], bounds[1] + 1))


def _uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    return float(rng.uniform(bounds[0], bounds[1]))


def sample_request(
    ue: int,
    slot: int,
    cfg: TrafficConfig,
    rng: np.random.Generator,
    *,
    request_id: int,
) -> Request:
    """Draw one real request for UE ``ue`` arriving at ``slot``."""

    if not 0 <= ue < cfg.ue_count:
        raise DomainError(f"UE index {ue} outside [0, {cfg.ue_count})")
    weight = _uniform_int(rng, cfg.weight_range)
    lifetime = _uniform_int(rng, cfg.lifetime_range)
    deadline_offset = _uniform_int(rng, cfg.deadline_offset_range)
    snr = _uniform(rng, cfg.snr_range)
    min_rate = _uniform(rng, cfg.rate_demand_range)
    min_processing = _uniform(rng, cfg.processing_range)
    min_comm_power = _uniform(rng, cfg.comm_power_range)
    return Request(
        id=request_id,
        origin=ue,
        is_fake=False,
        weight=weight,
        min_rate=min_rate,
        min_processing=min_processing,
        min_comm_power=min_comm_power,
        snr=snr,
        lifetime=lifetime,
        deadline_slot=slot + deadline_offset,
        arrival_slot=slot,
    )


def generate_arrivals(
    slot: int,
    cfg: TrafficConfig,
    rng: np.random.Generator,
    ids: Iterator[int] | None = None,
) -> list[Request]:
    """Return this slot's real arrivals: one Bernoulli trial per UE."""

    if slot < 0:
        raise DomainError(f"slot must be non-negative, got {slot}")
    if ids is None:
        ids = itertools.count()
    arrivals: list[Request] = []
    for ue in range(cfg.ue_count):
        if rng.random() < cfg.arrival_prob:
            arrivals.append(
                sample_request(ue, slot, cfg, rng, request_id=next(ids))
            )
    return arrivals
