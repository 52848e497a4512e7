"""Domain models for the RAN slicing simulator.

The data structures defined here describe slicing requests, the gNodeB's
resource budgets, and the grants that hold resources while a service runs.
They are plain values: every operation that changes a pool returns a new one,
so a pool can be shared freely between schedulers that evaluate candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

RATE_PER_RB = 12.59e6
"""Bits per second carried by one RB (single antenna, QPSK, 60 kHz, 10 MHz)."""

DEFAULT_RB_COUNT = 11
MAX_WEIGHT = 5
ADVERSARY = -1
"""``Request.origin`` value used for fake requests."""
BUDGET_TOLERANCE = 1e-9


class DomainError(ValueError):
    """Raised when a value falls outside its numeric domain."""


class AllocationError(RuntimeError):
    """Raised when a request is granted resources it cannot fit into."""


class AccountingError(RuntimeError):
    """Raised when resource bookkeeping stops adding up."""


@dataclass(frozen=True)
class Request:
    """A slicing request, real or fake, waiting for admission.

    ``is_fake`` is ground truth used only by metrics; schedulers never read it.
    """

    id: int
    origin: int
    is_fake: bool
    weight: int
    min_rate: float
    min_processing: float
    min_comm_power: float
    snr: float
    lifetime: int
    deadline_slot: int
    arrival_slot: int

    def __post_init__(self) -> None:
        if not 1 <= self.weight <= MAX_WEIGHT:
            raise DomainError(f"Request {self.id} weight {self.weight} outside [1, {MAX_WEIGHT}]")
        if self.lifetime < 1:
            raise DomainError(f"Request {self.id} lifetime must be >= 1")
        if self.deadline_slot < self.arrival_slot:
            raise DomainError(f"Request {self.id} deadline precedes its arrival")
        if not 0.0 < self.min_processing <= 1.0:
            raise DomainError(f"Request {self.id} min_processing must be in (0, 1]")
        if not 0.0 < self.min_comm_power <= 1.0:
            raise DomainError(f"Request {self.id} min_comm_power must be in (0, 1]")
        if self.min_rate <= 0:
            raise DomainError(f"Request {self.id} min_rate must be positive")
        if self.snr <= 0:
            raise DomainError(f"Request {self.id} snr must be positive")


@dataclass(frozen=True)
class ResourcePool:
    """Free RBs and the unused share of the processing and transmit budgets."""

    total_rbs: int
    free_rbs: int
    free_processing: float = 1.0
    free_comm_power: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.free_rbs <= self.total_rbs:
            raise AccountingError(
                f"free_rbs {self.free_rbs} outside [0, {self.total_rbs}]"
            )
        if not -BUDGET_TOLERANCE <= self.free_processing <= 1.0 + BUDGET_TOLERANCE:
            raise AccountingError(f"free_processing {self.free_processing} outside [0, 1]")
        if not -BUDGET_TOLERANCE <= self.free_comm_power <= 1.0 + BUDGET_TOLERANCE:
            raise AccountingError(f"free_comm_power {self.free_comm_power} outside [0, 1]")

    @classmethod
    def full(cls, total_rbs: int) -> "ResourcePool":
        """Return a pool with every resource available."""

        return cls(total_rbs=total_rbs, free_rbs=total_rbs)

    @property
    def busy_rbs(self) -> int:
        return self.total_rbs - self.free_rbs


@dataclass(frozen=True)
class ActiveGrant:
    request_id: int
    rbs_assigned: int
    processing_assigned: float
    comm_power_assigned: float
    start_slot: int
    end_slot: int


@dataclass(frozen=True)
class LinkParams:
    """Link-level constants shared by every rate computation in a run."""

    c: float = RATE_PER_RB
    rb_count: int = DEFAULT_RB_COUNT
    snr_range: tuple[float, float] = (1.5, 3.0)

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise DomainError("link.c must be positive")
        if self.rb_count < 1:
            raise DomainError("link.rb_count must be >= 1")


DEFAULT_LINK = LinkParams()
