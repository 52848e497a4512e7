from typing import Callable

import pytest

from ranslice.link import rate_for_rbs
from ranslice.model import Request


@pytest.fixture
def make_request() -> Callable[..., Request]:
    """Build a request that needs exactly ``rbs`` RBs on the default link."""

    def factory(
        request_id: int,
        *,
        rbs: int = 1,
        weight: int = 3,
        arrival: int = 0,
        deadline: int | None = None,
        lifetime: int = 1,
        origin: int = 0,
        is_fake: bool = False,
        processing: float = 0.1,
        comm_power: float = 0.1,
        snr: float = 2.0,
    ) -> Request:
        return Request(
            id=request_id,
            origin=origin,
            is_fake=is_fake,
            weight=weight,
            min_rate=rate_for_rbs(rbs, snr),
            min_processing=processing,
            min_comm_power=comm_power,
            snr=snr,
            lifetime=lifetime,
            deadline_slot=arrival + 5 if deadline is None else deadline,
            arrival_slot=arrival,
        )

    return factory
