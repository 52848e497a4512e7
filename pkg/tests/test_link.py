import numpy as np
import pytest

from ranslice.link import (
    achievable_rate,
    ber_from_snr,
    min_rbs_for_rate,
    rate_for_rbs,
    required_rbs,
)
from ranslice.model import DEFAULT_LINK, DEFAULT_RB_COUNT, RATE_PER_RB, DomainError, LinkParams


def test_ber_vanishes_at_high_snr() -> None:
    assert ber_from_snr(1e6) == pytest.approx(0.0, abs=1e-12)
    assert ber_from_snr(1e-9) <= 0.5


def test_ber_is_monotone() -> None:
    assert ber_from_snr(3.0) < ber_from_snr(1.5)
    grid = np.linspace(0.05, 10.0, 200)
    values = [ber_from_snr(float(snr)) for snr in grid]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_ber_regression_value() -> None:
    # 0.5 * erfc(sqrt(1.5))
    assert ber_from_snr(1.5) == pytest.approx(0.041632, rel=1e-4)


@pytest.mark.parametrize("snr", [0.0, -1.0])
def test_ber_rejects_non_positive_snr(snr: float) -> None:
    with pytest.raises(DomainError):
        ber_from_snr(snr)


def test_achievable_rate_examples() -> None:
    assert achievable_rate(1, 0.0) == pytest.approx(12.59e6)
    assert achievable_rate(0, 0.3) == 0.0
    assert achievable_rate(2, 0.01) == pytest.approx(24.9282e6)


@pytest.mark.parametrize("ber", [-0.1, 1.0, 1.5])
def test_achievable_rate_rejects_bad_ber(ber: float) -> None:
    with pytest.raises(DomainError):
        achievable_rate(1, ber)


def test_min_rbs_examples() -> None:
    assert min_rbs_for_rate(12.59e6, 0.0) == 1
    assert min_rbs_for_rate(25e6, 0.01) == 3


def test_min_rbs_matches_linear_scan() -> None:
    rng = np.random.default_rng(7)
    for _ in range(1000):
        demand = float(rng.uniform(1e5, 2e8))
        ber = float(rng.uniform(0.0, 0.5))
        k = 1
        while achievable_rate(k, ber) < demand:
            k += 1
        assert min_rbs_for_rate(demand, ber) == k


def test_rate_for_rbs_requires_exactly_that_many_rbs() -> None:
    for snr in (0.5, 1.5, 2.25, 6.0):
        for k in range(1, 12):
            demand = rate_for_rbs(k, snr)
            assert min_rbs_for_rate(demand, ber_from_snr(snr)) == k


def test_required_rbs_uses_link_rate(make_request) -> None:
    request = make_request(1, rbs=4)
    assert required_rbs(request) == 4
    doubled = LinkParams(c=2 * RATE_PER_RB)
    assert required_rbs(request, doubled) == 2


def test_link_defaults() -> None:
    link = LinkParams()
    assert link.rb_count == DEFAULT_RB_COUNT == 11
    assert link.c == RATE_PER_RB
    assert link == DEFAULT_LINK
    with pytest.raises(DomainError):
        LinkParams(rb_count=0)
