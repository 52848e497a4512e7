"""Link-rate helpers: BER curve, achievable rate, and RB sizing."""

from __future__ import annotations

import math

from .model import DEFAULT_LINK, RATE_PER_RB, DomainError, LinkParams, Request


def ber_from_snr(snr: float) -> float:
    """Return the coherent QPSK bit error rate ``0.5 * erfc(sqrt(snr))``.

    ``snr`` is the linear per-bit SNR. The curve is monotonically
    non-increasing and bounded by 0.5 as ``snr`` approaches zero.
    """

    if not snr > 0:
        raise DomainError(f"SNR must be positive, got {snr}")
    return 0.5 * math.erfc(math.sqrt(snr))


def achievable_rate(k: int, ber: float, *, c: float = RATE_PER_RB) -> float:
    """Return ``c * k * (1 - ber)`` in bits per second."""

    if not 0.0 <= ber < 1.0:
        raise DomainError(f"BER must be in [0, 1), got {ber}")
    if k < 0:
        raise DomainError(f"RB count must be non-negative, got {k}")
    return c * k * (1.0 - ber)


def min_rbs_for_rate(d: float, ber: float, *, c: float = RATE_PER_RB) -> int:
    """Return the smallest RB count whose achievable rate covers ``d``."""

    if d <= 0:
        raise DomainError(f"Rate demand must be positive, got {d}")
    k = max(1, int(math.ceil(d / achievable_rate(1, ber, c=c))))
    # The division can land one step off either way; settle on the rate formula.
    while k > 1 and achievable_rate(k - 1, ber, c=c) >= d:
        k -= 1
    while achievable_rate(k, ber, c=c) < d:
        k += 1
    return k


def required_rbs(req: Request, link: LinkParams = DEFAULT_LINK) -> int:
    """Return the minimal RB grant for ``req`` on ``link``."""

    return min_rbs_for_rate(req.min_rate, ber_from_snr(req.snr), c=link.c)


def rate_for_rbs(k: int, snr: float, *, c: float = RATE_PER_RB) -> float:
    """Return the rate demand that requires exactly ``k`` RBs at ``snr``."""

    return achievable_rate(k, ber_from_snr(snr), c=c)
