"""Per-slot event trace written as JSON lines."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, TextIO

from .link import required_rbs
from .model import DEFAULT_LINK, ActiveGrant, LinkParams, Request

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    ARRIVAL = "arrival"
    FAKE = "fake"
    ADMIT = "admit"
    RELEASE = "release"
    EXPIRE = "expire"


@dataclass(frozen=True)
class SlotEvent:
    slot: int
    kind: EventKind
    request_id: int
    rbs: int
    processing: float
    comm_power: float
    weight: int | None = None
    is_fake: bool | None = None

    @classmethod
    def for_request(
        cls,
        slot: int,
        kind: EventKind,
        request: Request,
        link: LinkParams = DEFAULT_LINK,
    ) -> "SlotEvent":
        return cls(
            slot=slot,
            kind=kind,
            request_id=request.id,
            rbs=required_rbs(request, link),
            processing=request.min_processing,
            comm_power=request.min_comm_power,
            weight=request.weight,
            is_fake=request.is_fake,
        )

    @classmethod
    def for_grant(cls, slot: int, kind: EventKind, grant: ActiveGrant) -> "SlotEvent":
        return cls(
            slot=slot,
            kind=kind,
            request_id=grant.request_id,
            rbs=grant.rbs_assigned,
            processing=grant.processing_assigned,
            comm_power=grant.comm_power_assigned,
        )


def event_to_dict(event: SlotEvent) -> dict[str, Any]:
    return {
        "slot": event.slot,
        "kind": event.kind.value,
        "request_id": event.request_id,
        "rbs": event.rbs,
        "processing": event.processing,
        "comm_power": event.comm_power,
        "weight": event.weight,
        "is_fake": event.is_fake,
    }


class SlotEventLog:
    """Append-only JSON-lines sink for :class:`SlotEvent` records.

    Write failures are logged and swallowed unless ``strict`` is set.
    """

    def __init__(self, target: str | Path | TextIO, *, strict: bool = False) -> None:
        self.strict = strict
        self.count = 0
        self._owned = not hasattr(target, "write")
        if self._owned:
            path = Path(target)  # type: ignore[arg-type]
            path.parent.mkdir(parents=True, exist_ok=True)
            self._handle: TextIO = path.open("w", encoding="utf-8")
        else:
            self._handle = target  # type: ignore[assignment]

    def emit(self, event: SlotEvent) -> None:
        serialized = json.dumps(event_to_dict(event), sort_keys=True, ensure_ascii=True)
        try:
            self._handle.write(serialized)
            self._handle.write("\n")
        except (OSError, ValueError) as exc:
            logger.warning("Event log write failed: %s", exc)
            if self.strict:
                raise
            return
        self.count += 1

    def close(self) -> None:
        if self._owned and not self._handle.closed:
            self._handle.close()
        logger.debug("Event log closed after %d events", self.count)

    def __enter__(self) -> "SlotEventLog":
        return self

    def __exit__(self, *_exc: object) -> None:
        self.close()


def read_events(path: str | Path) -> list[dict[str, Any]]:
    with Path(path).open("r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
