"""Multi-resource feasibility, allocation, and release accounting."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterable

from .link import required_rbs
from .model import (
    BUDGET_TOLERANCE,
    DEFAULT_LINK,
    AccountingError,
    ActiveGrant,
    AllocationError,
    LinkParams,
    Request,
    ResourcePool,
)


def feasible(
    pool: ResourcePool, req: Request, link: LinkParams = DEFAULT_LINK
) -> bool:
    """Return ``True`` when the minimal grant for ``req`` fits into ``pool``."""

    return (
        required_rbs(req, link) <= pool.free_rbs
        and req.min_processing <= pool.free_processing + BUDGET_TOLERANCE
        and req.min_comm_power <= pool.free_comm_power + BUDGET_TOLERANCE
    )


def allocate(
    pool: ResourcePool,
    req: Request,
    slot: int,
    link: LinkParams = DEFAULT_LINK,
) -> tuple[ResourcePool, ActiveGrant]:
    """Grant exactly the minimum resources of ``req`` starting at ``slot``."""

    if not feasible(pool, req, link):
        raise AllocationError(
            f"Request {req.id} does not fit: needs {required_rbs(req, link)} RBs, "
            f"{req.min_processing:.3f} CPU, {req.min_comm_power:.3f} power; "
            f"pool has {pool.free_rbs} RBs, {pool.free_processing:.3f} CPU, "
            f"{pool.free_comm_power:.3f} power"
        )
    grant = ActiveGrant(
        request_id=req.id,
        rbs_assigned=required_rbs(req, link),
        processing_assigned=req.min_processing,
        comm_power_assigned=req.min_comm_power,
        start_slot=slot,
        end_slot=slot + req.lifetime,
    )
    updated = replace(
        pool,
        free_rbs=pool.free_rbs - grant.rbs_assigned,
        free_processing=max(0.0, pool.free_processing - grant.processing_assigned),
        free_comm_power=max(0.0, pool.free_comm_power - grant.comm_power_assigned),
    )
    return updated, grant


def release(pool: ResourcePool, grants: Iterable[ActiveGrant]) -> ResourcePool:
    """Return ``pool`` with the resources of ``grants`` handed back."""

    rbs = pool.free_rbs
    processing = pool.free_processing
    comm_power = pool.free_comm_power
    for grant in grants:
        rbs += grant.rbs_assigned
        processing += grant.processing_assigned
        comm_power += grant.comm_power_assigned
    if rbs > pool.total_rbs:
        raise AccountingError(
            f"Release overflow: {rbs} free RBs exceeds total {pool.total_rbs}"
        )
    if processing > 1.0 + BUDGET_TOLERANCE or comm_power > 1.0 + BUDGET_TOLERANCE:
        raise AccountingError(
            f"Release overflow: processing={processing:.12f} comm_power={comm_power:.12f}"
        )
    return replace(
        pool,
        free_rbs=rbs,
        free_processing=min(processing, 1.0),
        free_comm_power=min(comm_power, 1.0),
    )


def check_conservation(pool: ResourcePool, grants: Iterable[ActiveGrant]) -> None:
    """Raise :class:`AccountingError` unless free + granted equals each budget."""

    grant_list = list(grants)
    held_rbs = sum(grant.rbs_assigned for grant in grant_list)
    held_processing = math.fsum(grant.processing_assigned for grant in grant_list)
    held_comm = math.fsum(grant.comm_power_assigned for grant in grant_list)
    if pool.free_rbs + held_rbs != pool.total_rbs:
        raise AccountingError(
            f"RB conservation broken: free {pool.free_rbs} + held {held_rbs} "
            f"!= total {pool.total_rbs}"
        )
    if held_processing > 1.0 + 1e-6:
        raise AccountingError(f"Processing over-committed: {held_processing:.9f}")
    if not math.isclose(pool.free_processing + held_processing, 1.0, abs_tol=1e-6):
        raise AccountingError(
            f"Processing conservation broken: free {pool.free_processing:.9f} "
            f"+ held {held_processing:.9f} != 1"
        )
    if not math.isclose(pool.free_comm_power + held_comm, 1.0, abs_tol=1e-6):
        raise AccountingError(
            f"Power conservation broken: free {pool.free_comm_power:.9f} "
            f"+ held {held_comm:.9f} != 1"
        )
