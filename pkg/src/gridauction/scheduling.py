"""Global scheduling via the auction solver, local scheduling via
shortest-job-first, and the integer water-filling quotas that approximate
the balancing constraints at both levels."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import domain
from .auction import AssignmentInstance, solve
from .costs import (CostBreakdown, ResourceView, StrategyParams, cost_matrix,
                    effective_cost)
from .domain import GridState


@dataclass
class GlobalPlan:
    """Per-tick job-to-resource assignments; unassigned jobs stay queued."""

    assignments: list[tuple[str, str]] = field(default_factory=list)
    deferred: list[str] = field(default_factory=list)
    costs: dict[str, CostBreakdown] = field(default_factory=dict)


@dataclass
class LocalPlan:
    """Per-resource job-to-machine placements; ``bounced`` jobs lost their
    slot to a same-tick capacity drop and return to the global queue."""

    placements: list[tuple[str, str]] = field(default_factory=list)
    bounced: list[str] = field(default_factory=list)


def compute_quotas(free: list[int], totals: list[int], demand: int) -> list[int]:
    """Integer water-filling: grant capacity units one at a time to the
    entry with the largest remaining free fraction (ties to the lowest
    index) until ``min(demand, sum(free))`` units are placed.

    Minimizes the maximum post-allocation free fraction, which keeps the
    loading fractions as equal as integers allow.
    """
    if demand < 0:
        raise ValueError("demand must be >= 0")
    if len(free) != len(totals):
        raise ValueError("free and totals must have equal length")
    for k, (f, c) in enumerate(zip(free, totals)):
        if c < 1:
            raise ValueError(f"totals[{k}] must be >= 1")
        if not 0 <= f <= c:
            raise ValueError(f"free[{k}]={f} outside [0, {c}]")
    grants = [0] * len(free)
    for _ in range(min(demand, sum(free))):
        best = -1
        for k in range(len(free)):
            if grants[k] >= free[k]:
                continue
            if best < 0:
                best = k
                continue
            # compare (free-g)/total by cross-multiplication: stays exact
            lhs = (free[k] - grants[k]) * totals[best]
            rhs = (free[best] - grants[best]) * totals[k]
            if lhs > rhs:
                best = k
        grants[best] += 1
    return grants


def build_view(state: GridState, resource_id: str, t: int,
               free_machines: dict[str, int]) -> ResourceView:
    """Snapshot a ready resource for the cost formulas."""
    res = state.resource_spec(resource_id)
    weighted = 0.0
    free_total = 0
    mtbf_sum = 0.0
    up = 0
    for mspec in res.machines:
        if not state.presence[mspec.id]:
            continue
        up += 1
        mtbf_sum += mspec.mtbf
        acm = free_machines[mspec.id]
        weighted += acm * mspec.proc_quality
        free_total += acm
    if free_total == 0:
        raise domain.UndefinedQualityError(
            f"resource {resource_id} is not ready at tick {t}")
    return ResourceView(resource_id, res.bandwidth, weighted / free_total,
                        mtbf_sum / up, res.net_mtbf)


def schedule_global(state: GridState, params: StrategyParams, t: int,
                    counts=None) -> GlobalPlan:
    """Assign queued jobs to ready resources at minimum total effective cost.

    Column capacities are the free-processor counts, replaced by
    water-filling quotas when global balancing is on.  Capacities are
    clipped at the queue length before expansion; a column can never
    receive more jobs than exist, so the plan is unchanged.
    """
    queue = list(state.global_queue)
    if not queue:
        return GlobalPlan()
    free_machines, free_resources = counts or domain.free_counts(state, t)
    ready = sorted(r for r in state.resources if free_resources[r] > 0)
    if not ready:
        return GlobalPlan(deferred=queue)

    jobs = [state.jobs[j] for j in queue]
    caps = [free_resources[r] for r in ready]
    if params.balance_global:
        totals = [domain.resource_total_up(state, r, t) for r in ready]
        caps = compute_quotas(caps, totals, len(jobs))
    kept = [(r, min(c, len(jobs))) for r, c in zip(ready, caps) if c > 0]
    if not kept:
        return GlobalPlan(deferred=queue)
    columns = [r for r, _ in kept]
    views = [build_view(state, r, t, free_machines) for r in columns]

    matrix = cost_matrix(jobs, state.users, views, params, t)
    result = solve(AssignmentInstance(matrix, [c for _, c in kept]))

    plan = GlobalPlan()
    for i, job in enumerate(jobs):
        col = result.matching[i]
        if col is None:
            plan.deferred.append(job.id)
        else:
            resource_id = columns[col]
            plan.assignments.append((job.id, resource_id))
            plan.costs[job.id] = effective_cost(
                job, state.users[job.owner], views[col], params, t)
    return plan


def schedule_local(state: GridState, resource_id: str, params: StrategyParams,
                   t: int, counts=None) -> LocalPlan:
    """Place a resource's assigned jobs on its machines, shortest job to
    the fastest free processor; jobs beyond the slot count bounce back."""
    res = state.resource_spec(resource_id)  # raises for unknown ids
    queue = list(state.local_queues.get(resource_id, []))
    if not queue:
        return LocalPlan()
    free_machines, _ = counts or domain.free_counts(state, t)

    machines = sorted((m for m in res.machines if free_machines[m.id] > 0),
                      key=lambda m: m.id)
    caps = [free_machines[m.id] for m in machines]
    if params.balance_local and machines:
        caps = compute_quotas(caps, [m.proc_count for m in machines],
                              len(queue))

    slots = []
    for mspec, cap in zip(machines, caps):
        slots.extend([mspec] * cap)
    slots.sort(key=lambda m: (-m.proc_quality, m.id))

    jobs = sorted((state.jobs[j] for j in queue),
                  key=lambda j: (j.length, j.id))
    plan = LocalPlan()
    for job, mspec in zip(jobs, slots):
        plan.placements.append((job.id, mspec.id))
    plan.bounced = [j.id for j in jobs[len(slots):]]
    return plan
