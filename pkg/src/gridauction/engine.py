"""Deterministic tick loop.

Each tick runs a fixed phase order: failure/repair sampling, presence-rule
evictions, completions, arrivals, global scheduling, then per-resource
local scheduling; accepted placements reserve a processor through their
termination tick.  Every run is fully determined by (scenario, params,
failure model): each component draws failures from its own seeded stream,
so adding a component never perturbs the others.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import domain
from .costs import StrategyParams, machine_cost
from .domain import AssignmentRecord, Eviction, GridState
from .scheduling import schedule_global, schedule_local

STATUS_COMPLETED = "completed"
STATUS_FAILED_MACHINE = "failed-machine"
STATUS_FAILED_RESOURCE = "failed-resource-network"
STATUS_FAILED_USER = "failed-user-network"
STATUS_REMOVED = "removed-user-left"

FAILURE_STATUSES = (STATUS_FAILED_MACHINE, STATUS_FAILED_RESOURCE,
                    STATUS_FAILED_USER)

DEFAULT_MAX_TICKS = 10_000


@dataclass(frozen=True)
class FailureModel:
    """Failure process settings; per-component MTBFs come from the specs."""

    repair_time: int = 30
    seed: int = 0
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.repair_time < 1:
            raise ValueError("repair_time must be >= 1 tick")


@dataclass(frozen=True)
class JobOutcome:
    """Terminal report row for one job."""

    job_id: str
    owner: str
    status: str
    arrival: int
    assign: int | None
    start: int | None
    termination: int
    resource: str | None
    machine: str | None
    raw_cost: float | None
    effective_cost: float | None


@dataclass(frozen=True)
class LoadingSample:
    """Loading fraction of one resource at one tick: 1 - free/total."""

    tick: int
    resource_id: str
    fraction: float


@dataclass
class TickReport:
    outcomes: list[JobOutcome] = field(default_factory=list)
    loading: list[LoadingSample] = field(default_factory=list)
    assigned: list[tuple[str, float, float]] = field(default_factory=list)
    presence_changes: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class RunReport:
    """Everything a finished (or truncated) run produced."""

    outcomes: list[JobOutcome]
    loading: list[LoadingSample]
    metrics: dict[str, float]
    per_user_processed: dict[str, int]
    truncated: bool
    ticks: int


def initial_state(scenario) -> GridState:
    """Fresh state at tick 0 with every component up and queues empty."""
    presence: dict[str, bool] = {}
    for user in scenario.users:
        presence[user.id] = True
    for res in scenario.resources:
        presence[res.id] = True
        for mspec in res.machines:
            presence[mspec.id] = True
    return GridState(
        clock=0,
        users={u.id: u for u in scenario.users},
        resources={r.id: r for r in scenario.resources},
        jobs={j.id: j for j in scenario.jobs},
        presence=presence,
    )


def failure_streams(scenario, seed: int) -> dict[str, random.Random]:
    """One independent RNG stream per failable component."""
    streams: dict[str, random.Random] = {}
    for user in scenario.users:
        streams[user.id] = random.Random(f"{seed}:{user.id}")
    for res in scenario.resources:
        streams[res.id] = random.Random(f"{seed}:{res.id}")
        for mspec in res.machines:
            streams[mspec.id] = random.Random(f"{seed}:{mspec.id}")
    return streams


def tick_failure_probability(mtbf: float) -> float:
    """Per-tick failure probability for exponential inter-failure times."""
    return -math.expm1(-1.0 / mtbf)


def sample_failures(state: GridState, model: FailureModel,
                    streams: dict[str, random.Random],
                    t: int) -> list[tuple[str, str]]:
    """Repair due components, then let every up component fail independently
    with its discretized exponential rate.  Returns (id, "up"/"down") events."""
    changes: list[tuple[str, str]] = []
    for cid in sorted(state.repair_at):
        if state.repair_at[cid] <= t:
            del state.repair_at[cid]
            state.presence[cid] = True
            changes.append((cid, "up"))
    if not model.enabled:
        return changes

    def visit(cid: str, mtbf: float) -> None:
        if not state.presence[cid]:
            return
        if streams[cid].random() < tick_failure_probability(mtbf):
            state.presence[cid] = False
            state.repair_at[cid] = t + model.repair_time
            changes.append((cid, "down"))

    for uid in sorted(state.users):
        visit(uid, state.users[uid].net_mtbf)
    for rid in sorted(state.resources):
        res = state.resources[rid]
        visit(rid, res.net_mtbf)
        for mspec in res.machines:
            visit(mspec.id, mspec.mtbf)
    return changes


def _eviction_status(ev: Eviction) -> str:
    if ev.reason == domain.MACHINE_DOWN:
        return STATUS_FAILED_MACHINE
    if ev.reason == domain.RESOURCE_NET_DOWN:
        return STATUS_FAILED_RESOURCE
    return STATUS_FAILED_USER if ev.was_live else STATUS_REMOVED


def _eviction_outcome(state: GridState, ev: Eviction, t: int) -> JobOutcome:
    job = state.jobs[ev.job]
    rec = ev.record
    return JobOutcome(
        job_id=job.id, owner=job.owner, status=_eviction_status(ev),
        arrival=job.arrival_time,
        assign=rec.assign_time if rec else None,
        start=rec.assign_time + rec.transfer_time if rec else None,
        termination=t,
        resource=rec.resource if rec else None,
        machine=rec.machine if rec else None,
        raw_cost=rec.raw_cost if rec else None,
        effective_cost=rec.effective_cost if rec else None)


def step(state: GridState, params: StrategyParams, model: FailureModel,
         streams: dict[str, random.Random], validate: bool = False) -> TickReport:
    """Advance one tick; returns the tick's outcomes and loading samples."""
    t = state.clock
    report = TickReport()

    # 1. failures and repairs
    report.presence_changes = sample_failures(state, model, streams, t)

    # 2. evictions
    for ev in domain.apply_presence_rules(state, t):
        report.outcomes.append(_eviction_outcome(state, ev, t))

    # 3. completions
    still_live: list[AssignmentRecord] = []
    for rec in state.live:
        if rec.termination_time <= t:
            state.finished.add(rec.job)
            report.outcomes.append(JobOutcome(
                job_id=rec.job, owner=rec.owner, status=STATUS_COMPLETED,
                arrival=rec.arrival_time, assign=rec.assign_time,
                start=rec.assign_time + rec.transfer_time,
                termination=rec.termination_time,
                resource=rec.resource, machine=rec.machine,
                raw_cost=rec.raw_cost, effective_cost=rec.effective_cost))
        else:
            still_live.append(rec)
    state.live = still_live

    # 4. arrivals
    arrivals = sorted(j.id for j in state.jobs.values()
                      if j.arrival_time == t)
    state.global_queue.extend(arrivals)

    # 5. global scheduling
    counts = domain.free_counts(state, t)
    plan = schedule_global(state, params, t, counts=counts)
    if plan.assignments:
        assigned_ids = {j for j, _ in plan.assignments}
        state.global_queue = [j for j in state.global_queue
                              if j not in assigned_ids]
        for job_id, rid in plan.assignments:
            state.local_queues.setdefault(rid, []).append(job_id)

    # 6-7. local scheduling; placements become live records
    for rid in sorted(r for r in state.local_queues if state.local_queues[r]):
        local = schedule_local(state, rid, params, t, counts=counts)
        for job_id, machine_id in local.placements:
            job = state.jobs[job_id]
            breakdown = plan.costs[job_id]
            transfer_ticks = math.ceil(breakdown.transfer)
            proc_ticks = math.ceil(
                machine_cost(job, state.machine_spec(machine_id)))
            rec = AssignmentRecord(
                job=job_id, owner=job.owner, resource=rid,
                machine=machine_id, arrival_time=job.arrival_time,
                assign_time=t, transfer_time=transfer_ticks,
                processing_time=proc_ticks,
                termination_time=t + transfer_ticks + proc_ticks,
                raw_cost=breakdown.transfer + breakdown.processing,
                effective_cost=breakdown.effective)
            state.live.append(rec)
            report.assigned.append(
                (job_id, rec.raw_cost, rec.effective_cost))
        state.local_queues[rid] = []
        state.global_queue.extend(local.bounced)

    # loading samples reflect the post-assignment occupancy
    _, free_resources = domain.free_counts(state, t)
    for rid in sorted(state.resources):
        total = state.resources[rid].total_processors
        fraction = 1.0 - free_resources[rid] / total
        report.loading.append(LoadingSample(t, rid, fraction))

    if validate:
        verify_state(state, t)

    # 8. clock
    state.clock = t + 1
    return report


def verify_state(state: GridState, t: int) -> None:
    """Assert the partition and capacity invariants; raises on violation."""
    seen: dict[str, str] = {}

    def claim(job_id: str, where: str) -> None:
        if job_id in seen:
            raise AssertionError(
                f"tick {t}: job {job_id} in both {seen[job_id]} and {where}")
        seen[job_id] = where

    for jid in state.global_queue:
        claim(jid, "global-queue")
    for rid, queue in state.local_queues.items():
        for jid in queue:
            claim(jid, f"local-queue:{rid}")
    for rec in state.live:
        claim(rec.job, "live")
    for jid in state.finished:
        claim(jid, "finished")
    for jid, job in state.jobs.items():
        if job.arrival_time <= t and jid not in seen:
            raise AssertionError(f"tick {t}: job {jid} arrived but is nowhere")
        if job.arrival_time > t and jid in seen:
            raise AssertionError(f"tick {t}: job {jid} present before arrival")

    # capacity recount via the per-entity operations (independent route)
    fast_machines, fast_resources = domain.free_counts(state, t)
    for rid, res in state.resources.items():
        for mspec in res.machines:
            free = domain.free_procs_machine(state, mspec.id, t)
            if not 0 <= free <= mspec.proc_count:
                raise AssertionError(
                    f"tick {t}: machine {mspec.id} free count {free}")
            if free != fast_machines[mspec.id]:
                raise AssertionError(
                    f"tick {t}: machine {mspec.id} recount mismatch")
        if domain.free_procs_resource(state, rid, t) != fast_resources[rid]:
            raise AssertionError(f"tick {t}: resource {rid} recount mismatch")
    for rec in state.live:
        if rec.termination_time > t and not state.presence[rec.machine]:
            raise AssertionError(
                f"tick {t}: live job {rec.job} on down machine {rec.machine}")


def run(scenario, params: StrategyParams,
        model: FailureModel = FailureModel(),
        max_ticks: int = DEFAULT_MAX_TICKS,
        validate: bool = False) -> RunReport:
    """Step until every job is terminal or ``max_ticks`` is reached."""
    state = initial_state(scenario)
    streams = failure_streams(scenario, model.seed)
    total_jobs = len(scenario.jobs)
    outcomes: list[JobOutcome] = []
    loading: list[LoadingSample] = []
    assigned: list[tuple[str, float, float]] = []
    truncated = False
    while True:
        if len(outcomes) == total_jobs:
            break
        if state.clock >= max_ticks:
            truncated = True
            break
        tick = step(state, params, model, streams, validate=validate)
        outcomes.extend(tick.outcomes)
        loading.extend(tick.loading)
        assigned.extend(tick.assigned)

    per_user = {uid: 0 for uid in sorted(state.users)}
    completion_times: list[int] = []
    failed = removed = 0
    for out in outcomes:
        if out.status == STATUS_COMPLETED:
            per_user[out.owner] += 1
            completion_times.append(out.termination - out.arrival)
        elif out.status in FAILURE_STATUSES:
            failed += 1
        else:
            removed += 1

    def mean(values) -> float:
        values = list(values)
        return sum(values) / len(values) if values else 0.0

    metrics: dict[str, float] = {
        "total_jobs": float(total_jobs),
        "processed_jobs": float(len(completion_times)),
        "failed_jobs": float(failed),
        "removed_jobs": float(removed),
        "unfinished_jobs": float(total_jobs - len(outcomes)),
        "assigned_jobs": float(len(assigned)),
        "mean_assigned_raw_cost": mean(a[1] for a in assigned),
        "mean_assigned_effective_cost": mean(a[2] for a in assigned),
        "mean_completion_time": mean(completion_times),
        "mean_loading_variance": mean(v for _, v in
                                      loading_variance_series(loading)),
        "ticks": float(state.clock),
        "truncated": 1.0 if truncated else 0.0,
    }
    return RunReport(outcomes, loading, metrics, per_user, truncated,
                     state.clock)


def loading_variance_series(loading: list[LoadingSample]) -> list[tuple[int, float]]:
    """Per-tick population variance of the loading fraction across resources."""
    by_tick: dict[int, list[float]] = {}
    for sample in loading:
        by_tick.setdefault(sample.tick, []).append(sample.fraction)
    series = []
    for t in sorted(by_tick):
        values = by_tick[t]
        mu = sum(values) / len(values)
        series.append((t, sum((v - mu) ** 2 for v in values) / len(values)))
    return series
