"""Grid entities and the shared information state queried by the schedulers.

Ids are plain strings kept unique across users, resources, machines and
jobs.  The clock is an integer tick (one tick = one second); fractional
durations are rounded up to whole ticks when assignments are recorded.
A processor is reserved from the assignment tick through the termination
tick, transfer included.
"""
from __future__ import annotations

from dataclasses import dataclass, field

USER_DOWN = "user-down"
MACHINE_DOWN = "machine-down"
RESOURCE_NET_DOWN = "resource-network-down"


class UnknownEntityError(KeyError):
    """An id that does not name a known user, resource, machine or job."""


class UndefinedQualityError(ValueError):
    """Processing quality requested for a resource with no free processors."""


@dataclass(frozen=True)
class JobSpec:
    """A unit of work: ``length`` MI of compute shipping ``volume`` KB of input."""

    id: str
    owner: str
    arrival_time: int
    priority: float
    length: float
    volume: float

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError(f"job {self.id}: length must be positive")
        if self.volume <= 0:
            raise ValueError(f"job {self.id}: volume must be positive")
        if self.arrival_time < 0:
            raise ValueError(f"job {self.id}: arrival_time must be >= 0")
        if self.priority < 1:
            raise ValueError(f"job {self.id}: priority must be >= 1")


@dataclass(frozen=True)
class UserSpec:
    """A job owner with a network link and a purchased service level."""

    id: str
    qos: float
    bandwidth: float  # KB/s
    net_mtbf: float   # mean seconds between network-link failures

    def __post_init__(self) -> None:
        if self.bandwidth <= 0:
            raise ValueError(f"user {self.id}: bandwidth must be positive")
        if self.net_mtbf <= 0:
            raise ValueError(f"user {self.id}: net_mtbf must be positive")
        if self.qos < 1:
            raise ValueError(f"user {self.id}: qos must be >= 1")


@dataclass(frozen=True)
class MachineSpec:
    """A homogeneous pool of ``proc_count`` processors at ``proc_quality`` MI/s."""

    id: str
    proc_quality: float  # MI/s of each processor
    proc_count: int
    mtbf: float          # mean seconds between machine failures

    def __post_init__(self) -> None:
        if self.proc_quality <= 0:
            raise ValueError(f"machine {self.id}: proc_quality must be positive")
        if self.proc_count < 1:
            raise ValueError(f"machine {self.id}: proc_count must be >= 1")
        if self.mtbf <= 0:
            raise ValueError(f"machine {self.id}: mtbf must be positive")


@dataclass(frozen=True)
class ResourceSpec:
    """A site: machines behind one shared network link."""

    id: str
    bandwidth: float  # KB/s
    net_mtbf: float   # mean seconds between network-link failures
    machines: tuple[MachineSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "machines", tuple(self.machines))
        if not self.machines:
            raise ValueError(f"resource {self.id}: needs at least one machine")
        if self.bandwidth <= 0:
            raise ValueError(f"resource {self.id}: bandwidth must be positive")
        if self.net_mtbf <= 0:
            raise ValueError(f"resource {self.id}: net_mtbf must be positive")

    @property
    def total_processors(self) -> int:
        return sum(m.proc_count for m in self.machines)


@dataclass(frozen=True)
class AssignmentRecord:
    """One live placement: a job occupying one processor of one machine.

    ``transfer_time`` and ``processing_time`` are whole ticks;
    ``termination_time == assign_time + transfer_time + processing_time``.
    """

    job: str
    owner: str
    resource: str
    machine: str
    arrival_time: int
    assign_time: int
    transfer_time: int
    processing_time: int
    termination_time: int
    raw_cost: float = 0.0        # transfer + processing seconds at assignment
    effective_cost: float = 0.0  # strategy-weighted cost at assignment

    def __post_init__(self) -> None:
        if min(self.arrival_time, self.assign_time, self.transfer_time,
               self.processing_time, self.termination_time) < 0:
            raise ValueError(f"record for {self.job}: negative time")
        expected = self.assign_time + self.transfer_time + self.processing_time
        if self.termination_time != expected:
            raise ValueError(
                f"record for {self.job}: termination_time {self.termination_time} "
                f"!= assign + transfer + processing = {expected}")


@dataclass(frozen=True)
class Eviction:
    """A job removed from the system by a presence rule."""

    job: str
    reason: str  # USER_DOWN | MACHINE_DOWN | RESOURCE_NET_DOWN
    was_live: bool
    record: AssignmentRecord | None = None


@dataclass
class GridState:
    """Mutable simulation state: specs, presence flags, queues, live placements.

    Invariants (checked by the engine's validate mode):
      * a job id is in at most one of global_queue / a local queue / live /
        finished at any tick;
      * live placements never exceed machine capacities;
      * every live placement's machine and resource were up when assigned.
    """

    clock: int
    users: dict[str, UserSpec]
    resources: dict[str, ResourceSpec]
    jobs: dict[str, JobSpec]
    presence: dict[str, bool]
    repair_at: dict[str, int] = field(default_factory=dict)
    global_queue: list[str] = field(default_factory=list)
    local_queues: dict[str, list[str]] = field(default_factory=dict)
    live: list[AssignmentRecord] = field(default_factory=list)
    finished: set[str] = field(default_factory=set)
    _machine_home: dict[str, str] = field(
        default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for rid, res in self.resources.items():
            for mspec in res.machines:
                if mspec.id in self._machine_home:
                    raise ValueError(f"duplicate machine id {mspec.id}")
                self._machine_home[mspec.id] = rid

    def machine_spec(self, machine_id: str) -> MachineSpec:
        rid = self._machine_home.get(machine_id)
        if rid is None:
            raise UnknownEntityError(machine_id)
        for mspec in self.resources[rid].machines:
            if mspec.id == machine_id:
                return mspec
        raise UnknownEntityError(machine_id)

    def machine_home(self, machine_id: str) -> str:
        rid = self._machine_home.get(machine_id)
        if rid is None:
            raise UnknownEntityError(machine_id)
        return rid

    def resource_spec(self, resource_id: str) -> ResourceSpec:
        res = self.resources.get(resource_id)
        if res is None:
            raise UnknownEntityError(resource_id)
        return res

    def is_up(self, entity_id: str) -> bool:
        return self.presence.get(entity_id, False)


def free_procs_machine(state: GridState, machine_id: str, t: int) -> int:
    """Free processors on one machine: 0 when down, else capacity minus
    the live placements still running (termination after ``t``)."""
    spec = state.machine_spec(machine_id)
    if not state.presence[machine_id]:
        return 0
    busy = sum(1 for rec in state.live
               if rec.machine == machine_id and rec.termination_time > t)
    return spec.proc_count - busy


def free_procs_resource(state: GridState, resource_id: str, t: int) -> int:
    """Free processors on a resource: 0 when its network is down, else the
    sum over its up machines."""
    res = state.resource_spec(resource_id)
    if not state.presence[resource_id]:
        return 0
    return sum(free_procs_machine(state, m.id, t) for m in res.machines)


def ready_resources(state: GridState, t: int) -> set[str]:
    """Resources that can accept at least one job right now."""
    return {rid for rid in state.resources
            if free_procs_resource(state, rid, t) > 0}


def ready_machines(state: GridState, resource_id: str, t: int) -> set[str]:
    """Machines of one resource with at least one free processor."""
    res = state.resource_spec(resource_id)
    return {m.id for m in res.machines
            if free_procs_machine(state, m.id, t) > 0}


def resource_quality(state: GridState, resource_id: str, t: int) -> float:
    """Free-processor-weighted mean MI/s over the resource's machines.

    Callers must restrict themselves to ready resources; with zero free
    processors the mean is undefined.
    """
    res = state.resource_spec(resource_id)
    weighted = 0.0
    total = 0
    for mspec in res.machines:
        acm = free_procs_machine(state, mspec.id, t)
        weighted += acm * mspec.proc_quality
        total += acm
    if total == 0:
        raise UndefinedQualityError(
            f"resource {resource_id} has no free processors at tick {t}")
    return weighted / total


def resource_total_up(state: GridState, resource_id: str, t: int) -> int:
    """Processor capacity currently reachable: sum of c_m over up machines."""
    res = state.resource_spec(resource_id)
    return sum(m.proc_count for m in res.machines if state.presence[m.id])


def free_counts(state: GridState, t: int) -> tuple[dict[str, int], dict[str, int]]:
    """One-pass recount of free processors per machine and per resource.

    Equivalent to calling free_procs_machine / free_procs_resource for every
    entity; kept separate so the per-entity operations stay an independent
    brute-force check.
    """
    busy: dict[str, int] = {}
    for rec in state.live:
        if rec.termination_time > t:
            busy[rec.machine] = busy.get(rec.machine, 0) + 1
    per_machine: dict[str, int] = {}
    per_resource: dict[str, int] = {}
    for rid, res in state.resources.items():
        total = 0
        for mspec in res.machines:
            if state.presence[mspec.id]:
                acm = mspec.proc_count - busy.get(mspec.id, 0)
            else:
                acm = 0
            per_machine[mspec.id] = acm
            total += acm
        per_resource[rid] = total if state.presence[rid] else 0
    return per_machine, per_resource


def apply_presence_rules(state: GridState, t: int) -> list[Eviction]:
    """Remove every job stranded by a down component.

    Rules, applied in order: jobs (queued or live) of a down user leave the
    system; live jobs on a down machine leave; live jobs behind a down
    resource network leave.  Live placements whose termination tick has
    already been reached are left for the completion phase.
    """
    evictions: list[Eviction] = []
    gone: set[str] = set()

    def user_is_down(job_id: str) -> bool:
        return not state.presence[state.jobs[job_id].owner]

    # Rule 1: down users lose queued jobs ...
    for jid in [j for j in state.global_queue if user_is_down(j)]:
        evictions.append(Eviction(jid, USER_DOWN, was_live=False))
        gone.add(jid)
    state.global_queue = [j for j in state.global_queue if j not in gone]
    for rid in sorted(state.local_queues):
        queue = state.local_queues[rid]
        for jid in [j for j in queue if user_is_down(j)]:
            evictions.append(Eviction(jid, USER_DOWN, was_live=False))
            gone.add(jid)
        state.local_queues[rid] = [j for j in queue if j not in gone]

    # ... and live jobs; rules 2 and 3 cover failed machines and networks.
    keep: list[AssignmentRecord] = []
    for rec in state.live:
        if rec.termination_time <= t or rec.job in gone:
            keep.append(rec)
            continue
        if not state.presence[rec.owner]:
            evictions.append(Eviction(rec.job, USER_DOWN, True, rec))
        elif not state.presence[rec.machine]:
            evictions.append(Eviction(rec.job, MACHINE_DOWN, True, rec))
        elif not state.presence[rec.resource]:
            evictions.append(Eviction(rec.job, RESOURCE_NET_DOWN, True, rec))
        else:
            keep.append(rec)
            continue
        gone.add(rec.job)
    state.live = keep
    state.finished.update(gone)
    return evictions
