"""Random scenario synthesis from property ranges, plus scenario JSON I/O.

Every per-entity attribute is drawn uniformly (integers) from its
[min, max] range; the draw order is fixed, so a (properties, seed) pair
always yields the same scenario.  Arrivals are uniform over the horizon,
or front-loaded into its first tenth in peak mode.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .domain import JobSpec, MachineSpec, ResourceSpec, UserSpec
from .properties import GridProperties, JobProperties, UserProperties


@dataclass(frozen=True)
class Scenario:
    users: tuple[UserSpec, ...]
    resources: tuple[ResourceSpec, ...]
    jobs: tuple[JobSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "jobs", tuple(self.jobs))


def generate_scenario(grid: GridProperties, users: UserProperties,
                      jobs: JobProperties, n_job_sets: int = 30, seed: int = 0,
                      jobs_per_set: int = 10, horizon: int = 100,
                      peak: bool = False) -> Scenario:
    """Draw a full scenario: resources with machines, users, and
    ``n_job_sets * jobs_per_set`` jobs owned by random users."""
    if n_job_sets < 0 or jobs_per_set < 0:
        raise ValueError("job counts must be >= 0")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = random.Random(seed)

    resource_specs = []
    for i in range(1, grid.number_of_resources + 1):
        bandwidth = rng.randint(grid.min_resource_bandwidth,
                                grid.max_resource_bandwidth)
        net_mtbf = rng.randint(grid.min_resource_net_mtbf,
                               grid.max_resource_net_mtbf)
        n_machines = rng.randint(grid.min_machines, grid.max_machines)
        machines = []
        for k in range(1, n_machines + 1):
            machines.append(MachineSpec(
                id=f"r{i:02d}m{k:02d}",
                proc_quality=rng.randint(grid.min_proc_speed,
                                         grid.max_proc_speed),
                proc_count=rng.randint(grid.min_procs, grid.max_procs),
                mtbf=rng.randint(grid.min_machine_mtbf,
                                 grid.max_machine_mtbf)))
        resource_specs.append(ResourceSpec(
            id=f"r{i:02d}", bandwidth=bandwidth, net_mtbf=net_mtbf,
            machines=tuple(machines)))

    user_specs = []
    for i in range(1, users.number_of_users + 1):
        net_mtbf = rng.randint(users.min_net_mtbf, users.max_net_mtbf)
        bandwidth = rng.randint(users.min_bandwidth, users.max_bandwidth)
        qos = rng.randint(users.min_qos, users.max_qos)
        user_specs.append(UserSpec(id=f"u{i:02d}", qos=qos,
                                   bandwidth=bandwidth, net_mtbf=net_mtbf))

    arrival_window = max(1, horizon // 10) if peak else horizon
    user_ids = [u.id for u in user_specs]
    job_specs = []
    for idx in range(1, n_job_sets * jobs_per_set + 1):
        owner = rng.choice(user_ids)
        length = rng.randint(jobs.min_length, jobs.max_length)
        volume = rng.randint(jobs.min_volume, jobs.max_volume)
        arrival = rng.randint(0, arrival_window - 1)
        job_specs.append(JobSpec(id=f"j{idx:05d}", owner=owner,
                                 arrival_time=arrival, priority=1,
                                 length=length, volume=volume))

    return Scenario(tuple(user_specs), tuple(resource_specs),
                    tuple(job_specs))


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "version": 1,
        "users": [{"id": u.id, "qos": u.qos, "bandwidth": u.bandwidth,
                   "net_mtbf": u.net_mtbf} for u in scenario.users],
        "resources": [{
            "id": r.id, "bandwidth": r.bandwidth, "net_mtbf": r.net_mtbf,
            "machines": [{"id": m.id, "proc_quality": m.proc_quality,
                          "proc_count": m.proc_count, "mtbf": m.mtbf}
                         for m in r.machines],
        } for r in scenario.resources],
        "jobs": [{"id": j.id, "owner": j.owner,
                  "arrival_time": j.arrival_time, "priority": j.priority,
                  "length": j.length, "volume": j.volume}
                 for j in scenario.jobs],
    }


def scenario_from_dict(data: dict) -> Scenario:
    users = tuple(UserSpec(**u) for u in data["users"])
    resources = tuple(
        ResourceSpec(id=r["id"], bandwidth=r["bandwidth"],
                     net_mtbf=r["net_mtbf"],
                     machines=tuple(MachineSpec(**m) for m in r["machines"]))
        for r in data["resources"])
    jobs = tuple(JobSpec(**j) for j in data["jobs"])
    return Scenario(users, resources, jobs)


def save_scenario(scenario: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
    return path


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
