from pathlib import Path

import pytest

from gridauction.domain import (GridState, JobSpec, MachineSpec, ResourceSpec,
                                UserSpec)

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


def make_state(resources=None, users=None, jobs=None, clock=0) -> GridState:
    """Small hand-built state with every component up."""
    if resources is None:
        resources = [
            ResourceSpec("r01", bandwidth=256, net_mtbf=1000, machines=(
                MachineSpec("r01m01", proc_quality=1200, proc_count=4, mtbf=500),
                MachineSpec("r01m02", proc_quality=3600, proc_count=2, mtbf=500),
            )),
            ResourceSpec("r02", bandwidth=128, net_mtbf=1000, machines=(
                MachineSpec("r02m01", proc_quality=2400, proc_count=3, mtbf=500),
            )),
        ]
    if users is None:
        users = [UserSpec("u01", qos=2, bandwidth=512, net_mtbf=1000),
                 UserSpec("u02", qos=10, bandwidth=64, net_mtbf=1000)]
    if jobs is None:
        jobs = [JobSpec("j1", "u01", arrival_time=0, priority=1,
                        length=2400, volume=1024),
                JobSpec("j2", "u02", arrival_time=0, priority=1,
                        length=7200, volume=256)]
    presence = {}
    for user in users:
        presence[user.id] = True
    for res in resources:
        presence[res.id] = True
        for mspec in res.machines:
            presence[mspec.id] = True
    return GridState(clock=clock,
                     users={u.id: u for u in users},
                     resources={r.id: r for r in resources},
                     jobs={j.id: j for j in jobs},
                     presence=presence)
