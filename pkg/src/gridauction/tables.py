"""Bundled benchmark presets: ten published grid-range columns and two
user populations, usable by name from the CLI (``--grid-table G1``)."""
from __future__ import annotations

from .properties import GridProperties, JobProperties, UserProperties


def _grid(n, rb, rbf, nm, mf, ps, np_):
    return GridProperties(
        number_of_resources=n,
        min_resource_bandwidth=rb[0], max_resource_bandwidth=rb[1],
        min_resource_net_mtbf=rbf[0], max_resource_net_mtbf=rbf[1],
        min_machines=nm[0], max_machines=nm[1],
        min_machine_mtbf=mf[0], max_machine_mtbf=mf[1],
        min_proc_speed=ps[0], max_proc_speed=ps[1],
        min_procs=np_[0], max_procs=np_[1])


GRID_PRESETS: dict[str, GridProperties] = {
    "G1":  _grid(3, (32, 512),  (30, 120), (1, 4), (15, 90), (1200, 3600), (1, 8)),
    "G2":  _grid(5, (32, 512),  (15, 90),  (1, 8), (10, 60), (2400, 3600), (1, 8)),
    "G3":  _grid(7, (64, 1024), (30, 120), (1, 4), (10, 60), (1200, 3600), (1, 4)),
    "G5":  _grid(5, (32, 512),  (30, 120), (1, 8), (15, 90), (1200, 3600), (1, 4)),
    "G7":  _grid(3, (64, 1024), (15, 90),  (1, 8), (15, 90), (2400, 3600), (1, 4)),
    "G10": _grid(5, (32, 512),  (15, 90),  (1, 4), (15, 90), (1200, 3600), (1, 4)),
    "G11": _grid(7, (64, 1024), (15, 90),  (1, 8), (15, 90), (1200, 3600), (1, 8)),
    "G12": _grid(3, (64, 1024), (15, 90),  (1, 4), (10, 60), (1200, 3600), (1, 8)),
    "G16": _grid(5, (32, 512),  (15, 90),  (1, 8), (10, 60), (1200, 3600), (1, 8)),
    "G18": _grid(7, (32, 512),  (30, 120), (1, 8), (15, 90), (1200, 3600), (1, 8)),
}

USER_PRESETS: dict[str, UserProperties] = {
    "users1": UserProperties(number_of_users=10, min_net_mtbf=20,
                             max_net_mtbf=100, min_bandwidth=16,
                             max_bandwidth=512, min_qos=2, max_qos=10),
    "users2": UserProperties(number_of_users=20, min_net_mtbf=20,
                             max_net_mtbf=400, min_bandwidth=16,
                             max_bandwidth=512, min_qos=2, max_qos=15),
}

DEFAULT_JOBS = JobProperties(min_length=1200, max_length=12000,
                             min_volume=32, max_volume=1024)
