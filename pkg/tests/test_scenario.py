import pytest

from gridauction.properties import (GridProperties, JobProperties,
                                    UserProperties)
from gridauction.scenario import (generate_scenario, load_scenario,
                                  save_scenario, scenario_from_dict,
                                  scenario_to_dict)
from gridauction.tables import DEFAULT_JOBS, GRID_PRESETS, USER_PRESETS

G1 = GRID_PRESETS["G1"]
USERS1 = USER_PRESETS["users1"]


def test_ranges_are_respected():
    scenario = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=5,
                                 seed=3, jobs_per_set=4, horizon=50)
    assert len(scenario.resources) == 3
    for res in scenario.resources:
        assert 32 <= res.bandwidth <= 512
        assert 30 <= res.net_mtbf <= 120
        assert 1 <= len(res.machines) <= 4
        for mspec in res.machines:
            assert 15 <= mspec.mtbf <= 90
            assert 1200 <= mspec.proc_quality <= 3600
            assert 1 <= mspec.proc_count <= 8
    assert len(scenario.users) == 10
    for user in scenario.users:
        assert 16 <= user.bandwidth <= 512
        assert 20 <= user.net_mtbf <= 100
        assert 2 <= user.qos <= 10
    assert len(scenario.jobs) == 20
    owners = {u.id for u in scenario.users}
    for job in scenario.jobs:
        assert job.owner in owners
        assert 1200 <= job.length <= 12000
        assert 32 <= job.volume <= 1024
        assert 0 <= job.arrival_time < 50


def test_degenerate_ranges_pin_every_attribute():
    grid = GridProperties(2, 100, 100, 60, 60, 2, 2, 30, 30, 2400, 2400, 3, 3)
    users = UserProperties(2, 50, 50, 128, 128, 4, 4)
    jobs = JobProperties(6000, 6000, 256, 256)
    scenario = generate_scenario(grid, users, jobs, n_job_sets=1, seed=9,
                                 jobs_per_set=3, horizon=1)
    for res in scenario.resources:
        assert res.bandwidth == 100 and res.net_mtbf == 60
        assert all(m.proc_quality == 2400 and m.proc_count == 3
                   and m.mtbf == 30 for m in res.machines)
    assert all(u.qos == 4 and u.bandwidth == 128 for u in scenario.users)
    assert all(j.length == 6000 and j.volume == 256 and j.arrival_time == 0
               for j in scenario.jobs)


def test_same_seed_same_scenario():
    a = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=3, seed=11,
                          jobs_per_set=5, horizon=40)
    b = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=3, seed=11,
                          jobs_per_set=5, horizon=40)
    assert a == b
    c = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=3, seed=12,
                          jobs_per_set=5, horizon=40)
    assert a != c


def test_peak_mode_front_loads_arrivals():
    scenario = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=10,
                                 seed=2, jobs_per_set=10, horizon=100,
                                 peak=True)
    assert all(j.arrival_time < 10 for j in scenario.jobs)


def test_dict_and_file_round_trip(tmp_path):
    scenario = generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=2,
                                 seed=4, jobs_per_set=5, horizon=30)
    assert scenario_from_dict(scenario_to_dict(scenario)) == scenario
    path = save_scenario(scenario, tmp_path / "scen.json")
    assert load_scenario(path) == scenario


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_scenario(G1, USERS1, DEFAULT_JOBS, n_job_sets=-1, seed=0)
    with pytest.raises(ValueError):
        generate_scenario(G1, USERS1, DEFAULT_JOBS, horizon=0, seed=0)
