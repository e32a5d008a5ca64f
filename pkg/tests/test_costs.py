import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridauction.costs import (MIN_WEIGHT, ResourceView, StrategyParams,
                               cost_matrix, effective_cost, machine_cost,
                               raw_cost, starvation_weight, survival)
from gridauction.domain import JobSpec, MachineSpec, UserSpec


def job(length=2400, volume=1024, priority=1, arrival=0):
    return JobSpec("j", "u", arrival, priority, length, volume)


def user(qos=1, bandwidth=512, net_mtbf=1000):
    return UserSpec("u", qos, bandwidth, net_mtbf)


def view(bandwidth=256, quality=1200, mean_mtbf=1000, net_mtbf=1000):
    return ResourceView("r", bandwidth, quality, mean_mtbf, net_mtbf)


class TestRawCost:
    def test_hand_computed_split(self):
        rc = raw_cost(job(length=2400, volume=1024),
                      user(bandwidth=512), view(bandwidth=256, quality=1200))
        assert rc.transfer == 4.0
        assert rc.processing == 2.0
        assert rc.total == 6.0

    def test_minimum_volume_fast_link(self):
        rc = raw_cost(job(volume=32), user(bandwidth=32), view(bandwidth=32))
        assert rc.transfer == 1.0

    def test_equal_bandwidths_are_symmetric(self):
        a = raw_cost(job(), user(bandwidth=128), view(bandwidth=128))
        b = raw_cost(job(), user(bandwidth=128), view(bandwidth=128))
        assert a == b

    def test_rejects_bad_quality(self):
        with pytest.raises(ValueError):
            raw_cost(job(), user(), view(quality=0))


class TestMachineCost:
    def test_unit_ratio(self):
        assert machine_cost(job(length=3600),
                            MachineSpec("m", 3600, 1, 100)) == 1.0

    def test_fractional_cost_left_to_caller_to_round(self):
        assert machine_cost(job(length=1200),
                            MachineSpec("m", 2400, 1, 100)) == 0.5
        assert math.ceil(0.5) == 1

    def test_long_job_on_slow_machine(self):
        assert machine_cost(job(length=12000),
                            MachineSpec("m", 1200, 1, 100)) == 10.0


class TestSurvival:
    def test_zero_duration(self):
        assert survival(0, 50) == 1.0

    def test_one_mtbf(self):
        assert survival(50, 50) == pytest.approx(0.367879441, abs=1e-9)

    def test_two_mtbf(self):
        assert survival(100, 50) == pytest.approx(0.135335283, abs=1e-9)

    @given(st.floats(0, 1e6), st.floats(0.001, 1e9))
    def test_stays_in_unit_interval(self, duration, mtbf):
        p = survival(duration, mtbf)
        assert 0 <= p <= 1.0
        if duration / mtbf < 700:  # beyond this exp() underflows to 0.0
            assert p > 0


class TestStarvationWeight:
    def test_equals_priority_at_arrival(self):
        assert starvation_weight(job(priority=1), 0) == 1.0

    def test_grows_linearly(self):
        assert starvation_weight(job(priority=1), 9) == 10.0
        assert starvation_weight(job(priority=2), 4) == 10.0

    def test_before_arrival_is_a_contract_violation(self):
        with pytest.raises(ValueError):
            starvation_weight(job(arrival=5), 4)


class TestEffectiveCost:
    def test_zero_exponents_reduce_to_raw_cost(self):
        bd = effective_cost(job(), user(), view(), StrategyParams(), 0)
        assert bd.effective == bd.transfer + bd.processing

    def test_failure_exponent_inflates_by_inverse_survival(self):
        # survival exponents 1/3 each: pt=2 over af=6, st=4 over both bf=12
        j = job(length=2400, volume=1024)
        u = user(bandwidth=512, net_mtbf=12)
        v = view(bandwidth=256, quality=1200, mean_mtbf=6, net_mtbf=12)
        bd = effective_cost(j, u, v, StrategyParams(fp=1), 0)
        assert bd.transfer + bd.processing == 6.0
        assert bd.effective == pytest.approx(6 * math.e, rel=1e-9)

    def test_doubling_qos_halves_cost_at_qp_one(self):
        p = StrategyParams(qp=1)
        lo = effective_cost(job(), user(qos=2), view(), p, 0)
        hi = effective_cost(job(), user(qos=4), view(), p, 0)
        assert hi.effective == pytest.approx(lo.effective / 2, rel=1e-12)

    def test_monotone_in_qos_waiting_and_mtbf(self):
        p = StrategyParams(fp=1, qp=1, sp=1)
        base = effective_cost(job(), user(qos=2), view(), p, 0).effective
        assert effective_cost(job(), user(qos=3), view(), p, 0).effective <= base
        assert effective_cost(job(), user(qos=2), view(), p, 5).effective <= base
        better = view(mean_mtbf=5000, net_mtbf=5000)
        assert effective_cost(job(), user(qos=2), better, p, 0).effective <= base

    def test_effective_at_least_raw_without_qos_and_starvation(self):
        p = StrategyParams(fp=2)
        rng = random.Random(3)
        for _ in range(100):
            j = job(length=rng.randint(1200, 12000),
                    volume=rng.randint(32, 1024))
            u = user(bandwidth=rng.randint(16, 512),
                     net_mtbf=rng.randint(20, 100))
            v = view(bandwidth=rng.randint(32, 512),
                     quality=rng.randint(1200, 3600),
                     mean_mtbf=rng.randint(15, 90),
                     net_mtbf=rng.randint(30, 120))
            bd = effective_cost(j, u, v, p, 0)
            assert bd.effective >= bd.transfer + bd.processing

    def test_row_scaling_keeps_argmin(self):
        # scaling every job's priority by a constant must not change the
        # per-job argmin over resources
        rng = random.Random(11)
        params = StrategyParams(fp=0.5, qp=1, sp=1.5)
        views = [view(bandwidth=rng.randint(32, 512),
                      quality=rng.randint(1200, 3600)) for _ in range(4)]
        for _ in range(50):
            j1 = job(length=rng.randint(1200, 12000),
                     volume=rng.randint(32, 1024), priority=1)
            j5 = JobSpec("j", "u", 0, 5, j1.length, j1.volume)
            u = user(qos=rng.randint(1, 10), bandwidth=rng.randint(16, 512))
            pick1 = min(range(4), key=lambda k: effective_cost(
                j1, u, views[k], params, 3).effective)
            pick5 = min(range(4), key=lambda k: effective_cost(
                j5, u, views[k], params, 3).effective)
            assert pick1 == pick5

    def test_weight_floor_keeps_costs_finite(self):
        v = view(mean_mtbf=0.001, net_mtbf=0.001)
        u = user(net_mtbf=0.001)
        bd = effective_cost(job(), u, v, StrategyParams(fp=2), 0)
        assert math.isfinite(bd.effective)
        assert bd.effective <= (bd.transfer + bd.processing) / MIN_WEIGHT


def test_cost_matrix_matches_scalar_path():
    rng = random.Random(5)
    params = StrategyParams(fp=1.2, qp=0.7, sp=0.9)
    users = {}
    jobs = []
    for i in range(8):
        uid = f"u{i}"
        users[uid] = UserSpec(uid, rng.randint(1, 10), rng.randint(16, 512),
                              rng.randint(20, 100))
        jobs.append(JobSpec(f"j{i}", uid, 0, rng.randint(1, 3),
                            rng.randint(1200, 12000), rng.randint(32, 1024)))
    views = [view(bandwidth=rng.randint(32, 512),
                  quality=rng.randint(1200, 3600),
                  mean_mtbf=rng.randint(15, 90),
                  net_mtbf=rng.randint(30, 120)) for _ in range(3)]
    matrix = cost_matrix(jobs, users, views, params, t=4)
    for i, j in enumerate(jobs):
        for k, v in enumerate(views):
            scalar = effective_cost(j, users[j.owner], v, params, 4).effective
            assert matrix[i, k] == pytest.approx(scalar, rel=1e-9)


def test_cost_matrix_empty_shapes():
    assert cost_matrix([], {}, [], StrategyParams(), 0).shape == (0, 0)


@settings(max_examples=50)
@given(st.integers(1200, 12000), st.integers(32, 1024),
       st.integers(16, 512), st.integers(32, 512), st.integers(1200, 3600))
def test_reduction_property(length, volume, bw_u, bw_r, quality):
    j = job(length=length, volume=volume)
    u = user(bandwidth=bw_u)
    v = view(bandwidth=bw_r, quality=quality)
    bd = effective_cost(j, u, v, StrategyParams(), 0)
    rc = raw_cost(j, u, v)
    assert bd.effective == rc.total
