"""Cost formulas feeding the global scheduler's assignment matrix.

The raw cost of a (job, resource) pair is transfer time plus processing
time in seconds.  The effective cost divides that by a strategy weight
built from three provider-set exponents: ``fp`` rewards survival odds,
``qp`` rewards the owner's service level, ``sp`` rewards waiting time.
With all exponents at zero the effective cost is exactly the raw cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .domain import JobSpec, MachineSpec, UserSpec

# Floor for the combined strategy weight.  Survival factors can vanish on
# hopeless (job, resource) pairs; the floor keeps effective costs finite so
# the solver's integer scaling stays in a safe range.  Only pairs that are
# already orders of magnitude worse than any alternative are affected.
MIN_WEIGHT = 1e-6


@dataclass(frozen=True)
class StrategyParams:
    """Provider knobs: strategy exponents plus the two balancing switches."""

    fp: float = 0.0
    qp: float = 0.0
    sp: float = 0.0
    balance_global: bool = False
    balance_local: bool = False

    def __post_init__(self) -> None:
        for name in ("fp", "qp", "sp"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class ResourceView:
    """Snapshot of one ready resource as the cost formulas see it."""

    resource_id: str
    bandwidth: float          # KB/s of the resource's network link
    quality: float            # MI/s averaged over free processors
    mean_machine_mtbf: float  # mean of machine MTBFs over up machines
    net_mtbf: float           # MTBF of the resource's network link


@dataclass(frozen=True)
class RawCost:
    transfer: float
    processing: float

    @property
    def total(self) -> float:
        return self.transfer + self.processing


@dataclass(frozen=True)
class CostBreakdown:
    """Effective cost of one (job, resource) pair with its factors."""

    transfer: float
    processing: float
    survival_proc: float
    survival_xfer: float
    starvation_weight: float
    effective: float


def raw_cost(job: JobSpec, user: UserSpec, view: ResourceView) -> RawCost:
    """Transfer plus processing seconds; the transfer is limited by the
    slower of the two network links."""
    if view.quality <= 0:
        raise ValueError(f"resource {view.resource_id}: quality must be positive")
    if view.bandwidth <= 0 or user.bandwidth <= 0:
        raise ValueError("bandwidths must be positive")
    transfer = job.volume / min(user.bandwidth, view.bandwidth)
    processing = job.length / view.quality
    return RawCost(transfer, processing)


def machine_cost(job: JobSpec, machine: MachineSpec) -> float:
    """Processing seconds of a job on one specific machine."""
    if machine.proc_quality <= 0:
        raise ValueError(f"machine {machine.id}: proc_quality must be positive")
    return job.length / machine.proc_quality


def survival(duration: float, mtbf: float) -> float:
    """Probability that a component stays up for ``duration`` seconds."""
    if mtbf <= 0:
        raise ValueError("mtbf must be positive")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    return math.exp(-duration / mtbf)


def starvation_weight(job: JobSpec, t: int) -> float:
    """Priority scaled by waiting time: equals the job's priority on
    arrival and grows by one priority unit per waiting tick."""
    if t < job.arrival_time:
        raise ValueError(f"job {job.id} has not arrived by tick {t}")
    return job.priority * (1 + (t - job.arrival_time))


def effective_cost(job: JobSpec, user: UserSpec, view: ResourceView,
                   params: StrategyParams, t: int) -> CostBreakdown:
    """Strategy-weighted cost of sending ``job`` to the viewed resource.

    The transfer must survive both network links, the processing must
    survive the machines; each factor enters through its exponent.
    """
    rc = raw_cost(job, user, view)
    p_proc = survival(rc.processing, view.mean_machine_mtbf)
    p_xfer = (survival(rc.transfer, view.net_mtbf)
              * survival(rc.transfer, user.net_mtbf))
    rho = starvation_weight(job, t)
    weight = ((p_proc * p_xfer) ** params.fp
              * user.qos ** params.qp
              * rho ** params.sp)
    effective = rc.total / max(weight, MIN_WEIGHT)
    return CostBreakdown(rc.transfer, rc.processing, p_proc, p_xfer,
                         rho, effective)


def cost_matrix(jobs: Sequence[JobSpec], users: Mapping[str, UserSpec],
                views: Sequence[ResourceView], params: StrategyParams,
                t: int) -> np.ndarray:
    """Vectorized effective costs, jobs as rows and views as columns.

    Same formulas as :func:`effective_cost`; used to build per-tick
    assignment instances without a Python loop per cell.
    """
    m, n = len(jobs), len(views)
    if m == 0 or n == 0:
        return np.zeros((m, n))
    volume = np.array([j.volume for j in jobs])
    length = np.array([j.length for j in jobs])
    rho = np.array([starvation_weight(j, t) for j in jobs])
    bw_user = np.array([users[j.owner].bandwidth for j in jobs])
    mtbf_user = np.array([users[j.owner].net_mtbf for j in jobs])
    qos = np.array([users[j.owner].qos for j in jobs])
    bw_res = np.array([v.bandwidth for v in views])
    quality = np.array([v.quality for v in views])
    mtbf_proc = np.array([v.mean_machine_mtbf for v in views])
    mtbf_net = np.array([v.net_mtbf for v in views])

    transfer = volume[:, None] / np.minimum(bw_user[:, None], bw_res[None, :])
    processing = length[:, None] / quality[None, :]
    p_proc = np.exp(-processing / mtbf_proc[None, :])
    p_xfer = (np.exp(-transfer / mtbf_net[None, :])
              * np.exp(-transfer / mtbf_user[:, None]))
    weight = ((p_proc * p_xfer) ** params.fp
              * (qos[:, None] ** params.qp)
              * (rho[:, None] ** params.sp))
    return (transfer + processing) / np.maximum(weight, MIN_WEIGHT)
