"""Epsilon-scaling auction solver for capacitated one-sided assignment.

Each column carries an integer capacity; internally every capacity unit
becomes a slot and the instance is squared by adding zero-cost virtual
rows (spare slots) or uniformly-priced virtual columns (jobs that will go
unassigned).  Costs are rounded to integers at a configurable precision
and the benefits are pre-multiplied so that the terminal epsilon of 1
certifies an exact optimum of the rounded instance.

Bidding is Gauss-Seidel: the lowest-index unassigned row bids each round,
raising the receiving slot's price by best-minus-second-best plus epsilon,
ties broken toward the lowest column index.  The run is deterministic.

An independent oracle (exhaustive subset search or the Hungarian method)
is included for testing against the auction path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

try:
    from numba import njit
except ImportError:  # pragma: no cover - plain-Python fallback
    def njit(*args, **kwargs):
        def wrap(func):
            return func
        return wrap


DEFAULT_PRECISION = 1000
# Scaled costs are capped so that int64 prices cannot overflow even with
# worst-case bid accumulation across a few thousand rows.
MAX_SCALED_BENEFIT = 1 << 50
PRICE_CAP = 1 << 60
BRUTE_FORCE_CAP = 10


class AuctionError(ValueError):
    """Invalid instance or a solver contract violation."""


class ScaleError(AuctionError):
    """Scaled costs exceed the range where exact integer arithmetic holds."""


class EpsCsViolationError(AuctionError):
    """Raised in validate mode when a bid breaks epsilon-complementary slackness."""


class AssignmentInstance:
    """A cost matrix with per-column capacities and an optional arc mask.

    ``costs`` is m x n, non-negative and finite; ``capacities`` has one
    positive integer per column; ``mask[i, j]`` False forbids the arc.
    """

    def __init__(self, costs, capacities, mask=None):
        capacities = [int(c) for c in capacities]
        costs = np.asarray(costs, dtype=float)
        if costs.size == 0:
            costs = costs.reshape(costs.shape[0] if costs.ndim else 0,
                                  len(capacities))
        if costs.ndim != 2 or costs.shape[1] != len(capacities):
            raise AuctionError(
                f"costs shape {costs.shape} does not match "
                f"{len(capacities)} capacities")
        if costs.size and not np.isfinite(costs).all():
            raise AuctionError("costs must be finite")
        if costs.size and (costs < 0).any():
            raise AuctionError("costs must be non-negative")
        if any(c < 1 for c in capacities):
            raise AuctionError("capacities must be positive integers")
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != costs.shape:
                raise AuctionError("mask shape must match costs")
        self.costs = costs
        self.capacities = capacities
        self.mask = mask

    @property
    def n_jobs(self) -> int:
        return self.costs.shape[0]

    @property
    def n_columns(self) -> int:
        return len(self.capacities)


@dataclass
class ExpandedInstance:
    """Square internal form: one column per capacity unit plus padding."""

    costs: np.ndarray          # (n, n) float, includes padding prices
    benefits: np.ndarray       # (n, n) int64, negated scaled costs
    row_real: np.ndarray       # (n,) bool
    slot_column: list          # per slot: source column index or None
    feasible: np.ndarray       # (n, n) bool, real arcs allowed by the mask
    n: int
    precision: int
    premult: int               # benefits carry a factor of n + 2

    @property
    def unit(self) -> float:
        """Original-cost value of one integer benefit unit."""
        return 1.0 / (self.premult * self.precision)


@dataclass
class InternalSolve:
    """Solver internals kept for epsilon-CS inspection."""

    expanded: ExpandedInstance
    row_slot: np.ndarray
    prices: np.ndarray
    epsilon: int


@dataclass
class AuctionResult:
    """Matching over the original instance plus the final dual state.

    ``matching`` maps every real job row to a column index or ``None``
    (job left unassigned); ``prices`` are per expanded slot in original
    cost units; ``objective`` sums the matched real costs.
    """

    matching: dict
    prices: list
    final_epsilon: float
    iterations: int
    objective: float
    internal: InternalSolve | None = None


@dataclass
class OracleResult:
    matching: dict
    objective: float


def pad_and_expand(inst: AssignmentInstance,
                   precision: int = DEFAULT_PRECISION) -> ExpandedInstance:
    """Expand capacities into unit slots and square the instance.

    Spare capacity is absorbed by zero-cost virtual rows; excess jobs are
    routed to uniform virtual columns priced just above every real cost,
    so the padded optimum keeps exactly the cheapest set of real pairs.
    """
    if precision < 1:
        raise AuctionError("precision must be >= 1")
    m = inst.n_jobs
    slot_column: list = []
    for col, cap in enumerate(inst.capacities):
        slot_column.extend([col] * cap)
    n_slots = len(slot_column)
    n = max(m, n_slots)

    if n == 0:
        empty = np.zeros((0, 0))
        return ExpandedInstance(empty, empty.astype(np.int64),
                                np.zeros(0, dtype=bool), [], empty.astype(bool),
                                0, precision, 2)

    real_block = inst.costs[:, [c for c in slot_column]] if n_slots else \
        np.zeros((m, 0))
    max_real = float(real_block.max()) if real_block.size else 0.0
    virtual_cost = max_real + 1.0
    forbidden_cost = n * virtual_cost + 1.0

    costs = np.zeros((n, n))
    feasible = np.zeros((n, n), dtype=bool)
    if n_slots:
        costs[:m, :n_slots] = real_block
        feasible[:m, :n_slots] = True
        if inst.mask is not None:
            arc_ok = inst.mask[:, [c for c in slot_column]]
            costs[:m, :n_slots] = np.where(arc_ok, real_block, forbidden_cost)
            feasible[:m, :n_slots] = arc_ok
    if n > n_slots:  # virtual columns for the jobs that must wait
        costs[:m, n_slots:] = virtual_cost
    # rows m..n are virtual jobs and cost 0 everywhere (already zeros)

    slot_column = slot_column + [None] * (n - n_slots)
    row_real = np.arange(n) < m

    premult = n + 2
    scaled = np.rint(costs * precision)
    if float(scaled.max(initial=0.0)) * premult > MAX_SCALED_BENEFIT:
        raise ScaleError(
            f"cost {costs.max():g} at precision {precision} exceeds the "
            "exact integer range")
    benefits = (-scaled.astype(np.int64)) * premult
    return ExpandedInstance(costs, benefits, row_real, slot_column,
                            feasible, n, precision, premult)


@njit(cache=True)
def _auction_scales(benefits, eps0):  # pragma: no cover - compiled
    n = benefits.shape[0]
    prices = np.zeros(n, dtype=np.int64)
    row_slot = np.full(n, -1, dtype=np.int64)
    slot_row = np.full(n, -1, dtype=np.int64)
    iters = 0
    eps = eps0 if eps0 > 1 else 1
    while True:
        for i in range(n):
            row_slot[i] = -1
            slot_row[i] = -1
        unassigned = n
        while unassigned > 0:
            i = -1
            for k in range(n):
                if row_slot[k] == -1:
                    i = k
                    break
            best = np.int64(0)
            second = np.int64(0)
            best_j = -1
            second_j = -1
            for j in range(n):
                v = benefits[i, j] - prices[j]
                if best_j == -1 or v > best:
                    second = best
                    second_j = best_j
                    best = v
                    best_j = j
                elif second_j == -1 or v > second:
                    second = v
                    second_j = j
            if second_j == -1:
                second = best
            prices[best_j] += best - second + eps
            if prices[best_j] > PRICE_CAP:
                return row_slot, prices, np.int64(-1)
            prev = slot_row[best_j]
            if prev >= 0:
                row_slot[prev] = -1
                unassigned += 1
            slot_row[best_j] = i
            row_slot[i] = best_j
            unassigned -= 1
            iters += 1
        if eps == 1:
            break
        eps //= 4
        if eps < 1:
            eps = 1
    return row_slot, prices, np.int64(iters)


def _auction_scales_checked(benefits: np.ndarray, eps0: int):
    """Python twin of the compiled loop that checks epsilon-CS after every
    assignment phase.  Must mirror `_auction_scales` bid for bid."""
    n = benefits.shape[0]
    prices = np.zeros(n, dtype=np.int64)
    row_slot = np.full(n, -1, dtype=np.int64)
    slot_row = np.full(n, -1, dtype=np.int64)
    iters = 0
    eps = max(1, eps0)
    while True:
        row_slot[:] = -1
        slot_row[:] = -1
        unassigned = n
        while unassigned > 0:
            i = int(np.flatnonzero(row_slot == -1)[0])
            values = benefits[i] - prices
            best_j = int(values.argmax())
            best = int(values[best_j])
            if n > 1:
                others = np.delete(values, best_j)
                second = int(others.max())
            else:
                second = best
            prices[best_j] += best - second + eps
            if prices[best_j] > PRICE_CAP:
                return row_slot, prices, -1
            prev = int(slot_row[best_j])
            if prev >= 0:
                row_slot[prev] = -1
                unassigned += 1
            slot_row[best_j] = i
            row_slot[i] = best_j
            unassigned -= 1
            iters += 1
            bad = _violations(benefits, row_slot, prices, eps)
            if bad:
                raise EpsCsViolationError(
                    f"epsilon-CS violated at eps={eps}: {bad[:3]}")
        if eps == 1:
            break
        eps = max(1, eps // 4)
    return row_slot, prices, iters


def _violations(benefits: np.ndarray, row_slot: np.ndarray,
                prices: np.ndarray, eps) -> list:
    matched = np.flatnonzero(row_slot >= 0)
    if matched.size == 0:
        return []
    values = benefits[matched] - prices[None, :]
    best = values.max(axis=1)
    got = values[np.arange(matched.size), row_slot[matched]]
    bad = np.flatnonzero(got < best - eps)
    return [(int(matched[k]), int(row_slot[matched[k]]),
             int(best[k] - eps - got[k])) for k in bad]


def check_eps_cs(expanded: ExpandedInstance, matching, prices,
                 epsilon) -> list:
    """Epsilon-CS audit on the internal instance.

    ``matching`` maps row -> slot (dict, or an array with -1 for
    unmatched); returns one (row, slot, shortfall) triple per matched pair
    whose value trails the row's best value by more than ``epsilon``,
    in integer benefit units.  Empty list means the condition holds.
    """
    n = expanded.n
    row_slot = np.full(n, -1, dtype=np.int64)
    if isinstance(matching, Mapping):
        for i, j in matching.items():
            if j is not None:
                row_slot[int(i)] = int(j)
    else:
        row_slot[:] = np.asarray(matching, dtype=np.int64)
    prices = np.asarray(prices, dtype=np.int64)
    return _violations(expanded.benefits, row_slot, prices, epsilon)


def _assemble(inst: AssignmentInstance, exp: ExpandedInstance,
              row_slot: np.ndarray, prices: np.ndarray, iters: int,
              keep_internal: bool) -> AuctionResult:
    matching: dict = {}
    objective = 0.0
    for i in range(inst.n_jobs):
        slot = int(row_slot[i]) if exp.n else -1
        col = exp.slot_column[slot] if slot >= 0 else None
        if col is not None and exp.feasible[i, slot]:
            matching[i] = col
            objective += float(inst.costs[i, col])
        else:
            matching[i] = None
    result = AuctionResult(
        matching=matching,
        prices=[float(p) * exp.unit for p in prices],
        final_epsilon=exp.unit if exp.n else 0.0,
        iterations=int(iters),
        objective=objective,
    )
    if keep_internal:
        result.internal = InternalSolve(exp, row_slot.copy(), prices.copy(), 1)
    return result


def solve(inst: AssignmentInstance, precision: int = DEFAULT_PRECISION,
          validate: bool = False, keep_internal: bool = False) -> AuctionResult:
    """Minimize total cost subject to the capacity constraints.

    Runs a forward auction on negated integer costs with epsilon scaling
    (start at half the largest benefit, divide by 4, stop at the exact
    terminal scale).  ``validate=True`` switches to an interpreted twin of
    the bidding loop that audits epsilon-CS after every assignment phase.
    """
    exp = pad_and_expand(inst, precision)
    if exp.n == 0:
        return AuctionResult({}, [], 0.0, 0, 0.0,
                             InternalSolve(exp, np.zeros(0, dtype=np.int64),
                                           np.zeros(0, dtype=np.int64), 1)
                             if keep_internal else None)
    eps0 = max(1, int(np.abs(exp.benefits).max()) // 2)
    runner = _auction_scales_checked if validate else _auction_scales
    row_slot, prices, iters = runner(exp.benefits, eps0)
    if iters < 0:
        raise ScaleError("price overflow; rescale the costs")
    return _assemble(inst, exp, np.asarray(row_slot), np.asarray(prices),
                     int(iters), keep_internal)


def _brute_force(exp: ExpandedInstance) -> np.ndarray:
    """Exhaustive minimum over all perfect matchings via subset DP."""
    n = exp.n
    full = 1 << n
    dp = [math.inf] * full
    choice = [-1] * full
    dp[0] = 0.0
    costs = exp.costs.tolist()
    for mask in range(full):
        base = dp[mask]
        if base == math.inf:
            continue
        i = bin(mask).count("1")
        if i >= n:
            continue
        row = costs[i]
        for j in range(n):
            bit = 1 << j
            if mask & bit:
                continue
            value = base + row[j]
            if value < dp[mask | bit]:
                dp[mask | bit] = value
                choice[mask | bit] = j
    row_slot = np.full(n, -1, dtype=np.int64)
    mask = full - 1
    for i in range(n - 1, -1, -1):
        j = choice[mask]
        row_slot[i] = j
        mask ^= 1 << j
    return row_slot


def oracle_solve(inst: AssignmentInstance, precision: int = DEFAULT_PRECISION,
                 method: str = "auto") -> OracleResult:
    """Exact reference solution, independent of the auction path.

    ``method`` is ``"brute"`` (subset enumeration, padded size <= 10),
    ``"hungarian"`` (scipy), or ``"auto"`` to pick by size.
    """
    exp = pad_and_expand(inst, precision)
    if exp.n == 0:
        return OracleResult({}, 0.0)
    if method == "auto":
        method = "brute" if exp.n <= BRUTE_FORCE_CAP else "hungarian"
    if method == "brute":
        if exp.n > BRUTE_FORCE_CAP:
            raise AuctionError(
                f"brute-force oracle capped at {BRUTE_FORCE_CAP} rows, "
                f"got {exp.n}")
        row_slot = _brute_force(exp)
    elif method == "hungarian":
        rows, cols = linear_sum_assignment(exp.costs)
        row_slot = np.full(exp.n, -1, dtype=np.int64)
        row_slot[rows] = cols
    else:
        raise AuctionError(f"unknown oracle method {method!r}")
    matching: dict = {}
    objective = 0.0
    for i in range(inst.n_jobs):
        slot = int(row_slot[i])
        col = exp.slot_column[slot] if slot >= 0 else None
        if col is not None and exp.feasible[i, slot]:
            matching[i] = col
            objective += float(inst.costs[i, col])
        else:
            matching[i] = None
    return OracleResult(matching, objective)
