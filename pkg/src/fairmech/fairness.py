"""Fairness and efficiency predicates with witnesses.

The envy predicates use a greedy witness: for additive valuations the best
``u`` items to add are the ``u`` most valuable items outside the envious
agent's bundle, and the best ``v`` items to remove are the ``v`` most
valuable items of the envied bundle.  Ties go to the lower item index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .config import enumeration_budget
from .exceptions import MalformedInputError, ScaleLimitError
from .model import FractionalAllocation, Instance, IntegralAllocation
from .numeric import LinearSystem, solve_vertex

__all__ = [
    "PairEnvy",
    "EnvyReport",
    "envy_witness",
    "check_ef_uv",
    "check_ef1",
    "check_prop1",
    "mms_value",
    "check_alpha_mms",
    "check_pareto_integral",
    "ParetoReport",
    "check_pareto_fractional",
    "check_regular",
]

MMS_MAX_AGENTS = 5
MMS_MAX_ITEMS = 14


def _top(row: Sequence[Fraction], items: Iterable[int], k: int) -> tuple:
    return tuple(sorted(items, key=lambda g: (-row[g], g))[:k])


@dataclass(frozen=True)
class PairEnvy:
    agent: int
    other: int
    satisfied: bool
    added: tuple
    removed: tuple
    deficit: Fraction


@dataclass(frozen=True)
class EnvyReport:
    u: int
    v: int
    pairs: tuple

    @property
    def satisfied(self) -> bool:
        return all(p.satisfied for p in self.pairs)

    @property
    def violations(self) -> tuple:
        return tuple(p for p in self.pairs if not p.satisfied)

    def __bool__(self) -> bool:
        return self.satisfied


def envy_witness(row, own, other, u: int, v: int, universe) -> PairEnvy:
    """Greedy EF^{+u}_{-v} test of bundle ``own`` against ``other``.

    ``universe`` is the item set from which added items may be drawn.
    Agent and other indices are left as ``-1``.
    """
    own_set = set(own)
    added = _top(row, (g for g in universe if g not in own_set), u)
    removed = _top(row, other, v)
    lhs = sum((row[g] for g in own), Fraction(0)) + sum((row[g] for g in added), Fraction(0))
    rhs = sum((row[g] for g in other), Fraction(0)) - sum((row[g] for g in removed), Fraction(0))
    return PairEnvy(-1, -1, lhs >= rhs, added, removed, max(rhs - lhs, Fraction(0)))


def check_ef_uv(instance: Instance, allocation: IntegralAllocation, u: int, v: int) -> EnvyReport:
    """EF^{+u}_{-v}: each agent, after adding ``u`` outside items to her bundle
    and removing ``v`` items from another bundle, does not envy it.

    >>> inst = Instance.from_values([[1, 1], [1, 1]])
    >>> bool(check_ef_uv(inst, IntegralAllocation(((0, 1), ())), 0, 1))
    False
    >>> bool(check_ef_uv(inst, IntegralAllocation(((0, 1), ())), 1, 1))
    True
    """
    if u < 0 or v < 0:
        raise MalformedInputError("u and v must be nonnegative")
    universe = range(instance.m)
    pairs = []
    for i in range(instance.n):
        row = instance.values[i]
        for j in range(instance.n):
            if i == j:
                continue
            w = envy_witness(row, allocation.bundles[i], allocation.bundles[j], u, v, universe)
            pairs.append(PairEnvy(i, j, w.satisfied, w.added, w.removed, w.deficit))
    return EnvyReport(u, v, tuple(pairs))


def check_ef1(instance: Instance, allocation: IntegralAllocation) -> EnvyReport:
    return check_ef_uv(instance, allocation, 0, 1)


def check_prop1(instance: Instance, allocation: IntegralAllocation) -> bool:
    """Each agent reaches her proportional share after adding one outside item."""
    n = instance.n
    for i, bundle in enumerate(allocation.bundles):
        row = instance.values[i]
        own = set(bundle)
        best = max((row[g] for g in range(instance.m) if g not in own), default=Fraction(0))
        if (instance.value(i, bundle) + best) * n < instance.total(i):
            return False
    return True


def mms_value(row: Sequence[Fraction], n: int) -> Fraction:
    """Maximin share of one valuation row over ``n`` bundles, by branch and bound.

    >>> mms_value([Fraction(x) for x in (3, 3, 2, 2, 2)], 2)
    Fraction(6, 1)
    """
    m = len(row)
    if n > MMS_MAX_AGENTS or m > MMS_MAX_ITEMS:
        raise ScaleLimitError(f"maximin share limited to n<={MMS_MAX_AGENTS}, m<={MMS_MAX_ITEMS}")
    if n < 1:
        raise MalformedInputError("n must be positive")
    vals = sorted((Fraction(x) for x in row), reverse=True)
    total = sum(vals, Fraction(0))
    ceiling = total / n
    remaining = [Fraction(0)] * (m + 1)
    for k in range(m - 1, -1, -1):
        remaining[k] = remaining[k + 1] + vals[k]

    # greedy start: largest item to the currently poorest bundle
    sums = [Fraction(0)] * n
    for x in vals:
        sums[sums.index(min(sums))] += x
    best = min(sums)
    sums = [Fraction(0)] * n
    seen: set = set()

    def search(k: int) -> None:
        nonlocal best
        if best == ceiling:
            return
        low = min(sums)
        if k == m:
            best = max(best, low)
            return
        if low + remaining[k] <= best:
            return
        key = (k, tuple(sorted(sums)))
        if key in seen:
            return
        seen.add(key)
        tried = set()
        for j in sorted(range(n), key=lambda b: sums[b]):
            if sums[j] in tried:
                continue
            tried.add(sums[j])
            sums[j] += vals[k]
            search(k + 1)
            sums[j] -= vals[k]

    search(0)
    return best


def check_alpha_mms(instance: Instance, allocation: IntegralAllocation, alpha) -> bool:
    """Every agent gets at least ``alpha`` times her maximin share."""
    alpha = Fraction(alpha)
    for i, bundle in enumerate(allocation.bundles):
        if instance.value(i, bundle) < alpha * mms_value(instance.values[i], instance.n):
            return False
    return True


def check_pareto_integral(instance: Instance, allocation: IntegralAllocation):
    """Exhaustive Pareto check among integral allocations.

    Returns ``(True, None)`` or ``(False, dominating_allocation)``.
    """
    n, m = instance.n, instance.m
    if n**m > enumeration_budget():
        raise ScaleLimitError(f"{n}^{m} allocations exceed the enumeration budget")
    base = [instance.value(i, b) for i, b in enumerate(allocation.bundles)]
    for owners in itertools.product(range(n), repeat=m):
        utils = [Fraction(0)] * n
        for g, i in enumerate(owners):
            utils[i] += instance.values[i][g]
        if all(a >= b for a, b in zip(utils, base)) and any(a > b for a, b in zip(utils, base)):
            return False, IntegralAllocation.from_owners(owners, n)
    return True, None


@dataclass(frozen=True)
class ParetoReport:
    """``optimal`` is True when no fractional allocation dominates.

    Otherwise ``improvement`` dominates the input and ``gain`` is the total
    utility surplus it achieves.
    """

    optimal: bool
    gain: Fraction
    improvement: FractionalAllocation | None


def check_pareto_fractional(instance: Instance, allocation: FractionalAllocation) -> ParetoReport:
    """Maximise total slack over allocations that weakly improve every agent."""
    n, m = instance.n, instance.m
    width = n * m + n
    rows, rhs = [], []
    for i in range(n):
        row = [Fraction(0)] * width
        for g in range(m):
            row[i * m + g] = instance.values[i][g]
        row[n * m + i] = Fraction(-1)
        rows.append(row)
        rhs.append(allocation.utility(instance, i))
    for g in range(m):
        row = [Fraction(0)] * width
        for i in range(n):
            row[i * m + g] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
    objective = [Fraction(0)] * (n * m) + [Fraction(1)] * n
    system = LinearSystem.build(rows, rhs, n_vars=width, lower=0, objective=objective, maximize=True)
    out = solve_vertex(system, describe=False)
    if out.objective_value == 0:
        return ParetoReport(True, Fraction(0), None)
    shares = tuple(tuple(out.vertex[i * m + g] for g in range(m)) for i in range(n))
    return ParetoReport(False, out.objective_value, FractionalAllocation(shares))


def check_regular(allocation: IntegralAllocation, groups: Sequence[Sequence[int]]) -> bool:
    """Every bundle holds exactly one item of every group."""
    for bundle in allocation.bundles:
        own = set(bundle)
        if any(sum(1 for g in grp if g in own) != 1 for grp in groups):
            return False
    return True
