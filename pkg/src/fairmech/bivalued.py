"""Bi-valued instances: every value is ``p`` or ``q`` with ``p > q >= 0``.

The rule has three phases:

1. Fractional maximum Nash welfare on the binary profile ``p -> 1, q -> 0``,
   computed by repeatedly serving the set of agents with the fewest liked
   items per agent.
2. Bundles longer than the equal length ``L = m/n`` are cut back to ``L``.
3. Whatever is unallocated is spread so every agent ends with length ``L``,
   in proportion to the length each agent is still missing.

The outcome comes with a market-equilibrium certificate of Pareto
optimality and can be decomposed over EF1 allocations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .base import BaseMechanism
from .config import enumeration_budget
from .exceptions import InvariantViolation, MalformedInputError, ScaleLimitError
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery
from .numeric import LinearSystem, as_rational, solve_vertex
from .realize import RealizeResult, decompose_or_refute, ef_support

__all__ = [
    "binarize",
    "serve_min_ratio_sets",
    "truncate_and_fill",
    "MarketCertificate",
    "market_certificate",
    "BiValuedOutcome",
    "bivalued_run",
    "decompose_bivalued",
    "mnw_integral_baseline",
    "BiValuedMechanism",
]

MAX_SUBSET_AGENTS = 12


def binarize(instance: Instance, p, q) -> tuple:
    """Liked-item sets, after checking every value is ``p`` or ``q``."""
    p, q = as_rational(p), as_rational(q)
    if not p > q >= 0:
        raise MalformedInputError("need p > q >= 0")
    liked = []
    for row in instance.values:
        if any(v not in (p, q) for v in row):
            raise MalformedInputError(f"values must be {p} or {q}")
        liked.append(frozenset(g for g, v in enumerate(row) if v == p))
    return tuple(liked)


def _spread(members: Sequence[int], items: Sequence[int], liked, ratio: Fraction, m: int) -> dict:
    """Give each member exactly ``ratio`` of the items, only items she likes."""
    cells = [(i, g) for i in members for g in items if g in liked[i]]
    rows, rhs = [], []
    for i in members:
        rows.append([Fraction(int(c[0] == i)) for c in cells])
        rhs.append(ratio)
    for g in items:
        rows.append([Fraction(int(c[1] == g)) for c in cells])
        rhs.append(Fraction(1))
    out = solve_vertex(LinearSystem.build(rows, rhs, n_vars=len(cells), lower=0), describe=False)
    if not out.feasible:
        raise InvariantViolation("minimum-ratio set cannot be served evenly")
    return {c: x for c, x in zip(cells, out.vertex) if x}


def serve_min_ratio_sets(liked: Sequence[frozenset], m: int):
    """Fractional maximum Nash welfare for binary valuations.

    Returns ``(shares, steps)``; each step records the served agent set, its
    liked items and the common length each member receives.  Ties between
    sets go to the smaller ratio, then the smaller set, then the
    lexicographically first one.
    """
    n = len(liked)
    shares = [[Fraction(0)] * m for _ in range(n)]
    left = set(range(m))
    served: set = set()
    steps = []
    while True:
        waiting = [i for i in range(n) if i not in served and liked[i] & left]
        if not waiting:
            break
        if len(waiting) > MAX_SUBSET_AGENTS:
            raise ScaleLimitError(f"subset search limited to {MAX_SUBSET_AGENTS} agents")
        best = None
        for size in range(1, len(waiting) + 1):
            for subset in itertools.combinations(waiting, size):
                cover = frozenset().union(*(liked[i] & left for i in subset))
                key = (Fraction(len(cover), size), size, subset)
                if best is None or key < best[0]:
                    best = (key, cover)
        (ratio, _, subset), cover = best
        items = sorted(cover)
        for (i, g), x in _spread(subset, items, liked, ratio, m).items():
            shares[i][g] = x
        steps.append((subset, tuple(items), ratio))
        served.update(subset)
        left -= cover
    return shares, steps


def truncate_and_fill(shares, m: int):
    """Cut bundles longer than ``m/n`` and refill everyone to exactly ``m/n``.

    Truncation removes the highest-indexed fractions first.  Returns
    ``(final_shares, truncated_shares, truncated_agents)``.
    """
    n = len(shares)
    length = Fraction(m, n)
    cut = [list(row) for row in shares]
    truncated = []
    for i, row in enumerate(cut):
        excess = sum(row, Fraction(0)) - length
        if excess <= 0:
            continue
        truncated.append(i)
        for g in range(m - 1, -1, -1):
            if excess == 0:
                break
            take = min(row[g], excess)
            row[g] -= take
            excess -= take
    short = [length - sum(row, Fraction(0)) for row in cut]
    missing = sum(short, Fraction(0))
    final = [list(row) for row in cut]
    if missing:
        for g in range(m):
            free = 1 - sum(row[g] for row in cut)
            if free:
                for i in range(n):
                    if short[i]:
                        final[i][g] += short[i] / missing * free
    return final, cut, tuple(truncated)


@dataclass(frozen=True)
class MarketCertificate:
    """Prices and budgets under which the allocation is a market equilibrium.

    ``budgets_spent``: each agent spends exactly her budget.
    ``best_bang``: each agent buys only items of maximum value per price.
    ``cleared``: every positively priced item is fully sold.
    """

    prices: tuple
    budgets: tuple
    budgets_spent: bool
    best_bang: bool
    cleared: bool

    @property
    def valid(self) -> bool:
        return self.budgets_spent and self.best_bang and self.cleared


def market_certificate(instance: Instance, p, q, phase_one, final, truncated) -> MarketCertificate:
    """Price ``p`` on items touched by an untruncated agent's phase-one bundle, else ``q``."""
    p, q = as_rational(p), as_rational(q)
    n, m = instance.n, instance.m
    length = Fraction(m, n)
    cut_set = set(truncated)
    touched = {g for i in range(n) if i not in cut_set for g in range(m) if phase_one[i][g]}
    prices = tuple(p if g in touched else q for g in range(m))
    budgets = []
    for i in range(n):
        size = sum(phase_one[i], Fraction(0))
        budgets.append(q * length if i in cut_set else p * size + q * (length - size))
    spent = all(sum((prices[g] * final[i][g] for g in range(m)), Fraction(0)) == budgets[i] for i in range(n))
    bang = True
    for i in range(n):
        row = instance.values[i]
        # prices are positive because q > 0
        top = max(range(m), key=lambda g: row[g] / prices[g], default=None)
        if top is None:
            continue
        best = row[top] / prices[top]
        if any(final[i][g] and row[g] / prices[g] != best for g in range(m)):
            bang = False
    cleared = all(sum(final[i][g] for i in range(n)) == 1 for g in range(m) if prices[g] > 0)
    return MarketCertificate(prices, tuple(budgets), spent, bang, cleared)


@dataclass(frozen=True)
class BiValuedOutcome:
    """``phase_one`` holds the (possibly partial) Nash welfare shares."""

    fractional: FractionalAllocation
    phase_one: tuple
    truncated_agents: tuple
    steps: tuple
    certificate: MarketCertificate | None


def bivalued_run(instance: Instance, p, q, certify: bool = True) -> BiValuedOutcome:
    """Apply the three-phase rule; with ``q == 0`` the phase-one outcome is final
    and items nobody likes are split evenly."""
    liked = binarize(instance, p, q)
    n, m = instance.n, instance.m
    shares, steps = serve_min_ratio_sets(liked, m)
    phase_one = tuple(tuple(r) for r in shares)
    if as_rational(q) == 0:
        final = [list(r) for r in shares]
        for g in range(m):
            if not any(row[g] for row in shares):
                for i in range(n):
                    final[i][g] = Fraction(1, n)
        return BiValuedOutcome(
            FractionalAllocation(tuple(tuple(r) for r in final)), phase_one, (), tuple(steps), None
        )
    final, _, truncated = truncate_and_fill(shares, m)
    frac = FractionalAllocation(tuple(tuple(r) for r in final))
    cert = None
    if certify:
        cert = market_certificate(instance, p, q, shares, final, truncated)
        if not cert.valid:
            raise InvariantViolation(f"market certificate failed: {cert}")
    return BiValuedOutcome(frac, phase_one, truncated, tuple(steps), cert)


def decompose_bivalued(instance: Instance, fractional: FractionalAllocation, budget: int | None = None) -> RealizeResult:
    """Decompose the rule's outcome over EF1 allocations."""
    return decompose_or_refute(fractional, ef_support(instance, 0, 1, budget))


def mnw_integral_baseline(instance: Instance) -> IntegralAllocation:
    """Integral maximum Nash welfare by enumeration.

    Maximises the number of agents with positive value, then the product of
    positive values, then the value vector sorted in decreasing order;
    remaining ties go to the first allocation in owner-vector order.
    """
    n, m = instance.n, instance.m
    if n**m > enumeration_budget():
        raise ScaleLimitError(f"{n}^{m} allocations exceed the enumeration budget")
    best_key, best = None, None
    for owners in itertools.product(range(n), repeat=m):
        utils = [Fraction(0)] * n
        for g, i in enumerate(owners):
            utils[i] += instance.values[i][g]
        positive = [u for u in utils if u > 0]
        product = Fraction(1)
        for u in positive:
            product *= u
        key = (len(positive), product, tuple(sorted(utils, reverse=True)))
        if best_key is None or key > best_key:
            best_key, best = key, owners
    return IntegralAllocation.from_owners(best, n)


class BiValuedMechanism(BaseMechanism):
    """Truthful, Pareto optimal, ex-ante EF and ex-post EF1 for bi-valued instances.

    Parameters
    ----------
    p, q : rational
        The two admissible values, ``p > q >= 0``.
    certify : bool
        Build and check the market-equilibrium certificate.
    decompose : bool
        Compute ``lottery_`` over EF1 allocations (exhaustive, small ``n**m``).
    """

    def __init__(self, p=2, q=1, certify: bool = True, decompose: bool = True):
        self.p = p
        self.q = q
        self.certify = certify
        self.decompose = decompose

    def fractional_rule(self, values) -> FractionalAllocation:
        return bivalued_run(self._validate(values), self.p, self.q, certify=False).fractional

    def _run(self, instance):
        out = bivalued_run(instance, self.p, self.q, self.certify)
        lottery = None
        if self.decompose:
            result = decompose_bivalued(instance, out.fractional)
            if not result.feasible:
                raise InvariantViolation("bi-valued outcome is not a lottery over EF1 allocations")
            lottery = result.lottery
        extras = {
            "phase_one_": out.phase_one,
            "truncated_agents_": out.truncated_agents,
            "market_certificate_": out.certificate,
            "steps_": out.steps,
        }
        return out.fractional, lottery, extras
