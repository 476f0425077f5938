"""Equal division for ``n`` agents, realized two ways.

* Over EF^{+(n-1)^2}_{-(n-1)} allocations, from a consensus ``1/n``
  partition computed by ``n - 1`` exact LP vertex solves.
* Over PROP1 allocations that also give every agent ``1/n`` of her maximin
  share, from an ``n``-colouring of a regular groups-versus-items graph.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .base import BaseMechanism
from .exceptions import InvariantViolation
from .fairness import check_alpha_mms, check_prop1, envy_witness, MMS_MAX_AGENTS, MMS_MAX_ITEMS
from .graphs import BipartiteMultigraph, edge_coloring
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery, pad_to_multiple
from .numeric import LinearSystem, solve_vertex
from .validation import check_random_state

__all__ = [
    "consensus_partition",
    "fractional_items",
    "round_consensus",
    "PermutationLottery",
    "mechn_ef_run",
    "prop1_mms_run",
    "EnvyBoundedMechanism",
    "Prop1MMSMechanism",
]

EXPLICIT_PERMUTATION_LIMIT = 5


def consensus_partition(instance: Instance) -> list[tuple]:
    """Fractional partition into ``n`` parts each worth ``v_i(M)/n`` to every agent.

    Part ``t`` is a vertex of ``{x : v_i . x = v_i(M)/n for all i, 0 <= x <= r}``
    where ``r`` is what earlier parts left over; the last part is the rest.
    Each vertex splits at most ``n`` further items.
    """
    n, m = instance.n, instance.m
    remaining = [Fraction(1)] * m
    rhs = [instance.total(i) / n for i in range(n)]
    parts = []
    for _ in range(n - 1):
        system = LinearSystem.build(instance.values, rhs, n_vars=m, lower=0, upper=list(remaining))
        out = solve_vertex(system, describe=False)
        if not out.feasible:
            raise InvariantViolation("consensus LP is infeasible")
        parts.append(out.vertex)
        remaining = [r - x for r, x in zip(remaining, out.vertex)]
    parts.append(tuple(remaining))
    return parts


def fractional_items(parts) -> list[int]:
    """Items shared by more than one part."""
    m = len(parts[0])
    return [g for g in range(m) if all(p[g] != 1 for p in parts)]


def round_consensus(parts) -> list[tuple]:
    """Whole items stay in their part; split items are dealt round-robin."""
    n = len(parts)
    m = len(parts[0])
    bundles = [[g for g in range(m) if p[g] == 1] for p in parts]
    for t, g in enumerate(fractional_items(parts)):
        bundles[t % n].append(g)
    return [tuple(sorted(b)) for b in bundles]


class PermutationLottery:
    """Uniform lottery over every assignment of fixed bundles to agents.

    Used when ``n!`` is too large to list; ``sample`` draws a uniform
    permutation.
    """

    def __init__(self, bundles):
        self.bundles = tuple(tuple(b) for b in bundles)

    def sample(self, random_state=None) -> IntegralAllocation:
        rng = check_random_state(random_state)
        order = list(range(len(self.bundles)))
        rng.shuffle(order)
        return IntegralAllocation(self.bundles).permuted(order)

    def marginals(self, m: int) -> FractionalAllocation:
        return FractionalAllocation.equal_division(len(self.bundles), m)


def _uniform_over_permutations(bundles):
    n = len(bundles)
    if n > EXPLICIT_PERMUTATION_LIMIT:
        return PermutationLottery(bundles)
    base = IntegralAllocation(tuple(bundles))
    p = Fraction(1, math.factorial(n))
    return Lottery(tuple((p, base.permuted(order)) for order in itertools.permutations(range(n))))


def mechn_ef_run(instance: Instance, audit: bool = True, trace: dict | None = None):
    """Uniform lottery over permutations of a rounded consensus partition.

    Every permutation is EF^{+(n-1)^2}_{-(n-1)}: each bundle is a full
    ``1/n`` part with at most ``n-1`` extra split items, and any part is
    short of ``1/n`` by at most its ``(n-1)^2`` removed split items' worth.
    """
    n = instance.n
    parts = consensus_partition(instance)
    bundles = round_consensus(parts)
    if trace is not None:
        trace["split_items"] = fractional_items(parts)
        trace["bundles"] = bundles
    if audit:
        if len(fractional_items(parts)) > n * (n - 1):
            raise InvariantViolation("consensus partition splits too many items")
        u, v = (n - 1) ** 2, n - 1
        universe = range(instance.m)
        for i in range(n):
            row = instance.values[i]
            for a, b in itertools.permutations(range(n), 2):
                if not envy_witness(row, bundles[a], bundles[b], u, v, universe).satisfied:
                    raise InvariantViolation("rounded consensus bundles violate the envy bound")
    return _uniform_over_permutations(bundles)


def prop1_mms_run(instance: Instance, audit: bool = True) -> Lottery:
    """Uniform lottery over ``n`` allocations, each PROP1 and ``1/n``-MMS.

    Every agent cuts her items, in decreasing order, into consecutive groups
    of ``n``.  Groups and items form an ``n``-regular bipartite graph (an
    item is adjacent to the group holding it in each agent's cut), and each
    of its ``n`` perfect matchings hands each agent one item per group.
    """
    n = instance.n
    padded = pad_to_multiple(instance, n)
    m = padded.m
    per_agent = m // n
    edges = []
    owners = []
    for i in range(n):
        row = padded.values[i]
        order = sorted(range(m), key=lambda g: (-row[g], g))
        for pos, g in enumerate(order):
            edges.append((i * per_agent + pos // n, g))
            owners.append(i)
    allocations = []
    if m == 0:
        allocations = [IntegralAllocation(tuple(() for _ in range(n)))] * n
    else:
        for matching in edge_coloring(BipartiteMultigraph.from_edges(m, m, edges)):
            bundles = [[] for _ in range(n)]
            for e in matching:
                bundles[owners[e]].append(edges[e][1])
            allocations.append(IntegralAllocation(tuple(tuple(sorted(b)) for b in bundles)).restrict(instance.m))
    lottery = Lottery.uniform(allocations)
    if audit:
        check_mms = n <= MMS_MAX_AGENTS and instance.m <= MMS_MAX_ITEMS
        for alloc in allocations:
            if not check_prop1(instance, alloc):
                raise InvariantViolation("support allocation is not PROP1")
            if check_mms and not check_alpha_mms(instance, alloc, Fraction(1, n)):
                raise InvariantViolation("support allocation misses 1/n of the maximin share")
        if lottery.marginals(instance.m) != FractionalAllocation.equal_division(n, instance.m):
            raise InvariantViolation("lottery marginals differ from equal division")
    return lottery


class EnvyBoundedMechanism(BaseMechanism):
    """Equal division realized over EF^{+(n-1)^2}_{-(n-1)} allocations.

    For ``n > 5`` the fitted ``lottery_`` is a :class:`PermutationLottery`
    sampler rather than an explicit list of ``n!`` allocations.
    """

    def __init__(self, audit: bool = True):
        self.audit = audit

    def fractional_rule(self, values) -> FractionalAllocation:
        inst = self._validate(values)
        return FractionalAllocation.equal_division(inst.n, inst.m)

    def _run(self, instance):
        trace: dict = {}
        lottery = mechn_ef_run(instance, self.audit, trace)
        return FractionalAllocation.equal_division(instance.n, instance.m), lottery, {"trace_": trace}


class Prop1MMSMechanism(BaseMechanism):
    """Equal division realized over PROP1 and ``1/n``-MMS allocations."""

    def __init__(self, audit: bool = True):
        self.audit = audit

    def fractional_rule(self, values) -> FractionalAllocation:
        inst = self._validate(values)
        return FractionalAllocation.equal_division(inst.n, inst.m)

    def _run(self, instance):
        lottery = prop1_mms_run(instance, self.audit)
        return FractionalAllocation.equal_division(instance.n, instance.m), lottery, {}
