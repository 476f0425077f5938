"""Two agents: equal division realized over EF1 allocations."""

from __future__ import annotations

from fractions import Fraction

from .base import BaseMechanism
from .exceptions import InvariantViolation
from .fairness import check_ef1
from .graphs import BipartiteMultigraph, edge_coloring
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery, pad_to_multiple

__all__ = ["balanced_pair", "mech2_run", "TwoAgentMechanism"]


def _consecutive_groups(row, size):
    order = sorted(range(len(row)), key=lambda g: (-row[g], g))
    return [order[k : k + size] for k in range(0, len(order), size)]


def balanced_pair(instance: Instance) -> tuple:
    """Split the items into ``(X, Y)`` that both agents see as EF1 either way round.

    Each agent pairs up her items in order of decreasing value; the items
    form a 2-regular bipartite multigraph between the two pairings, and its
    two perfect matchings give ``X`` and ``Y``.  Every pair of either agent
    is split across ``X`` and ``Y``.
    """
    padded = pad_to_multiple(instance, 2)
    m = padded.m
    owner_pair = []
    for agent in (0, 1):
        label = [0] * m
        for k, pair in enumerate(_consecutive_groups(padded.values[agent], 2)):
            for g in pair:
                label[g] = k
        owner_pair.append(label)
    graph = BipartiteMultigraph.from_edges(m // 2, m // 2, [(owner_pair[0][g], owner_pair[1][g]) for g in range(m)])
    colors = edge_coloring(graph) if m else [[], []]
    real = instance.m
    first = tuple(sorted(g for g in colors[0] if g < real))
    second = tuple(sorted(g for g in colors[1] if g < real))
    return first, second


def mech2_run(instance: Instance, audit: bool = True) -> Lottery:
    """Uniform lottery over ``(X, Y)`` and ``(Y, X)``; both are EF1."""
    first, second = balanced_pair(instance)
    lottery = Lottery(
        (
            (Fraction(1, 2), IntegralAllocation((first, second))),
            (Fraction(1, 2), IntegralAllocation((second, first))),
        )
    )
    if audit:
        for alloc in lottery.support:
            if not check_ef1(instance, alloc).satisfied:
                raise InvariantViolation("two-agent support allocation is not EF1")
        if lottery.marginals(instance.m) != FractionalAllocation.equal_division(2, instance.m):
            raise InvariantViolation("two-agent lottery does not give every item half-half")
    return lottery


class TwoAgentMechanism(BaseMechanism):
    """Truthful, ex-ante envy-free and ex-post EF1 mechanism for two agents.

    Parameters
    ----------
    audit : bool
        Re-check EF1 of both support allocations and the marginals.

    Examples
    --------
    >>> mech = TwoAgentMechanism().fit([[3, 1, 1], [1, 1, 3]])
    >>> [str(p) for p, _ in mech.lottery_.entries]
    ['1/2', '1/2']
    """

    n_agents = 2

    def __init__(self, audit: bool = True):
        self.audit = audit

    def fractional_rule(self, values) -> FractionalAllocation:
        inst = self._validate(values)
        return FractionalAllocation.equal_division(2, inst.m)

    def _run(self, instance):
        lottery = mech2_run(instance, self.audit)
        first, second = lottery.entries[0][1].bundles
        return FractionalAllocation.equal_division(2, instance.m), lottery, {"partition_": (first, second)}
