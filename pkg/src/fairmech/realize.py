"""Decide whether a fractional allocation is a lottery over fair allocations.

The decomposition is an exact feasibility LP over the enumerated fair
allocations.  When it fails, the Farkas multipliers become a separating
hyperplane: a weight matrix ``Y`` and offset ``c`` with ``c + <Y, A> >= 0``
for every fair allocation ``A`` but ``c + <Y, x> < 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .config import enumeration_budget
from .exceptions import InvariantViolation, ScaleLimitError
from .fairness import check_ef_uv
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery
from .numeric import LinearSystem, solve_vertex

__all__ = [
    "enumerate_allocations",
    "ef_support",
    "SeparatingCertificate",
    "RealizeResult",
    "decompose_or_refute",
    "search_uv",
]


def enumerate_allocations(
    n: int, m: int, predicate: Callable[[IntegralAllocation], bool] | None = None, budget: int | None = None
) -> list[IntegralAllocation]:
    """All ``n**m`` integral allocations passing ``predicate``, in owner-vector order."""
    budget = enumeration_budget() if budget is None else budget
    if n**m > budget:
        raise ScaleLimitError(f"{n}^{m} allocations exceed the enumeration budget {budget}")
    out = []
    for owners in itertools.product(range(n), repeat=m):
        alloc = IntegralAllocation.from_owners(owners, n)
        if predicate is None or predicate(alloc):
            out.append(alloc)
    return out


def ef_support(instance: Instance, u: int, v: int, budget: int | None = None) -> list[IntegralAllocation]:
    """Every EF^{+u}_{-v} integral allocation of ``instance``."""
    return enumerate_allocations(
        instance.n, instance.m, lambda a: check_ef_uv(instance, a, u, v).satisfied, budget
    )


@dataclass(frozen=True)
class SeparatingCertificate:
    weights: tuple
    offset: Fraction

    def score(self, allocation) -> Fraction:
        if isinstance(allocation, IntegralAllocation):
            return self.offset + sum(
                (self.weights[i][g] for i, b in enumerate(allocation.bundles) for g in b), Fraction(0)
            )
        return self.offset + sum(
            (w * x for wr, xr in zip(self.weights, allocation.shares) for w, x in zip(wr, xr) if w and x),
            Fraction(0),
        )

    def verify(self, x: FractionalAllocation, allocations: Sequence[IntegralAllocation]) -> bool:
        """``x`` scores negative while every listed allocation scores nonnegative."""
        return self.score(x) < 0 and all(self.score(a) >= 0 for a in allocations)


@dataclass(frozen=True)
class RealizeResult:
    feasible: bool
    lottery: Lottery | None
    certificate: SeparatingCertificate | None
    n_candidates: int


def decompose_or_refute(x: FractionalAllocation, allocations: Sequence[IntegralAllocation]) -> RealizeResult:
    """Write ``x`` as a lottery over ``allocations`` or certify that it cannot be.

    A successful lottery is a basic solution, so its support has at most
    ``n*m + 1`` allocations.
    """
    n, m = x.n, x.m
    # allocations giving an agent an item she never holds in x cannot appear
    usable = [a for a in allocations if all(x.shares[i][g] for i, b in enumerate(a.bundles) for g in b)]
    k = len(usable)
    if k == 0:
        weights = [[Fraction(0)] * m for _ in range(n)]
        for i in range(n):
            for g in range(m):
                if x.shares[i][g] == 0:
                    weights[i][g] = Fraction(1)
        cert = SeparatingCertificate(tuple(tuple(r) for r in weights), Fraction(-1))
        if not cert.verify(x, allocations):
            raise InvariantViolation("empty-support certificate failed")
        return RealizeResult(False, None, cert, 0)
    rows = [[Fraction(1)] * k]
    rhs = [Fraction(1)]
    cells = [(i, g) for i in range(n) for g in range(m)]
    holders = [set() for _ in cells]
    for col, a in enumerate(usable):
        for i, b in enumerate(a.bundles):
            for g in b:
                holders[i * m + g].add(col)
    for idx, (i, g) in enumerate(cells):
        rows.append([Fraction(1) if col in holders[idx] else Fraction(0) for col in range(k)])
        rhs.append(x.shares[i][g])
    system = LinearSystem.build(rows, rhs, n_vars=k, lower=0)
    out = solve_vertex(system, describe=False)
    if out.feasible:
        entries = tuple((p, usable[c]) for c, p in enumerate(out.vertex) if p)
        lottery = Lottery(entries)
        if lottery.marginals(m) != x:
            raise InvariantViolation("decomposition does not reproduce the fractional allocation")
        return RealizeResult(True, lottery, None, k)
    y = out.certificate.eq
    offset = y[0]
    weights = [[y[1 + i * m + g] for g in range(m)] for i in range(n)]
    cert = SeparatingCertificate(tuple(tuple(r) for r in weights), offset)
    # lift the weights on cells where x is zero so pruned allocations also score >= 0
    worst = min((cert.score(a) for a in allocations), default=Fraction(0))
    if worst < 0:
        lift = -worst
        for i in range(n):
            for g in range(m):
                if x.shares[i][g] == 0:
                    weights[i][g] += lift
        cert = SeparatingCertificate(tuple(tuple(r) for r in weights), offset)
    if not cert.verify(x, allocations):
        raise InvariantViolation("separating certificate failed verification")
    return RealizeResult(False, None, cert, k)


def search_uv(instance: Instance, x: FractionalAllocation, max_total: int = 2, budget: int | None = None):
    """Smallest ``(u, v)`` making ``x`` realizable over EF^{+u}_{-v} allocations.

    Pairs are tried by increasing ``u + v``, then increasing ``u``.  Returns
    ``((u, v), result)`` for the first success or ``(None, results)`` where
    ``results`` maps each tried pair to its refutation.
    """
    tried = {}
    for total in range(max_total + 1):
        for u in range(total + 1):
            v = total - u
            result = decompose_or_refute(x, ef_support(instance, u, v, budget))
            if result.feasible:
                return (u, v), result
            tried[(u, v)] = result
    return None, tried
