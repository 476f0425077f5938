"""Brute-force truthfulness testing and a library of named instances.

A truthfulness check replaces one agent's report by every member of a
finite misreport family and compares her true expected utility under the
mechanism's fractional rule.  A zero gain means no profitable misreport
exists *within the family*; the report records which family was covered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .bivalued import BiValuedMechanism, mnw_integral_baseline
from .config import enumeration_budget
from .exceptions import MalformedInputError
from .mech2 import TwoAgentMechanism
from .mech3 import ThreeAgentMechanism
from .mechn import EnvyBoundedMechanism, Prop1MMSMechanism
from .model import FractionalAllocation, Instance
from .numeric import as_rational

__all__ = [
    "MisreportFamily",
    "AgentGain",
    "TruthfulnessReport",
    "fractional_rule_for",
    "test_truthfulness",
    "instance_library",
    "resolve_instance",
    "tri_valued_chain",
    "ChainStep",
    "ChainReplay",
    "replay_chain",
    "picking_exchange_instance",
]

FAMILY_KINDS = ("value-permutations", "pairwise-swaps", "level-patterns", "scalar-rescalings", "explicit")


@dataclass(frozen=True)
class MisreportFamily:
    """A finite set of alternative reports for one agent.

    ``levels`` feeds ``level-patterns`` (default: every value present in the
    instance), ``scalars`` feeds ``scalar-rescalings`` and ``reports`` is
    the ``explicit`` list.  ``budget`` caps the number of reports evaluated.
    """

    kind: str
    levels: tuple | None = None
    scalars: tuple = (Fraction(1, 2), Fraction(2), Fraction(3))
    reports: tuple = ()
    budget: int | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise MalformedInputError(f"unknown misreport family {self.kind!r}; choose from {FAMILY_KINDS}")

    def size(self, instance: Instance, agent: int) -> int:
        m = instance.m
        if self.kind == "value-permutations":
            return len(set(itertools.permutations(instance.values[agent])))
        if self.kind == "pairwise-swaps":
            return m * (m - 1) // 2
        if self.kind == "level-patterns":
            return len(self._levels(instance)) ** m
        if self.kind == "scalar-rescalings":
            return len(self.scalars)
        return len(self.reports)

    def _levels(self, instance: Instance) -> tuple:
        if self.levels is not None:
            return tuple(sorted(set(as_rational(x) for x in self.levels)))
        return tuple(sorted({v for row in instance.values for v in row}))

    def generate(self, instance: Instance, agent: int) -> Iterator[tuple]:
        row = instance.values[agent]
        m = instance.m
        if self.kind == "value-permutations":
            yield from sorted(set(itertools.permutations(row)))
        elif self.kind == "pairwise-swaps":
            for g, h in itertools.combinations(range(m), 2):
                if row[g] != row[h]:
                    swapped = list(row)
                    swapped[g], swapped[h] = row[h], row[g]
                    yield tuple(swapped)
        elif self.kind == "level-patterns":
            yield from itertools.product(self._levels(instance), repeat=m)
        elif self.kind == "scalar-rescalings":
            for s in self.scalars:
                yield tuple(as_rational(s) * v for v in row)
        else:
            for rep in self.reports:
                rep = tuple(as_rational(v) for v in rep)
                if len(rep) != m or any(v < 0 for v in rep):
                    raise MalformedInputError("explicit reports must be nonnegative rows of length m")
                yield rep


@dataclass(frozen=True)
class AgentGain:
    agent: int
    max_gain: Fraction
    witness: tuple | None
    evaluated: int
    skipped: int
    complete: bool


@dataclass(frozen=True)
class TruthfulnessReport:
    mechanism: str
    family: str
    agents: tuple = field(default_factory=tuple)

    @property
    def max_gain(self) -> Fraction:
        return max((a.max_gain for a in self.agents), default=Fraction(0))

    @property
    def complete(self) -> bool:
        return all(a.complete for a in self.agents)

    @property
    def truthful_on_family(self) -> bool:
        return self.max_gain == 0

    def coverage(self) -> str:
        done = sum(a.evaluated for a in self.agents)
        tag = "complete" if self.complete else "partial (budget exhausted)"
        return f"{self.family}: {done} reports evaluated, {tag}"


def fractional_rule_for(mechanism, p=None, q=None) -> Callable[[Instance], FractionalAllocation]:
    """Map a mechanism id (or estimator, or callable) to its fractional rule."""
    if callable(mechanism) and not hasattr(mechanism, "fractional_rule"):
        return mechanism
    if hasattr(mechanism, "fractional_rule"):
        return mechanism.fractional_rule
    if mechanism == "two":
        return TwoAgentMechanism().fractional_rule
    if mechanism == "three":
        return ThreeAgentMechanism().fractional_rule
    if mechanism == "three-index":
        return ThreeAgentMechanism(tie_breaking="index").fractional_rule
    if mechanism == "n_ef":
        return EnvyBoundedMechanism().fractional_rule
    if mechanism == "prop1_mms":
        return Prop1MMSMechanism().fractional_rule
    if mechanism == "bivalued":
        if p is None or q is None:
            raise MalformedInputError("the bi-valued rule needs p and q")
        return BiValuedMechanism(p, q, certify=False, decompose=False).fractional_rule
    if mechanism == "mnw-baseline":
        return lambda inst: mnw_integral_baseline(inst).as_fractional(inst.m)
    raise MalformedInputError(f"unknown mechanism {mechanism!r}")


def test_truthfulness(mechanism, instance: Instance, family: MisreportFamily, agents=None, p=None, q=None):
    """Largest true-utility gain any agent obtains from a report in ``family``.

    Reports the mechanism rejects as malformed (for instance, non bi-valued
    reports to the bi-valued rule) are skipped and counted.
    """
    rule = fractional_rule_for(mechanism, p, q)
    name = mechanism if isinstance(mechanism, str) else type(mechanism).__name__
    budget = family.budget if family.budget is not None else enumeration_budget()
    truth = rule(instance)
    gains = []
    for i in range(instance.n) if agents is None else agents:
        row = instance.values[i]
        base = truth.utility(instance, i)
        best, witness = Fraction(0), None
        evaluated = skipped = 0
        complete = True
        for report in family.generate(instance, i):
            if evaluated + skipped >= budget:
                complete = False
                break
            try:
                out = rule(instance.with_row(i, report))
            except MalformedInputError:
                skipped += 1
                continue
            evaluated += 1
            got = sum((row[g] * x for g, x in enumerate(out.shares[i]) if x), Fraction(0))
            if got - base > best:
                best, witness = got - base, tuple(report)
        gains.append(AgentGain(i, best, witness, evaluated, skipped, complete))
    return TruthfulnessReport(name, family.kind, tuple(gains))


test_truthfulness.__test__ = False  # keep pytest from collecting it


# ------------------------------------------------------------ library


def _inst(rows) -> Instance:
    return Instance.from_values(rows)


def ef1_unrealizable_instance() -> Instance:
    """Three agents, four items; equal division is not a lottery over EF1 allocations."""
    return _inst([[2, 1, 4, 4], [1, 2, 4, 4], [4, 4, 2, 1]])


def bivalued_misreport_instance() -> Instance:
    """Two agents with values in {1, 2}; integral Nash welfare rewards a misreport."""
    return _inst([[2, 2, 1, 1, 1, 1], [1, 1, 1, 1, 1, 1]])


def tie_breaking_instance() -> Instance:
    """Agent 1 ties her top two items, agent 2 ties hers, overlapping in one item."""
    return _inst([[2, 2, 1], [1, 2, 2], [1, 1, 1]])


def tri_valued_chain(u: int, v: int, m: int | None = None) -> tuple:
    """Five two-agent instances with values in {1, 1/50, 0}.

    ``m`` defaults to ``200 (u + v)``; the first half of the items is
    ``M1`` and the second half ``M2``.  Each instance lists, per agent, the
    value on ``M1`` and on ``M2``.
    """
    m = 200 * (u + v) if m is None else m
    if m % 2:
        raise MalformedInputError("the chain needs an even number of items")
    hi, lo, zero = Fraction(1), Fraction(1, 50), Fraction(0)
    plan = [
        ((hi, zero), (hi, zero)),
        ((hi, lo), (hi, zero)),
        ((lo, hi), (hi, zero)),
        ((zero, hi), (hi, lo)),
        ((lo, hi), (hi, lo)),
    ]
    half = m // 2
    return tuple(
        Instance(tuple((a,) * half + (b,) * half for a, b in agents)) for agents in plan
    )


# (earlier step, later step, agent whose report differs)
_CHAIN_LINKS = ((0, 1, 0), (1, 2, 0), (2, 4, 1), (3, 4, 0))


@dataclass(frozen=True)
class ChainStep:
    instance: Instance
    fractional: FractionalAllocation
    m1_counts: tuple
    m2_counts: tuple
    utilities: tuple


@dataclass(frozen=True)
class ChainReplay:
    """Outputs of a rule on the five chain instances and the constraints it breaks."""

    u: int
    v: int
    steps: tuple
    violations: tuple

    @property
    def consistent(self) -> bool:
        return not self.violations


def _two_agent_trade(inst: Instance, x: FractionalAllocation):
    """An improving move ``(g, h)`` or None; exact Pareto test for n = 2.

    ``h`` is None when ``g`` is held by an agent who values it at zero and
    wanted by the other.
    """
    held = [{}, {}]
    for g in range(inst.m):
        kind = (inst.values[0][g], inst.values[1][g])
        for i in (0, 1):
            if x.shares[i][g] > 0:
                if kind[i] == 0 and kind[1 - i] > 0:
                    return g, None
                held[i].setdefault(kind, g)
    for (a1, a2), g in held[0].items():
        for (b1, b2), h in held[1].items():
            # agent 1 gives part of g for part of h; agent 2 the reverse
            if b1 * a2 > a1 * b2:
                return g, h
    return None


def replay_chain(mechanism, u: int, v: int, m: int | None = None) -> ChainReplay:
    """Run a two-agent rule on the tri-valued chain and check each step's constraint.

    Checked, on the fractional outputs: both agents hold between
    ``m/4 - (u+v)`` and ``m/4 + (u+v)`` items of ``M1`` in the first
    instance, every output is fractionally Pareto optimal, and no agent
    gains by swapping her report for the neighbouring instance's one.
    """
    rule = fractional_rule_for(mechanism)
    chain = tri_valued_chain(u, v, m)
    half = chain[0].m // 2
    steps = []
    for inst in chain:
        x = rule(inst)
        counts = tuple(sum(row[:half], Fraction(0)) for row in x.shares)
        rest = tuple(sum(row[half:], Fraction(0)) for row in x.shares)
        steps.append(ChainStep(inst, x, counts, rest, tuple(x.utility(inst, i) for i in (0, 1))))
    violations = []
    slack = u + v
    for i, c in enumerate(steps[0].m1_counts):
        if not Fraction(half, 2) - slack <= c <= Fraction(half, 2) + slack:
            violations.append(f"step 1: agent {i + 1} holds {c} items of M1, outside m/4 +- (u+v)")
    for k, st in enumerate(steps, start=1):
        trade = _two_agent_trade(st.instance, st.fractional)
        if trade is not None:
            g, h = trade
            move = f"hand over item {g}" if h is None else f"trade items {g} and {h}"
            violations.append(f"step {k}: not Pareto optimal, {move}")
    for a, b, i in _CHAIN_LINKS:
        for true, lie in ((a, b), (b, a)):
            inst = steps[true].instance
            gain = steps[lie].fractional.utility(inst, i) - steps[true].utilities[i]
            if gain > 0:
                violations.append(
                    f"step {true + 1}: agent {i + 1} gains {gain} by reporting as in step {lie + 1}"
                )
    return ChainReplay(u, v, tuple(steps), tuple(violations))


def picking_exchange_instance(n1: int = 3, n2: int = 3, e1: int = 1, e2: int = 1) -> Instance:
    """Two agents over item blocks ``N1, N2, E1, E2`` with epsilon 1/10, delta 1/1000, mu 1/100000."""
    eps, delta, mu = Fraction(1, 10), Fraction(1, 1000), Fraction(1, 100000)

    def block(size, first, rest):
        return [first] + [rest] * (size - 1) if size else []

    tail = [mu] * (e1 + e2)
    row1 = block(n1, 1 + eps, Fraction(1)) + block(n2, Fraction(1), delta) + tail
    row2 = block(n1, Fraction(1), delta) + block(n2, 1 + eps, Fraction(1)) + tail
    return Instance((tuple(row1), tuple(row2)))


def instance_library(u: int = 0, v: int = 1) -> dict:
    """Named instances; the chain is built for the given ``u, v``."""
    lib = {
        "THM6": ef1_unrealizable_instance(),
        "MNW_BIVALUED": bivalued_misreport_instance(),
        "APPENDIX_C": tie_breaking_instance(),
        "APPENDIX_A": picking_exchange_instance(),
    }
    for k, inst in enumerate(tri_valued_chain(u, v), start=1):
        lib[f"THM9_CHAIN_{k}"] = inst
    return lib


ALIASES = {
    "ef1-unrealizable": "THM6",
    "bivalued-misreport": "MNW_BIVALUED",
    "tie-breaking": "APPENDIX_C",
    "picking-exchange": "APPENDIX_A",
}


def resolve_instance(name: str) -> Instance | None:
    """Library lookup by name or alias; ``THM9_CHAIN`` alone means its first instance."""
    key = ALIASES.get(name, name)
    if key == "THM9_CHAIN":
        key = "THM9_CHAIN_1"
    return instance_library().get(key)
