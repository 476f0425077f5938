"""Instances, allocations and lotteries, plus their JSON encodings.

All quantities are exact rationals.  Items are ``0..m-1`` and agents are
``0..n-1`` internally; the JSON formats are 0-indexed as well.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import MalformedInputError
from .numeric import as_rational, format_rational

__all__ = [
    "Instance",
    "IntegralAllocation",
    "FractionalAllocation",
    "Lottery",
    "pad_to_multiple",
    "expected_utility",
    "load_json",
    "dump_json",
]


@dataclass(frozen=True)
class Instance:
    """Additive valuations ``values[i][g]`` of agent ``i`` for item ``g``."""

    values: tuple
    labels: tuple | None = None

    def __post_init__(self):
        if not self.values:
            raise MalformedInputError("an instance needs at least one agent")
        m = len(self.values[0])
        for row in self.values:
            if len(row) != m:
                raise MalformedInputError("valuation rows differ in length")
            for v in row:
                if not isinstance(v, Fraction):
                    raise MalformedInputError("valuations must be Fractions; use Instance.from_values")
                if v < 0:
                    raise MalformedInputError("valuations must be nonnegative")
        if self.labels is not None and len(self.labels) != m:
            raise MalformedInputError("one label per item is required")

    @classmethod
    def from_values(cls, values, labels=None) -> "Instance":
        rows = tuple(tuple(as_rational(v) for v in row) for row in values)
        return cls(rows, None if labels is None else tuple(str(x) for x in labels))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    def value(self, agent: int, bundle: Iterable[int]) -> Fraction:
        row = self.values[agent]
        return sum((row[g] for g in bundle), Fraction(0))

    def total(self, agent: int) -> Fraction:
        return sum(self.values[agent], Fraction(0))

    def with_row(self, agent: int, row: Sequence[Fraction]) -> "Instance":
        """Copy with one agent's report replaced."""
        values = list(self.values)
        values[agent] = tuple(as_rational(v) for v in row)
        return Instance(tuple(values), self.labels)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "m": self.m,
            "values": [[format_rational(v) for v in row] for row in self.values],
        }
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data) -> "Instance":
        if not isinstance(data, dict) or "values" not in data:
            raise MalformedInputError("instance JSON needs a 'values' table")
        inst = cls.from_values(data["values"], data.get("labels"))
        if "n" in data and data["n"] != inst.n:
            raise MalformedInputError("'n' disagrees with the values table")
        if "m" in data and data["m"] != inst.m:
            raise MalformedInputError("'m' disagrees with the values table")
        return inst


def pad_to_multiple(instance: Instance, k: int) -> Instance:
    """Append zero-valued dummy items until ``m`` is a multiple of ``k``.

    Dummies take the highest indices, so index tie-breaks place them last.
    """
    extra = (-instance.m) % k
    if not extra:
        return instance
    values = tuple(row + (Fraction(0),) * extra for row in instance.values)
    labels = None if instance.labels is None else instance.labels + tuple(f"dummy{t}" for t in range(extra))
    return Instance(values, labels)


@dataclass(frozen=True)
class IntegralAllocation:
    """A partition of the items into one bundle per agent."""

    bundles: tuple

    @classmethod
    def from_bundles(cls, bundles, m: int | None = None) -> "IntegralAllocation":
        try:
            norm = tuple(tuple(sorted(int(g) for g in b)) for b in bundles)
        except (TypeError, ValueError) as exc:
            raise MalformedInputError("bundles must be lists of item indices") from exc
        items = [g for b in norm for g in b]
        if len(items) != len(set(items)):
            raise MalformedInputError("an item appears in two bundles")
        if items and min(items) < 0:
            raise MalformedInputError("negative item index")
        if m is not None and sorted(items) != list(range(m)):
            raise MalformedInputError(f"bundles must partition items 0..{m - 1}")
        return cls(norm)

    @classmethod
    def from_owners(cls, owners: Sequence[int], n: int) -> "IntegralAllocation":
        bundles: list[list[int]] = [[] for _ in range(n)]
        for g, i in enumerate(owners):
            bundles[i].append(g)
        return cls(tuple(tuple(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def owners(self, m: int) -> tuple:
        owner = [-1] * m
        for i, b in enumerate(self.bundles):
            for g in b:
                owner[g] = i
        return tuple(owner)

    def restrict(self, m: int) -> "IntegralAllocation":
        """Drop items with index ``>= m`` (padding dummies)."""
        return IntegralAllocation(tuple(tuple(g for g in b if g < m) for b in self.bundles))

    def permuted(self, order: Sequence[int]) -> "IntegralAllocation":
        """Agent ``i`` receives bundle ``order[i]``."""
        return IntegralAllocation(tuple(self.bundles[k] for k in order))

    def as_fractional(self, m: int) -> "FractionalAllocation":
        rows = [[Fraction(0)] * m for _ in self.bundles]
        for i, b in enumerate(self.bundles):
            for g in b:
                rows[i][g] = Fraction(1)
        return FractionalAllocation(tuple(tuple(r) for r in rows))

    def to_dict(self) -> dict:
        return {"bundles": [list(b) for b in self.bundles]}


@dataclass(frozen=True)
class FractionalAllocation:
    """``shares[i][g]`` is the fraction of item ``g`` given to agent ``i``."""

    shares: tuple

    def __post_init__(self):
        if not self.shares:
            raise MalformedInputError("a fractional allocation needs at least one agent")
        m = len(self.shares[0])
        if any(len(row) != m for row in self.shares):
            raise MalformedInputError("share rows differ in length")
        for g in range(m):
            col = [row[g] for row in self.shares]
            if any(x < 0 for x in col):
                raise MalformedInputError("shares must be nonnegative")
            if sum(col) != 1:
                raise MalformedInputError(f"item {g} is not allocated exactly once")

    @classmethod
    def from_shares(cls, shares) -> "FractionalAllocation":
        return cls(tuple(tuple(as_rational(x) for x in row) for row in shares))

    @classmethod
    def equal_division(cls, n: int, m: int) -> "FractionalAllocation":
        share = Fraction(1, n)
        return cls(tuple((share,) * m for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def m(self) -> int:
        return len(self.shares[0])

    def utility(self, instance: Instance, agent: int, as_agent: int | None = None) -> Fraction:
        """Value of ``agent``'s share measured by ``as_agent`` (default: itself)."""
        row = instance.values[agent if as_agent is None else as_agent]
        return sum((row[g] * x for g, x in enumerate(self.shares[agent]) if x), Fraction(0))

    def to_dict(self) -> dict:
        return {"shares": [[format_rational(x) for x in row] for row in self.shares]}

    @classmethod
    def from_dict(cls, data) -> "FractionalAllocation":
        if not isinstance(data, dict) or "shares" not in data:
            raise MalformedInputError("fractional allocation JSON needs a 'shares' table")
        return cls.from_shares(data["shares"])


@dataclass(frozen=True)
class Lottery:
    """A finite distribution over integral allocations."""

    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise MalformedInputError("a lottery needs at least one allocation")
        total = Fraction(0)
        for p, alloc in self.entries:
            if not isinstance(p, Fraction) or p <= 0:
                raise MalformedInputError("lottery probabilities must be positive Fractions")
            if not isinstance(alloc, IntegralAllocation):
                raise MalformedInputError("lottery entries must hold IntegralAllocation objects")
            total += p
        if total != 1:
            raise MalformedInputError(f"lottery probabilities sum to {total}, not 1")

    @classmethod
    def uniform(cls, allocations: Sequence[IntegralAllocation]) -> "Lottery":
        p = Fraction(1, len(allocations))
        return cls(tuple((p, a) for a in allocations))

    @property
    def support(self) -> tuple:
        return tuple(a for _, a in self.entries)

    def normalized(self) -> "Lottery":
        """Merge repeated allocations, keeping first-seen order.

        >>> a, b = IntegralAllocation(((0,), ())), IntegralAllocation(((), (0,)))
        >>> half = Fraction(1, 2)
        >>> Lottery(((half / 2, a), (half, b), (half / 2, a))).normalized().entries == ((half, a), (half, b))
        True
        """
        merged = {}
        for p, alloc in self.entries:
            merged[alloc] = merged.get(alloc, Fraction(0)) + p
        return Lottery(tuple((p, a) for a, p in merged.items()))

    def marginals(self, m: int) -> FractionalAllocation:
        n = self.entries[0][1].n
        rows = [[Fraction(0)] * m for _ in range(n)]
        for p, alloc in self.entries:
            for i, b in enumerate(alloc.bundles):
                for g in b:
                    rows[i][g] += p
        return FractionalAllocation(tuple(tuple(r) for r in rows))

    def sample(self, random_state=None) -> IntegralAllocation:
        """Draw one allocation exactly: an integer draw over the common denominator."""
        rng = random_state if isinstance(random_state, random.Random) else random.Random(random_state)
        denom = math.lcm(*(p.denominator for p, _ in self.entries))
        ticket = rng.randrange(denom)
        acc = 0
        for p, alloc in self.entries:
            acc += p.numerator * (denom // p.denominator)
            if ticket < acc:
                return alloc
        return self.entries[-1][1]

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"p": format_rational(p), "bundles": [list(b) for b in alloc.bundles]} for p, alloc in self.entries
            ]
        }

    @classmethod
    def from_dict(cls, data) -> "Lottery":
        if not isinstance(data, dict) or "entries" not in data:
            raise MalformedInputError("lottery JSON needs an 'entries' list")
        try:
            entries = tuple(
                (as_rational(e["p"]), IntegralAllocation.from_bundles(e["bundles"])) for e in data["entries"]
            )
        except (KeyError, TypeError) as exc:
            raise MalformedInputError("lottery entries need 'p' and 'bundles'") from exc
        return cls(entries)


def expected_utility(instance: Instance, allocation) -> tuple:
    """Each agent's (expected) value for a lottery, fractional or integral allocation."""
    if isinstance(allocation, Lottery):
        allocation = allocation.marginals(instance.m)
    if isinstance(allocation, IntegralAllocation):
        return tuple(instance.value(i, b) for i, b in enumerate(allocation.bundles))
    return tuple(allocation.utility(instance, i) for i in range(allocation.n))


def load_json(path):
    """Read a JSON document, mapping decode errors to MalformedInputError."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj.to_dict() if hasattr(obj, "to_dict") else obj, indent=2)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
