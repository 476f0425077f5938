"""Three agents: a truthful fractional rule realized over EF^{+1}_{-1} allocations.

Agent 3 splits the items into triples of consecutive items in her own
order.  A triple is *Type II* when agents 1 and 2 share one strict favourite
and *Type I* otherwise; a Type I triple gets roles ``(a1, a2, b)`` where
``a_i`` is a favourite of agent ``i``.  The fractional rule gives agent
``i`` two thirds of ``a_i`` and splits the rest evenly.

The lottery uses three allocations of probability 1/3 each.  Type I
triples are spread by three assignment rules over a 3-colouring of a
3-regular multigraph.  Type II triples are split into three regular
bundles ``X, Y, Z`` by an LP vertex rounding and a 2-colouring, then
permuted so that no agent ends up with a bundle she finds too poor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .base import BaseMechanism
from .exceptions import InvariantViolation, MalformedInputError
from .fairness import check_ef_uv, envy_witness
from .graphs import BipartiteMultigraph, edge_coloring
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery, pad_to_multiple
from .numeric import LinearSystem, move_to_adjacent_vertex, solve_vertex

__all__ = [
    "Triple",
    "favourites",
    "assign_roles",
    "build_groups",
    "fractional_rule",
    "TypeOnePlan",
    "type_one_plan",
    "type_two_split",
    "mech3_run",
    "ThreeAgentMechanism",
]

THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)
RULES = ("s", "1", "2")
TIE_BREAKINGS = ("algorithm", "index")


@dataclass(frozen=True)
class Triple:
    """Three items of agent 3's grouping; ``roles`` is ``(a1, a2, b)`` for Type I."""

    items: tuple
    roles: tuple | None
    case: int

    @property
    def kind(self) -> str:
        return "II" if self.roles is None else "I"


def favourites(row: Sequence[Fraction], items: Sequence[int]) -> frozenset:
    best = max(row[g] for g in items)
    return frozenset(g for g in items if row[g] == best)


def _argmin(items, key):
    return min(sorted(items), key=key)


def assign_roles(row1, row2, items, tie_breaking: str = "algorithm"):
    """Classify one triple and pick the favourites ``(a1, a2, b)``.

    Returns ``(roles, case)``; ``roles`` is ``None`` for a Type II triple.
    With ``tie_breaking="index"`` agent 1 takes her lowest-index favourite
    and agent 2 then takes her lowest-index favourite among the rest; this
    variant is not truthful and exists for comparison.
    """
    f1 = favourites(row1, items)
    f2 = favourites(row2, items)
    if len(f1 | f2) == 1:
        return None, 1
    if tie_breaking == "index":
        a1 = min(f1)
        rest = [g for g in items if g != a1]
        a2 = min(favourites(row2, rest))
        case = 0
    elif tie_breaking != "algorithm":
        raise ValueError(f"unknown tie_breaking {tie_breaking!r}")
    elif len(f1) == 1 and len(f2 - f1) == 1:
        (a1,), (a2,), case = f1, f2 - f1, 2
    elif len(f2) == 1 and len(f1 - f2) == 1:
        (a1,), (a2,), case = f1 - f2, f2, 3
    elif len(f1) == 1 and len(f2 - f1) == 2:
        (a1,) = f1
        a2 = _argmin(f2 - f1, lambda g: row1[g])
        case = 4
    elif len(f2) == 1 and len(f1 - f2) == 2:
        (a2,) = f2
        a1 = _argmin(f1 - f2, lambda g: row2[g])
        case = 5
    elif len(f1) == 2 and len(f2) == 2:
        if f1 == f2:
            a1, a2 = sorted(f1)
            case = 6
        else:
            (a1,), (a2,) = f1 - f2, f2 - f1
            case = 7
    elif len(f1) == 2 and len(f2) == 3:
        a1 = min(f1)
        (a2,) = f2 - f1
        case = 8
    elif len(f1) == 3 and len(f2) == 2:
        a2 = min(f2)
        (a1,) = f1 - f2
        case = 9
    else:
        a1, a2 = sorted(items)[:2]
        case = 10
    (b,) = [g for g in items if g not in (a1, a2)]
    return (a1, a2, b), case


def build_groups(instance: Instance, tie_breaking: str = "algorithm"):
    """Pad to a multiple of three and form agent 3's triples.

    Returns ``(padded_instance, triples)``.
    """
    padded = pad_to_multiple(instance, 3)
    row3 = padded.values[2]
    order = sorted(range(padded.m), key=lambda g: (-row3[g], g))
    triples = []
    for k in range(0, padded.m, 3):
        items = tuple(order[k : k + 3])
        roles, case = assign_roles(padded.values[0], padded.values[1], items, tie_breaking)
        triples.append(Triple(items, roles, case))
    return padded, triples


def fractional_rule(instance: Instance, tie_breaking: str = "algorithm") -> FractionalAllocation:
    """Two thirds of ``a_i`` to agent ``i`` in Type I triples; thirds elsewhere."""
    padded, triples = build_groups(instance, tie_breaking)
    shares = [[THIRD] * padded.m for _ in range(3)]
    for t in triples:
        if t.roles is None:
            continue
        a1, a2, _ = t.roles
        shares[0][a1], shares[1][a1], shares[2][a1] = TWO_THIRDS, Fraction(0), THIRD
        shares[0][a2], shares[1][a2], shares[2][a2] = Fraction(0), TWO_THIRDS, THIRD
    m = instance.m
    return FractionalAllocation(tuple(tuple(row[:m]) for row in shares))


# ---------------------------------------------------------------- Type I

def _blocks(keys: Sequence[Fraction], size: int) -> list[int]:
    """Block label per entry after sorting by decreasing key (ties by position)."""
    order = sorted(range(len(keys)), key=lambda t: (-keys[t], t))
    label = [0] * len(keys)
    for pos, t in enumerate(order):
        label[t] = pos // size
    return label


@dataclass(frozen=True)
class TypeOnePlan:
    """Colour classes ``P, Q, R`` of the Type I triples and their margins.

    ``delta[i][t]`` is agent ``i``'s margin ``v_i(a_i) - v_i(b)`` on triple
    ``t``; ``gamma[i][c]`` sums it over colour class ``c``.
    """

    triples: tuple
    classes: tuple
    delta: tuple
    gamma: tuple

    def allocate(self, rules: Sequence[str]) -> list[list[int]]:
        """Bundles of the Type I items when class ``c`` uses ``rules[c]``."""
        bundles: list[list[int]] = [[], [], []]
        for cls, rule in zip(self.classes, rules):
            for t in cls:
                a1, a2, b = self.triples[t].roles
                if rule == "s":
                    got = (a1, a2, b)
                elif rule == "1":
                    got = (a1, b, a2)
                else:
                    got = (b, a2, a1)
                for agent, g in enumerate(got):
                    bundles[agent].append(g)
        return bundles


def type_one_plan(instance: Instance, triples: Sequence[Triple]) -> TypeOnePlan:
    """3-colour the Type I triples so each agent's sorted blocks of three are split."""
    rows = instance.values
    triples = tuple(triples)
    delta = tuple(
        tuple(rows[i][t.roles[i]] - rows[i][t.roles[2]] for t in triples) for i in (0, 1)
    )
    k = len(triples)
    pad = (-k) % 3
    keys1 = list(delta[0]) + [Fraction(0)] * pad
    keys2 = list(delta[1]) + [Fraction(0)] * pad
    left, right = _blocks(keys1, 3), _blocks(keys2, 3)
    size = (k + pad) // 3
    if size:
        graph = BipartiteMultigraph.from_edges(size, size, list(zip(left, right)))
        colours = edge_coloring(graph)
    else:
        colours = [[], [], []]
    classes = tuple(tuple(sorted(t for t in c if t < k)) for c in colours)
    gamma = tuple(tuple(sum((delta[i][t] for t in c), Fraction(0)) for c in classes) for i in (0, 1))
    return TypeOnePlan(triples, classes, delta, gamma)


# ---------------------------------------------------------------- Type II


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _orient(rows, pair):
    """Order a pair so agent 1 weakly prefers the first item (then agent 2, then index)."""
    return tuple(sorted(pair, key=lambda g: (-rows[0][g], -rows[1][g], g)))


def _round_pairs(x, first, second):
    """Round two fractional pairs ``(a, b)`` and ``(c, d)`` to one item each."""
    a, b = first
    c, d = second

    def pick(p, q):
        if x[p] >= TWO_THIRDS:
            return p
        if x[q] >= TWO_THIRDS:
            return q
        return None

    one, two = pick(a, b), pick(c, d)
    if one is not None and two is not None:
        return (one, two), "round-both"
    if one is None and two is not None:
        return (b if two == c else a, two), "round-second"
    if one is not None and two is None:
        return (one, d if one == a else c), "round-first"
    return (a, d), "round-middle"


def _x_certificates(rows, universe, chosen) -> dict:
    """Per agent: the item witnessing ``v(X)`` within two thirds of an item of one third."""
    certs = {}
    chosen_set = set(chosen)
    for i in (0, 1):
        row = rows[i]
        third = sum((row[g] for g in universe), Fraction(0)) * THIRD
        have = sum((row[g] for g in chosen), Fraction(0))
        if have < third:
            outside = [g for g in universe if g not in chosen_set]
            g = min(outside, key=lambda h: (-row[h], h))
            ok = have + TWO_THIRDS * row[g] >= third
            certs[i] = ("plus", g, ok)
        elif have > third:
            g = min(chosen, key=lambda h: (-row[h], h))
            ok = have - TWO_THIRDS * row[g] <= third
            certs[i] = ("minus", g, ok)
        else:
            certs[i] = ("exact", None, True)
    return certs


def choose_x(instance: Instance, triples: Sequence[Triple], trace: dict | None = None) -> tuple:
    """One item from each Type II triple, worth about a third to agents 1 and 2.

    Solves ``v_1(X') = v_1(M)/3, v_2(X') = v_2(M)/3`` over fractional
    selections and rounds a vertex.  A vertex has at most two fractional
    triples; when their pairs are ordered oppositely by the two agents,
    the vertex is first moved along the edge that raises the third item of
    the opposite-order triple.
    """
    rows = instance.values
    k = len(triples)
    if k == 0:
        return ()
    universe = [g for t in triples for g in t.items]
    var_item = universe
    a_eq, b_eq = [], []
    for i in (0, 1):
        a_eq.append([rows[i][g] for g in var_item])
        b_eq.append(sum((rows[i][g] for g in universe), Fraction(0)) * THIRD)
    for t in range(k):
        a_eq.append([Fraction(int(3 * t <= j < 3 * t + 3)) for j in range(3 * k)])
        b_eq.append(Fraction(1))
    system = LinearSystem.build(a_eq, b_eq, n_vars=3 * k, lower=0)
    outcome = solve_vertex(system)
    if not outcome.feasible:
        raise InvariantViolation("selection LP is infeasible")
    steps = []
    for _ in range(k + 2):
        xv = outcome.vertex
        x = {var_item[j]: xv[j] for j in range(3 * k)}
        frac = [t for t in range(k) if any(0 < xv[3 * t + s] < 1 for s in range(3))]
        chosen = {t: triples[t].items[s] for t in range(k) for s in range(3) if xv[3 * t + s] == 1}
        if not frac:
            case = "integral"
            break
        if len(frac) == 1:
            (t,) = frac
            keep = min(triples[t].items, key=lambda g: (-x[g], g))
            chosen[t] = keep
            case = "one-fractional"
            break
        if len(frac) != 2:
            raise InvariantViolation(f"vertex has {len(frac)} fractional triples")
        pairs = []
        for t in frac:
            live = [g for g in triples[t].items if 0 < x[g] < 1]
            if len(live) != 2:
                raise InvariantViolation("fractional triple without exactly two live items")
            pairs.append(_orient(rows, live))
        signs = [_sign(rows[1][p[0]] - rows[1][p[1]]) for p in pairs]
        if signs[0] >= 0 and signs[1] >= 0:
            case = "same-order"
        elif signs[0] <= 0 and signs[1] <= 0:
            case = "reverse-order"
        else:
            same = 0 if signs[0] > 0 else 1
            p = pairs[same]
            if rows[0][p[0]] == rows[0][p[1]]:
                pairs[same] = (p[1], p[0])
                case = "reverse-order"
            else:
                opp = frac[1 - same]
                (e,) = [g for g in triples[opp].items if g not in pairs[1 - same]]
                steps.append(("edge-move", e))
                outcome = move_to_adjacent_vertex(system, outcome, var_item.index(e), +1)
                continue
        picked, rule = _round_pairs(x, pairs[0], pairs[1])
        chosen[frac[0]], chosen[frac[1]] = picked
        case = f"{case}/{rule}"
        break
    else:
        raise InvariantViolation("edge moves did not reach a roundable vertex")
    result = tuple(chosen[t] for t in range(k))
    certs = _x_certificates(rows, universe, result)
    if not all(ok for _, _, ok in certs.values()):
        raise InvariantViolation(f"rounded selection misses a third: {certs}")
    if trace is not None:
        trace.update({"x_case": case, "x_steps": steps, "x_certificates": certs})
    return result


def _two_colour_pairs(pairs, d1, d2):
    """Split oriented pairs so each agent's consecutive blocks of two are balanced.

    Returns ``(first, second)``: in every block one pair sends its top item
    to ``first`` and the other sends its bottom item.
    """
    k = len(pairs)
    pad = k % 2
    left = _blocks(list(d1) + [Fraction(0)] * pad, 2)
    right = _blocks(list(d2) + [Fraction(0)] * pad, 2)
    size = (k + pad) // 2
    if not size:
        return [], []
    colours = edge_coloring(BipartiteMultigraph.from_edges(size, size, list(zip(left, right))))
    first, second = [], []
    for colour, edges in enumerate(colours):
        for t in edges:
            if t >= k:
                continue
            top, bottom = pairs[t]
            if colour == 0:
                first.append(top)
                second.append(bottom)
            else:
                first.append(bottom)
                second.append(top)
    return first, second


def type_two_split(instance: Instance, triples: Sequence[Triple], chosen: Sequence[int], fixed: int):
    """Split the two leftover items of each Type II triple into ``Y`` and ``Z``.

    Agent ``fixed`` sees ``Y`` and ``Z`` as EF1 both ways; the other of
    agents 1 and 2 sees them as EF^{+0}_{-2}.
    """
    rows = instance.values
    same, opposite = [], []
    for t, g in zip(triples, chosen):
        pair = _orient(rows, [h for h in t.items if h != g])
        (same if rows[1][pair[0]] >= rows[1][pair[1]] else opposite).append(pair)
    d1 = [rows[0][a] - rows[0][b] for a, b in same]
    d2 = [rows[1][a] - rows[1][b] for a, b in same]
    a1, a2 = _two_colour_pairs(same, d1, d2)
    d1 = [rows[0][a] - rows[0][b] for a, b in opposite]
    d2 = [rows[1][b] - rows[1][a] for a, b in opposite]
    o1, o2 = _two_colour_pairs(opposite, d1, d2)
    row = rows[fixed]
    value = lambda s: sum((row[g] for g in s), Fraction(0))  # noqa: E731
    if value(a1) < value(a2):
        a1, a2 = a2, a1
    if value(o1) < value(o2):
        o1, o2 = o2, o1
    return tuple(sorted(a1 + o2)), tuple(sorted(a2 + o1))


# ---------------------------------------------------------- combination


def _holds(row, own, other, u, v, universe) -> bool:
    return envy_witness(row, own, other, u, v, universe).satisfied


def unwanted_bundles(row, bundles: dict, universe) -> list[str]:
    """Names of bundles from which the agent is EF^{+1}_{-1} but neither EF1 nor EF^{+1}_{-0}
    towards some other bundle."""
    out = []
    for name, own in bundles.items():
        for other_name, other in bundles.items():
            if other_name == name:
                continue
            if _holds(row, own, other, 0, 1, universe) or _holds(row, own, other, 1, 0, universe):
                continue
            if not _holds(row, own, other, 1, 1, universe):
                raise InvariantViolation(f"bundle {name} is not EF^{{+1}}_{{-1}} towards {other_name}")
            out.append(name)
            break
    return out


CYCLIC = (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y"))
ANTICYCLIC = (("X", "Z", "Y"), ("Z", "Y", "X"), ("Y", "X", "Z"))


def _latin_schedules():
    perms = list(itertools.permutations(RULES))
    for a, b, c in itertools.product(perms, repeat=3):
        if all({a[s], b[s], c[s]} == set(RULES) for s in range(3)):
            yield (a, b, c)


def _argmin_class(gamma) -> int:
    return min(range(3), key=lambda c: (gamma[c], c))


def _schedule_simple(unwanted1, unwanted2, gamma):
    """Three Type II permutations and a Latin square of Type I rules.

    In the permutation giving agent 1 her unwanted bundle, the class with
    the smallest agent-1 margin uses rule 2 (agent 1 envies nobody on Type
    I items); symmetrically rule 1 for agent 2.
    """
    u1 = unwanted1[0] if unwanted1 else None
    u2 = unwanted2[0] if unwanted2 else None
    for family in (CYCLIC, ANTICYCLIC):
        if any(p[0] == u1 and p[1] == u2 and u1 is not None and u2 is not None for p in family):
            continue
        needs = []
        for c, perm in enumerate(family):
            if u1 is not None and perm[0] == u1:
                needs.append((c, _argmin_class(gamma[0]), "2"))
            if u2 is not None and perm[1] == u2:
                needs.append((c, _argmin_class(gamma[1]), "1"))
        for schedule in _latin_schedules():
            if all(schedule[c][s] == r for c, s, r in needs):
                return [(family[c], schedule[c]) for c in range(3)]
    raise InvariantViolation("no schedule separates the unwanted bundles")


def _rules(p, q, r):
    return {"P": p, "Q": q, "R": r}


# rule tables keyed by the sub-case, columns follow the Type II permutations
_NOBODY_UNWANTED_2 = [
    (("X", "Y", "Z"), _rules("s", "1", "2")),
    (("Y", "Z", "X"), _rules("1", "2", "s")),
    (("Z", "X", "Y"), _rules("2", "s", "1")),
]
_PERMS_Y_ABOVE_Z = (("Y", "X", "Z"), ("X", "Z", "Y"), ("Z", "Y", "X"))
_RULES_Y_ABOVE_Z = {
    True: (_rules("s", "2", "1"), _rules("1", "s", "2"), _rules("2", "1", "s")),
    False: (_rules("s", "1", "2"), _rules("1", "2", "s"), _rules("2", "s", "1")),
}
_PERMS_Z_ABOVE_Y = (("Y", "X", "Z"), ("X+g", "Z-g", "Y"), ("Z-g", "Y+g", "X"))
_RULES_Z_ABOVE_Y = {
    "P": (_rules("1", "s", "2"), _rules("s", "2", "1"), _rules("2", "1", "s")),
    "Q": (_rules("s", "1", "2"), _rules("2", "s", "1"), _rules("1", "2", "s")),
    "R": (_rules("s", "2", "1"), _rules("2", "1", "s"), _rules("1", "s", "2")),
}


def _schedule_two_unwanted(rows, bundles, unwanted1, unwanted2, plan_gamma, universe, trace):
    """Both agents below a third on ``X`` and agent 1 has two unwanted bundles."""
    value = lambda i, s: sum((rows[i][g] for g in s), Fraction(0))  # noqa: E731
    names = {"X": "X", "Y": "Y", "Z": "Z"}
    if value(0, bundles["Y"]) > value(0, bundles["Z"]):
        names["Y"], names["Z"] = "Z", "Y"
    b = {k: bundles[v] for k, v in names.items()}
    if sorted(names[u] for u in ("X", "Y")) != sorted(unwanted1):
        raise InvariantViolation(f"agent 1 unwanted bundles {unwanted1} are not X and the poorer of Y, Z")
    # rank colour classes by agent 1's margin, largest first
    order = sorted(range(3), key=lambda c: (-plan_gamma[0][c], c))
    cls = dict(zip("PQR", order))
    g2 = {k: plan_gamma[1][c] for k, c in cls.items()}
    if not unwanted2:
        table = _NOBODY_UNWANTED_2
        sub = "agent2-content"
    elif unwanted2 == ["X"]:
        if value(1, b["Y"]) >= value(1, b["Z"]):
            perms = _PERMS_Y_ABOVE_Z
            rules = _RULES_Y_ABOVE_Z[g2["Q"] >= g2["R"]]
            sub = "agent2-prefers-Y"
        else:
            perms = _PERMS_Z_ABOVE_Y
            low = min("PQR", key=lambda k: (g2[k], k))
            rules = _RULES_Z_ABOVE_Y[low]
            sub = "agent2-prefers-Z"
            moved = min(b["Z"], key=lambda h: (-rows[0][h], h))
            b["X+g"] = tuple(sorted(b["X"] + (moved,)))
            b["Z-g"] = tuple(h for h in b["Z"] if h != moved)
            b["Y+g"] = tuple(sorted(b["Y"] + (moved,)))
            trace["moved_item"] = moved
        table = list(zip(perms, rules))
    else:
        raise InvariantViolation(f"agent 2 unwanted bundles {unwanted2} not covered")
    trace["combination"] = sub
    combos = []
    for perm, rule_map in table:
        rules = ["s"] * 3
        for k, c in cls.items():
            rules[c] = rule_map[k]
        combos.append((tuple(b[p] for p in perm), tuple(rules)))
    return combos


def mech3_run(instance: Instance, audit: bool = True, trace: dict | None = None) -> Lottery:
    """Uniform lottery over three EF^{+1}_{-1} allocations implementing the fractional rule."""
    trace = {} if trace is None else trace
    padded, triples = build_groups(instance)
    rows = padded.values
    type1 = [t for t in triples if t.roles is not None]
    type2 = [t for t in triples if t.roles is None]
    trace["cases"] = [t.case for t in triples]
    plan = type_one_plan(padded, type1)
    trace["type_one_classes"] = plan.classes
    universe = [g for t in type2 for g in t.items]
    x = choose_x(padded, type2, trace)
    third = [sum((rows[i][g] for g in universe), Fraction(0)) * THIRD for i in (0, 1)]
    have = [sum((rows[i][g] for g in x), Fraction(0)) for i in (0, 1)]
    if have[0] >= third[0]:
        fixed, branch = 1, "agent1-content-with-X"
    elif have[1] >= third[1]:
        fixed, branch = 0, "agent2-content-with-X"
    else:
        fixed, branch = 1, "both-below-third"
    y, z = type_two_split(padded, type2, x, fixed)
    bundles = {"X": tuple(sorted(x)), "Y": y, "Z": z}
    un1 = unwanted_bundles(rows[0], bundles, universe)
    un2 = unwanted_bundles(rows[1], bundles, universe)
    trace.update({"branch": branch, "fixed_agent": fixed + 1, "bundles": bundles, "unwanted": (un1, un2)})
    if len(un1) <= 1 and len(un2) <= 1:
        trace["combination"] = "separate-unwanted"
        combos = [(tuple(bundles[p] for p in perm), rules) for perm, rules in _schedule_simple(un1, un2, plan.gamma)]
    elif branch == "both-below-third" and len(un1) == 2 and len(un2) <= 1:
        combos = _schedule_two_unwanted(rows, bundles, un1, un2, plan.gamma, universe, trace)
    else:
        raise InvariantViolation(f"unwanted bundles {un1}, {un2} fall outside the covered cases")
    allocations = []
    for parts, rules in combos:
        own = plan.allocate(rules)
        full = [sorted(own[i] + list(parts[i])) for i in range(3)]
        allocations.append(IntegralAllocation(tuple(tuple(b) for b in full)).restrict(instance.m))
    trace["schedule"] = [rules for _, rules in combos]
    lottery = Lottery.uniform(allocations)
    if audit:
        for alloc in allocations:
            report = check_ef_uv(instance, alloc, 1, 1)
            if not report.satisfied:
                raise InvariantViolation(f"support allocation violates EF^{{+1}}_{{-1}}: {report.violations}")
        if lottery.marginals(instance.m) != fractional_rule(instance):
            raise InvariantViolation("lottery marginals differ from the fractional rule")
    return lottery


class ThreeAgentMechanism(BaseMechanism):
    """Truthful, ex-ante EF1 and ex-post EF^{+1}_{-1} mechanism for three agents.

    Parameters
    ----------
    tie_breaking : {"algorithm", "index"}
        How favourites are picked in Type I triples.  ``"index"`` is the
        naive lowest-index rule; it is kept only to show that it breaks
        truthfulness and only its ``fractional_rule`` is available.
    audit : bool
        Re-check EF^{+1}_{-1} of every support allocation and the marginals.
    """

    n_agents = 3

    def __init__(self, tie_breaking: str = "algorithm", audit: bool = True):
        self.tie_breaking = tie_breaking
        self.audit = audit

    def fractional_rule(self, values) -> FractionalAllocation:
        if self.tie_breaking not in TIE_BREAKINGS:
            raise ValueError(f"tie_breaking must be one of {TIE_BREAKINGS}")
        return fractional_rule(self._validate(values), self.tie_breaking)

    def _run(self, instance):
        if self.tie_breaking != "algorithm":
            raise MalformedInputError("only the truthful tie-breaking has a lottery implementation")
        trace: dict = {}
        lottery = mech3_run(instance, self.audit, trace)
        return fractional_rule(instance), lottery, {"trace_": trace}
