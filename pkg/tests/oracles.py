"""Brute-force reference implementations used to cross-check the library.

Nothing here imports the routines it checks; each oracle is the slow,
definitional version of a fast routine.
"""

import itertools
import random
from fractions import Fraction


def rand_instance(rng, n, m, hi=20, zeros=True):
    lo = 0 if zeros else 1
    return [[Fraction(rng.randint(lo, hi), rng.choice((1, 1, 2, 3))) for _ in range(m)] for _ in range(n)]


def subsets(items, max_size):
    items = list(items)
    for k in range(min(max_size, len(items)) + 1):
        yield from itertools.combinations(items, k)


def ef_uv_exhaustive(values, bundles, u, v):
    """Every ordered pair, every add-set of size <= u outside the own bundle,
    every remove-set of size <= v inside the other bundle."""
    m = len(values[0])
    for i, own in enumerate(bundles):
        row = values[i]
        outside = [g for g in range(m) if g not in own]
        mine = sum((row[g] for g in own), Fraction(0))
        for j, other in enumerate(bundles):
            if i == j:
                continue
            theirs = sum((row[g] for g in other), Fraction(0))
            ok = False
            for s in subsets(outside, u):
                gain = sum((row[g] for g in s), Fraction(0))
                for t in subsets(other, v):
                    loss = sum((row[g] for g in t), Fraction(0))
                    if mine + gain >= theirs - loss:
                        ok = True
                        break
                if ok:
                    break
            if not ok:
                return False
    return True


def mms_exhaustive(row, n):
    best = None
    for owners in itertools.product(range(n), repeat=len(row)):
        sums = [Fraction(0)] * n
        for g, i in enumerate(owners):
            sums[i] += row[g]
        low = min(sums)
        if best is None or low > best:
            best = low
    return best


def prop1_definition(values, bundles):
    n, m = len(values), len(values[0])
    for i, own in enumerate(bundles):
        row = values[i]
        have = sum((row[g] for g in own), Fraction(0))
        total = sum(row, Fraction(0))
        if have * n >= total:
            continue
        if not any((have + row[g]) * n >= total for g in range(m) if g not in own):
            return False
    return True


def _solve(rows, rhs):
    """Gauss-Jordan; ``None`` if singular."""
    size = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


def vertices_by_bases(a_eq, b_eq, lower, upper):
    """All vertices of ``{A x = b, lower <= x <= upper}`` by trying every
    choice of ``n`` constraints as tight."""
    n = len(lower)
    cons = [(list(row), b) for row, b in zip(a_eq, b_eq)]
    bounds = []
    for j in range(n):
        unit = [Fraction(int(k == j)) for k in range(n)]
        if lower[j] is not None:
            bounds.append((unit, lower[j]))
        if upper[j] is not None:
            bounds.append((unit, upper[j]))
    allc = cons + bounds
    found = set()
    for combo in itertools.combinations(range(len(allc)), n):
        x = _solve([allc[c][0] for c in combo], [allc[c][1] for c in combo])
        if x is None:
            continue
        if any(sum(a * v for a, v in zip(row, x)) != b for row, b in cons):
            continue
        if any(lower[j] is not None and x[j] < lower[j] for j in range(n)):
            continue
        if any(upper[j] is not None and x[j] > upper[j] for j in range(n)):
            continue
        found.add(tuple(x))
    return found


# ------------------------------------------------- three-agent rule oracle


def favourite_pair(r1, r2, items):
    """Favourite items ``(a1, a2)`` of a triple, or ``None`` for a common unique favourite.

    Written case by case from the ten-case selection table with the
    deterministic choices: lowest index wherever the table says "arbitrary",
    and agent 1's less valued item when agent 2 has two candidates (and
    symmetrically).
    """
    t1 = max(r1[g] for g in items)
    t2 = max(r2[g] for g in items)
    F1 = {g for g in items if r1[g] == t1}
    F2 = {g for g in items if r2[g] == t2}
    if len(F1 | F2) == 1:
        return None
    if len(F1) == 1 and len(F2 - F1) == 1:
        return min(F1), min(F2 - F1)
    if len(F2) == 1 and len(F1 - F2) == 1:
        return min(F1 - F2), min(F2)
    if len(F1) == 1 and len(F2 - F1) == 2:
        a, b = sorted(F2 - F1)
        return min(F1), (b if r1[b] < r1[a] else a)
    if len(F2) == 1 and len(F1 - F2) == 2:
        a, b = sorted(F1 - F2)
        return (b if r2[b] < r2[a] else a), min(F2)
    if len(F1) == 2 and len(F2) == 2:
        if F1 == F2:
            a, b = sorted(F1)
            return a, b
        return min(F1 - F2), min(F2 - F1)
    if len(F1) == 2 and len(F2) == 3:
        return min(F1), min(F2 - F1)
    if len(F1) == 3 and len(F2) == 2:
        return min(F1 - F2), min(F2)
    s = sorted(items)
    return s[0], s[1]


def three_agent_marginals(values):
    """Per-group allocation table applied to agent 3's triples."""
    m = len(values[0])
    pad = (-m) % 3
    rows = [list(r) + [Fraction(0)] * pad for r in values]
    total = m + pad
    order = sorted(range(total), key=lambda g: (-rows[2][g], g))
    x = [[Fraction(0)] * total for _ in range(3)]
    third = Fraction(1, 3)
    for k in range(0, total, 3):
        items = order[k : k + 3]
        fav = favourite_pair(rows[0], rows[1], items)
        if fav is None:
            for g in items:
                for i in range(3):
                    x[i][g] = third
            continue
        a1, a2 = fav
        (b,) = [g for g in items if g not in fav]
        x[0][a1], x[2][a1] = 2 * third, third
        x[1][a2], x[2][a2] = 2 * third, third
        for i in range(3):
            x[i][b] = third
    return [r[:m] for r in x]


def random_regular_multigraph(rng, size, k):
    """Union of ``k`` random perfect matchings on ``size + size`` vertices."""
    edges = []
    for _ in range(k):
        perm = list(range(size))
        rng.shuffle(perm)
        edges.extend((a, perm[a]) for a in range(size))
    rng.shuffle(edges)
    return edges


def bivalued_values(rng, n, m, p, q):
    return [[p if rng.random() < 0.5 else q for _ in range(m)] for _ in range(n)]


def seeded(seed):
    return random.Random(seed)
