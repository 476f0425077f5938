import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmech.exceptions import ScaleLimitError
from fairmech.fairness import check_ef_uv
from fairmech.harness import ef1_unrealizable_instance
from fairmech.model import FractionalAllocation, Instance, IntegralAllocation
from fairmech.realize import decompose_or_refute, ef_support, enumerate_allocations, search_uv

from oracles import ef_uv_exhaustive, rand_instance, seeded

F = Fraction


def test_enumerate_counts_and_order():
    allocs = enumerate_allocations(2, 3)
    assert len(allocs) == 8
    assert allocs[0].bundles == ((0, 1, 2), ())
    assert allocs[-1].bundles == ((), (0, 1, 2))


def test_enumeration_budget():
    with pytest.raises(ScaleLimitError):
        enumerate_allocations(3, 10, budget=1000)


def test_ef_support_matches_exhaustive():
    inst = ef1_unrealizable_instance()
    support = ef_support(inst, 0, 1)
    expected = [a for a in enumerate_allocations(3, 4) if ef_uv_exhaustive(inst.values, a.bundles, 0, 1)]
    assert support == expected


def test_equal_division_is_not_an_ef1_lottery():
    inst = ef1_unrealizable_instance()
    x = FractionalAllocation.equal_division(3, 4)
    start = time.perf_counter()
    support = ef_support(inst, 0, 1)
    result = decompose_or_refute(x, support)
    assert not result.feasible
    assert result.certificate.verify(x, support)
    relaxed = decompose_or_refute(x, ef_support(inst, 1, 1))
    assert relaxed.feasible
    assert relaxed.lottery.marginals(4) == x
    for alloc in relaxed.lottery.support:
        assert check_ef_uv(inst, alloc, 1, 1)
    assert time.perf_counter() - start < 5


def test_search_uv_on_unrealizable_instance():
    inst = ef1_unrealizable_instance()
    pair, result = search_uv(inst, FractionalAllocation.equal_division(3, 4))
    assert pair in {(1, 1), (0, 2), (2, 0)}
    assert result.feasible


def test_empty_support_certificate():
    x = FractionalAllocation.equal_division(2, 1)
    only = [IntegralAllocation(((0,), ()))]
    result = decompose_or_refute(x, only)
    assert not result.feasible
    assert result.certificate.verify(x, only)


def test_point_mass_decomposes():
    a = IntegralAllocation(((0,), (1,)))
    result = decompose_or_refute(a.as_fractional(2), [a, IntegralAllocation(((1,), (0,)))])
    assert result.feasible
    assert result.lottery.entries == ((F(1), a),)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_decompose_or_refute_is_always_certified(seed):
    rng = seeded(seed)
    n, m = 2, rng.randint(1, 4)
    inst = Instance.from_values(rand_instance(rng, n, m, hi=5))
    shares = []
    for _ in range(m):
        a = F(rng.randint(0, 4), 4)
        shares.append((a, 1 - a))
    x = FractionalAllocation(tuple(tuple(s[i] for s in shares) for i in range(n)))
    support = ef_support(inst, 0, rng.randint(0, 1))
    result = decompose_or_refute(x, support)
    if result.feasible:
        assert result.lottery.marginals(m) == x
        assert set(result.lottery.support) <= set(support)
        assert len(result.lottery.entries) <= n * m + 1
    else:
        assert result.certificate.verify(x, support)
