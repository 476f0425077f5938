import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmech.exceptions import ScaleLimitError
from fairmech.fairness import (
    check_alpha_mms,
    check_ef1,
    check_ef_uv,
    check_pareto_fractional,
    check_pareto_integral,
    check_prop1,
    check_regular,
    envy_witness,
    mms_value,
)
from fairmech.harness import ef1_unrealizable_instance, tri_valued_chain
from fairmech.model import FractionalAllocation, Instance, IntegralAllocation

from oracles import ef_uv_exhaustive, mms_exhaustive, prop1_definition, rand_instance, seeded

F = Fraction


def test_envy_witness_greedy_choice():
    row = [F(5), F(4), F(3), F(1)]
    w = envy_witness(row, (3,), (0, 1, 2), 1, 1, range(4))
    # add the best outside item (0), drop the best of the other bundle (0): 1 + 5 < 12 - 5
    assert w.added == (0,)
    assert w.removed == (0,)
    assert not w.satisfied
    assert w.deficit == 1
    assert envy_witness(row, (3,), (0, 1, 2), 2, 1, range(4)).satisfied


def test_ef1_and_violation_witness():
    inst = Instance.from_values([[3, 3, 3], [1, 1, 1]])
    bad = IntegralAllocation(((), (0, 1, 2)))
    report = check_ef1(inst, bad)
    assert not report
    (pair,) = report.violations
    assert (pair.agent, pair.other) == (0, 1)
    assert pair.deficit == 6
    good = IntegralAllocation(((0,), (1, 2)))
    assert check_ef1(inst, good)


def test_ef_zero_zero_is_envy_freeness():
    inst = Instance.from_values([[2, 1], [1, 2]])
    assert check_ef_uv(inst, IntegralAllocation(((0,), (1,))), 0, 0)
    assert not check_ef_uv(inst, IntegralAllocation(((1,), (0,))), 0, 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2), st.integers(0, 2))
def test_greedy_matches_exhaustive(seed, u, v):
    rng = seeded(seed)
    n, m = rng.randint(2, 3), rng.randint(1, 5)
    values = rand_instance(rng, n, m, hi=6)
    owners = [rng.randrange(n) for _ in range(m)]
    alloc = IntegralAllocation.from_owners(owners, n)
    assert bool(check_ef_uv(Instance.from_values(values), alloc, u, v)) == ef_uv_exhaustive(
        values, alloc.bundles, u, v
    )


def test_mms_known_values():
    assert mms_value([F(3), F(3), F(2), F(2), F(2)], 2) == 6
    assert mms_value([F(1)] * 5, 2) == 2
    assert mms_value([F(7)], 3) == 0
    assert mms_value([], 2) == 0


def test_mms_scale_guard():
    with pytest.raises(ScaleLimitError):
        mms_value([F(1)] * 15, 2)
    with pytest.raises(ScaleLimitError):
        mms_value([F(1)] * 3, 6)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_mms_matches_exhaustive(seed):
    rng = seeded(seed)
    n, m = rng.randint(2, 3), rng.randint(1, 7)
    row = rand_instance(rng, 1, m, hi=9)[0]
    assert mms_value(row, n) == mms_exhaustive(row, n)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_prop1_matches_definition(seed):
    rng = seeded(seed)
    n, m = rng.randint(2, 3), rng.randint(1, 6)
    values = rand_instance(rng, n, m)
    alloc = IntegralAllocation.from_owners([rng.randrange(n) for _ in range(m)], n)
    assert check_prop1(Instance.from_values(values), alloc) == prop1_definition(values, alloc.bundles)


def test_alpha_mms():
    inst = Instance.from_values([[1, 1, 1, 1], [1, 1, 1, 1]])
    assert check_alpha_mms(inst, IntegralAllocation(((0, 1), (2, 3))), 1)
    assert not check_alpha_mms(inst, IntegralAllocation(((0,), (1, 2, 3))), 1)
    assert check_alpha_mms(inst, IntegralAllocation(((0,), (1, 2, 3))), F(1, 2))


def test_pareto_integral_finds_domination():
    inst = Instance.from_values([[2, 1], [1, 2]])
    ok, witness = check_pareto_integral(inst, IntegralAllocation(((1,), (0,))))
    assert not ok
    assert witness == IntegralAllocation(((0,), (1,)))
    assert check_pareto_integral(inst, IntegralAllocation(((0,), (1,)))) == (True, None)


def test_equal_division_is_not_fractionally_pareto_optimal():
    inst = ef1_unrealizable_instance()
    report = check_pareto_fractional(inst, FractionalAllocation.equal_division(3, 4))
    assert not report.optimal
    assert report.gain > 0
    for i in range(3):
        assert report.improvement.utility(inst, i) >= F(inst.total(i), 3)


def test_chain_instance_pareto_fragment():
    # small version of the last chain instance: agent 1 values M2 highly, agent 2 M1
    inst = tri_valued_chain(0, 1, m=4)[4]
    welfare = IntegralAllocation(((2, 3), (0, 1)))
    assert check_pareto_fractional(inst, welfare.as_fractional(4)).optimal
    assert not check_pareto_fractional(inst, FractionalAllocation.equal_division(2, 4)).optimal


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_pareto_fractional_against_integral_domination(seed):
    rng = seeded(seed)
    n, m = 2, rng.randint(1, 4)
    values = rand_instance(rng, n, m, hi=5, zeros=False)
    inst = Instance.from_values(values)
    alloc = IntegralAllocation.from_owners([rng.randrange(n) for _ in range(m)], n)
    ok, _ = check_pareto_integral(inst, alloc)
    report = check_pareto_fractional(inst, alloc.as_fractional(m))
    if not ok:
        # integral domination is also fractional domination
        assert not report.optimal
    if not report.optimal:
        for i in range(n):
            assert report.improvement.utility(inst, i) >= alloc.as_fractional(m).utility(inst, i)


def test_unique_welfare_maximiser_is_pareto_optimal():
    inst = Instance.from_values([[5, 1, 2], [1, 4, 3]])
    alloc = IntegralAllocation(((0,), (1, 2)))
    assert check_pareto_fractional(inst, alloc.as_fractional(3)).optimal


def test_check_regular():
    alloc = IntegralAllocation(((0, 2), (1, 3)))
    assert check_regular(alloc, [[0, 1], [2, 3]])
    assert not check_regular(alloc, [[0, 2], [1, 3]])


def test_ef1_exhaustive_on_all_allocations_of_small_instance():
    values = [[F(2), F(1), F(4), F(4)], [F(1), F(2), F(4), F(4)], [F(4), F(4), F(2), F(1)]]
    inst = Instance.from_values(values)
    for owners in itertools.product(range(3), repeat=4):
        alloc = IntegralAllocation.from_owners(owners, 3)
        assert bool(check_ef1(inst, alloc)) == ef_uv_exhaustive(values, alloc.bundles, 0, 1)
