from fractions import Fraction

import pytest

from fairmech.exceptions import MalformedInputError
from fairmech.harness import (
    ALIASES,
    MisreportFamily,
    fractional_rule_for,
    instance_library,
    picking_exchange_instance,
    replay_chain,
    resolve_instance,
    test_truthfulness as run_truthfulness,
    tie_breaking_instance,
    tri_valued_chain,
)
from fairmech.model import FractionalAllocation, Instance
from fairmech.mech2 import TwoAgentMechanism

from oracles import rand_instance, seeded

F = Fraction
LEVELS = (F(0), F(1), F(2), F(3))


def test_family_sizes_match_generation():
    inst = Instance.from_values([[1, 2, 2], [0, 1, 3]])
    for fam in (
        MisreportFamily("value-permutations"),
        MisreportFamily("level-patterns", levels=(0, 1)),
        MisreportFamily("scalar-rescalings"),
        MisreportFamily("explicit", reports=((1, 1, 1), (0, 0, 5))),
    ):
        assert fam.size(inst, 0) == len(list(fam.generate(inst, 0)))
    swaps = list(MisreportFamily("pairwise-swaps").generate(inst, 0))
    assert swaps == [(2, 1, 2), (2, 2, 1)]


def test_family_validation():
    with pytest.raises(MalformedInputError):
        MisreportFamily("everything")
    fam = MisreportFamily("explicit", reports=((1, -1, 0),))
    with pytest.raises(MalformedInputError):
        list(fam.generate(Instance.from_values([[1, 1, 1]]), 0))


def test_index_tie_breaking_is_manipulable():
    inst = tie_breaking_instance()
    family = MisreportFamily("level-patterns", levels=LEVELS)
    bad = run_truthfulness("three-index", inst, family, agents=[0, 1])
    assert bad.max_gain > 0
    assert bad.agents[0].max_gain == F(1, 3)
    good = run_truthfulness("three", inst, family, agents=[0, 1])
    assert good.max_gain == 0
    assert good.complete


def test_budget_marks_partial_coverage():
    inst = tie_breaking_instance()
    report = run_truthfulness("three", inst, MisreportFamily("level-patterns", levels=LEVELS, budget=5))
    assert not report.complete
    assert "partial" in report.coverage()
    assert all(a.evaluated == 5 for a in report.agents)


def test_bivalued_rule_skips_invalid_reports():
    inst = Instance.from_values([[2, 2, 1], [1, 2, 1]])
    report = run_truthfulness("bivalued", inst, MisreportFamily("level-patterns", levels=(1, 2, 3)), p=2, q=1)
    assert report.max_gain == 0
    assert all(a.skipped > 0 for a in report.agents)


def test_mechanism_ids():
    for name in ("two", "three", "three-index", "n_ef", "prop1_mms", "mnw-baseline"):
        assert callable(fractional_rule_for(name))
    with pytest.raises(MalformedInputError):
        fractional_rule_for("bivalued")
    with pytest.raises(MalformedInputError):
        fractional_rule_for("nope")
    est = TwoAgentMechanism()
    assert fractional_rule_for(est) == est.fractional_rule


def test_library_contents():
    lib = instance_library()
    assert set(lib) == {
        "THM6",
        "MNW_BIVALUED",
        "APPENDIX_C",
        "APPENDIX_A",
        *(f"THM9_CHAIN_{k}" for k in range(1, 6)),
    }
    for alias, key in ALIASES.items():
        assert resolve_instance(alias) == lib[key]
    assert resolve_instance("THM9_CHAIN") == lib["THM9_CHAIN_1"]
    assert resolve_instance("missing") is None


def test_chain_values():
    chain = tri_valued_chain(1, 1)
    assert len(chain) == 5
    for inst in chain:
        assert inst.m == 400
        assert set(v for row in inst.values for v in row) <= {F(0), F(1, 50), F(1)}
    first = chain[1]
    assert first.values[0][0] == 1 and first.values[0][-1] == F(1, 50)
    with pytest.raises(MalformedInputError):
        tri_valued_chain(0, 1, m=3)


def test_picking_exchange_blocks():
    inst = picking_exchange_instance()
    assert inst.m == 8
    assert inst.values[0][:3] == (F(11, 10), 1, 1)
    assert inst.values[1][3:6] == (F(11, 10), 1, 1)
    assert inst.values[0][6:] == (F(1, 100000),) * 2


def pareto_by_lp(inst, x):
    from fairmech.fairness import check_pareto_fractional

    return check_pareto_fractional(inst, x).optimal


def test_replay_chain_equal_division():
    # equal division is truthful and inside the band but wastes M2 items
    replay = replay_chain("two", 1, 1, m=8)
    assert [s.m1_counts for s in replay.steps] == [(2, 2)] * 5
    assert not replay.consistent
    assert all("Pareto" in msg for msg in replay.violations)
    assert {msg.split(":")[0] for msg in replay.violations} == {f"step {k}" for k in range(2, 6)}
    assert pareto_by_lp(replay.steps[0].instance, replay.steps[0].fractional)
    assert not pareto_by_lp(replay.steps[1].instance, replay.steps[1].fractional)


def test_replay_chain_flags_band_and_lies():
    def greedy(inst):
        # all of M1 to agent 1; M2 to whoever values it more, agent 2 on ties
        half = inst.m // 2
        row0 = [F(1)] * half + [F(1) if inst.values[0][g] > inst.values[1][g] else F(0) for g in range(half, inst.m)]
        return FractionalAllocation.from_shares([row0, [1 - x for x in row0]])

    replay = replay_chain(greedy, 0, 1, m=8)
    assert any(msg.startswith("step 1: agent 2 holds 0") for msg in replay.violations)
    assert not any("gains" in msg for msg in replay.violations)


def test_two_agent_trade_matches_lp():
    from fairmech.harness import _two_agent_trade

    rng = seeded(77)
    for _ in range(60):
        m = rng.randint(1, 4)
        inst = Instance.from_values(rand_instance(rng, 2, m, hi=3))
        shares = [[F(rng.randint(0, 2), 2) for _ in range(m)]]
        shares.append([1 - x for x in shares[0]])
        x = FractionalAllocation.from_shares(shares)
        assert (_two_agent_trade(inst, x) is None) == pareto_by_lp(inst, x)
