import pytest

from pamdp.mdp import CostModel
from pamdp.oracle import (StateCapExceeded, audit_emp, audit_ssp, enumerate_mdp, explicit_emp, explicit_lump,
                          explicit_ssp)
from pamdp.strips import gen_monkey, gen_random, mss_to_mdp


def test_cap_refusal():
    mdp, goal = mss_to_mdp(gen_monkey(1, 2))
    with pytest.raises(StateCapExceeded):
        enumerate_mdp(mdp, CostModel(mdp), goal, cap=100)


def test_enumeration_shape():
    mdp, goal = mss_to_mdp(gen_monkey(1, 2))
    e = enumerate_mdp(mdp, CostModel(mdp), goal)
    assert len(e.states) == 256
    assert sum(e.goal) == 128
    i = e.index[0]
    assert e.enabled[i][:2] == ["takebox", "takestone"]
    assert "takebananaswithbox" not in e.enabled[i]
    assert all(sum(p for _, p in succ) == 1 for succ in e.trans.values())


def test_audits_reject_suboptimal_values():
    mdp, goal = mss_to_mdp(gen_monkey(1, 2))
    e = enumerate_mdp(mdp, CostModel(mdp), goal)
    x = explicit_ssp(e)
    assert audit_ssp(e, x.values, x.proper)
    worse = dict(x.values)
    worse[e.index[mdp.initial]] += 1
    assert not audit_ssp(e, worse, x.proper)


def test_mean_payoff_audit():
    mdp, _ = mss_to_mdp(gen_random(3, with_goal=False), keep_goal=False)
    e = enumerate_mdp(mdp, CostModel(mdp))
    x = explicit_emp(e)
    g, b = x.values
    assert audit_emp(e, g, b)
    bumped = ([v + 1 if i == k else v for i, v in enumerate(g)] for k in range(len(g)))
    assert any(not audit_emp(e, h, b) for h in bumped)


def test_explicit_lump_on_symmetric_chain():
    mdp, goal = mss_to_mdp(gen_monkey(1, 2))
    e = enumerate_mdp(mdp, CostModel(mdp), goal)
    # Playing the box attempt everywhere it is enabled, takebox elsewhere.
    lam = {}
    for i, s in enumerate(e.states):
        if not e.goal[i]:
            lam[i] = "takebananaswithbox" if "takebananaswithbox" in e.enabled[i] else "takebox"
    classes = explicit_lump(e, lam, range(len(e.states)))
    # goal, holding the box, and not holding it.
    assert len(set(classes.values())) == 3
