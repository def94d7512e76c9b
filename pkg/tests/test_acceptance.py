"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

The lines are also gathered into a terminal summary section by conftest.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from pamdp.lattice import (BitsetDomain, GridDomain, PseudoAntichain, pa_difference, pa_intersect, pa_member,
                           pa_union, pe_canonicalize, pe_subset)
from pamdp.mdp import CostModel
from pamdp.numeric import QuotientMc, gain_bias_residual, solve_gain_bias, solve_ssp
from pamdp.oracle import audit_emp, enumerate_mdp, explicit_emp, explicit_lump, explicit_proper, explicit_ssp
from pamdp.solver import solve_emp_symblicit, solve_ssp_symblicit
from pamdp.strips import EmptyStateSpaceError, gen_monkey, gen_random, mss_to_mdp

FAMILY_SIZE = 200
PER_INSTANCE_SECONDS = 5.0


@contextmanager
def criterion(n, title):
    info = {"detail": ""}
    try:
        yield info
    except BaseException as exc:
        line = f"criterion {n} FAIL: {title} ({type(exc).__name__}: {exc})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"criterion {n} PASS: {title} ({info['detail']})"
    ACCEPTANCE_LINES.append(line)
    print(line)


# -- shared families ------------------------------------------------------------


@pytest.fixture(scope="module")
def ssp_family():
    """200 random instances with at least one proper non-goal state."""
    runs, seed, skipped = [], 0, 0
    while len(runs) < FAMILY_SIZE:
        mss = gen_random(seed, with_goal=True)
        seed += 1
        mdp, goal = mss_to_mdp(mss)
        costs = CostModel(mdp)
        e = enumerate_mdp(mdp, costs, goal)
        proper = explicit_proper(e)
        if all(e.goal[i] for i in proper):
            skipped += 1
            continue
        t0 = time.perf_counter()
        rep = solve_ssp_symblicit(mdp, costs, goal)
        secs = time.perf_counter() - t0
        runs.append((mdp, goal, e, rep, explicit_ssp(e), secs))
    return runs


@pytest.fixture(scope="module")
def emp_family():
    runs, seed = [], 0
    while len(runs) < FAMILY_SIZE:
        mss = gen_random(seed, with_goal=False)
        seed += 1
        try:
            mdp, _ = mss_to_mdp(mss, keep_goal=False)
        except EmptyStateSpaceError:
            continue
        costs = CostModel(mdp)
        e = enumerate_mdp(mdp, costs)
        t0 = time.perf_counter()
        rep = solve_emp_symblicit(mdp, costs)
        secs = time.perf_counter() - t0
        runs.append((mdp, None, e, rep, explicit_emp(e), secs))
    return runs


# -- 1, 2: pseudo-antichain algebra ---------------------------------------------------


def _random_pa(rng, d, pts):
    pes = []
    for _ in range(rng.randint(0, 3)):
        pes.append((rng.choice(pts), tuple(rng.choice(pts) for _ in range(rng.randint(0, 3)))))
    return PseudoAntichain(d, pes)


def test_algebra_matches_brute_force():
    with criterion(1, "pseudo-antichain operations equal brute-force sets") as info:
        rng = random.Random(20240607)
        domains = [GridDomain(2, 5)] + [BitsetDomain(n) for n in range(1, 9)]
        elems = {d: list(d.elements()) for d in domains}
        t0 = time.perf_counter()
        cases = 0
        for k in range(10_000):
            d = domains[0] if k % 2 == 0 else rng.choice(domains[1:])
            pts = elems[d]
            A, B = _random_pa(rng, d, pts), _random_pa(rng, d, pts)
            a = {s for s in pts if pa_member(s, A)}
            b = {s for s in pts if pa_member(s, B)}
            s = rng.choice(pts)
            assert ({t for t in pts if pa_member(t, pa_union(A, B))} == a | b)
            assert ({t for t in pts if pa_member(t, pa_intersect(A, B))} == a & b)
            assert ({t for t in pts if pa_member(t, pa_difference(A, B))} == a - b)
            assert pa_member(s, A) == (s in a)
            p = pe_canonicalize(d, rng.choice(pts), (rng.choice(pts),))
            q = pe_canonicalize(d, rng.choice(pts), tuple(rng.choice(pts) for _ in range(rng.randint(0, 2))))
            if p is not None and q is not None:
                sp = {t for t in pts if pa_member(t, PseudoAntichain(d, [p]))}
                sq = {t for t in pts if pa_member(t, PseudoAntichain(d, [q]))}
                assert pe_subset(d, p, q) == (sp <= sq)
            cases += 1
        secs = time.perf_counter() - t0
        assert secs < 60, f"{secs:.1f}s"
        info["detail"] = f"{cases} cases in {secs:.1f}s"


def test_pseudo_closure_example():
    with criterion(2, "pseudo-closure of ((3,2), {(2,1),(0,2)})") as info:
        d = GridDomain(2, 5)
        A = PseudoAntichain(d, [((3, 2), ((2, 1), (0, 2)))])
        got = set(A.states())
        assert got == {(3, 2), (3, 1), (3, 0), (2, 2), (1, 2)}, got
        info["detail"] = f"{sorted(got)}"


# -- 3, 4: engines agree ----------------------------------------------------------------


def test_ssp_engines_agree(ssp_family):
    with criterion(3, "expected cost: symblicit equals explicit on random instances") as info:
        worst = 0
        for mdp, goal, e, rep, x, secs in ssp_family:
            sym_proper = {e.index[s] for s in e.states if s in rep.proper}
            assert sym_proper == x.proper
            for i in x.proper:
                assert rep.value_of(e.states[i]) == x.values[i]
            assert rep.iterations == x.iterations
            assert secs < PER_INSTANCE_SECONDS, f"{secs:.2f}s"
            worst = max(worst, secs)
        info["detail"] = f"{len(ssp_family)} instances, slowest {worst:.2f}s"


def test_emp_engines_agree(emp_family):
    with criterion(4, "mean payoff: gains equal and no improving action remains") as info:
        worst = 0
        for mdp, _, e, rep, x, secs in emp_family:
            g, _ = x.values
            lifted = [rep.value_of(s) for s in e.states]
            assert [v[0] for v in lifted] == g
            assert audit_emp(e, [v[0] for v in lifted], [v[1] for v in lifted])
            assert secs < PER_INSTANCE_SECONDS, f"{secs:.2f}s"
            worst = max(worst, secs)
        info["detail"] = f"{len(emp_family)} instances, slowest {worst:.2f}s"


# -- 5: lumping ------------------------------------------------------------------------


def _check_lumping(rng, mdp, goal, e, rep):
    carrier = [i for i, s in enumerate(e.states) if s in rep.proper] if goal is not None else range(len(e.states))
    pairs = 0
    hist = [h for h in rep.history if h.strategy is not None]
    for h in hist:
        lam = {}
        for i in carrier:
            a = h.strategy.locate(e.states[i])
            if a is not None:
                lam[i] = h.strategy.blocks[a][1]
        classes = explicit_lump(e, lam, carrier)
        assert len(set(classes.values())) == h.quotient_size
    if not hist:
        return 0
    for _ in range(100):
        h = rng.choice(hist)
        blocks = {}
        for i in carrier:
            blocks.setdefault(h.quotient.locate(e.states[i]), []).append(i)
        groups = [g for g in blocks.values() if len(g) > 1]
        if not groups:
            continue
        grp = rng.choice(groups)
        s, t = rng.choice(grp), rng.choice(grp)
        sig = []
        for u in (s, t):
            if e.goal[u] and h.strategy.locate(e.states[u]) is None:
                sig.append("goal")
                continue
            a = h.strategy.lookup(e.states[u])
            probs = {}
            for v, p in e.trans[(u, a)]:
                k = h.quotient.locate(e.states[v])
                probs[k] = probs.get(k, 0) + p
            sig.append((e.cost[(u, a)], probs))
        assert sig[0] == sig[1]
        pairs += 1
    return pairs


def test_lumping_matches_oracle(ssp_family, emp_family):
    with criterion(5, "symbolic lumping equals explicit lumping, blocks are bisimilar") as info:
        rng = random.Random(5)
        pairs = iters = 0
        for mdp, goal, e, rep, _, _ in ssp_family + emp_family:
            pairs += _check_lumping(rng, mdp, goal, e, rep)
            iters += len(rep.history)
        info["detail"] = f"{iters} iterations, {pairs} sampled pairs"


# -- 6: monotone improvement -----------------------------------------------------------


def test_values_decrease(ssp_family):
    with criterion(6, "expected costs never increase and strictly drop in non-final iterations") as info:
        checked = 0
        for mdp, goal, e, rep, _, _ in ssp_family:
            states = [s for s in e.states if s in rep.proper]
            seq = [[h.quotient.lookup(s) for s in states] for h in rep.history]
            for before, after in zip(seq, seq[1:]):
                assert all(b <= a for a, b in zip(before, after))
                assert any(b < a for a, b in zip(before, after))
                checked += 1
        info["detail"] = f"{checked} iteration steps"


# -- 7: scale ----------------------------------------------------------------------------


def test_monkey_scale(monkeypatch):
    with criterion(7, "monkey instances: sizes, quotient bounds and large symbolic solve") as info:
        mdp, goal = mss_to_mdp(gen_monkey(1, 2))
        costs = CostModel(mdp)
        assert len(enumerate_mdp(mdp, costs, goal).states) == 256
        small = solve_ssp_symblicit(mdp, costs, goal)
        assert small.max_quotient <= 64

        mdp14, goal14 = mss_to_mdp(gen_monkey(1, 4))
        e14 = enumerate_mdp(mdp14, CostModel(mdp14), goal14)
        assert len(e14.states) == 4096
        ref = explicit_ssp(e14).values[e14.index[mdp14.initial]]

        big, big_goal = mss_to_mdp(gen_monkey(3, 4))
        assert big.domain.n == 20 and big.states == PseudoAntichain.full(big.domain)

        def refuse(self):
            raise AssertionError("state enumeration during the symbolic solve")

        monkeypatch.setattr(BitsetDomain, "elements", refuse)
        t0 = time.perf_counter()
        rep = solve_ssp_symblicit(big, CostModel(big), big_goal, keep_history=False)
        secs = time.perf_counter() - t0
        monkeypatch.undo()
        assert secs < 600, f"{secs:.0f}s"
        assert rep.max_quotient <= 1024
        value = rep.value_of(big.initial)
        assert value == ref, (value, ref)
        info["detail"] = (f"(1,2): 256 states, quotient {small.max_quotient}; (3,4): 2^20 states, "
                          f"quotient {rep.max_quotient}, {secs:.1f}s, value {value} = oracle on (1,4)")


# -- 8, 9: exact numerics ----------------------------------------------------------------


def test_zero_residuals(ssp_family, emp_family):
    with criterion(8, "every linear solve has an exactly zero residual") as info:
        solves = 0
        for *_, rep, _, _ in ssp_family + emp_family:
            for h in rep.history:
                assert h.residual == 0
                solves += 1
        for _, _, _, rep, x, _ in emp_family[:50]:
            # The stationary average of the bias vanishes on each recurrent class.
            for h in rep.history:
                gb = h.solution
                for cls, pi in zip(gb.classes, gb.stationary):
                    assert sum(p * gb.bias[s] for p, s in zip(pi, cls)) == 0
        info["detail"] = f"{solves} quotient solves"


def test_hand_gain_bias():
    with criterion(9, "hand-computed gain and bias") as info:
        q = QuotientMc([{1: Fraction(1)}, {0: Fraction(1)}], [Fraction(0), Fraction(2)])
        gb = solve_gain_bias(q)
        assert gb.gain == [1, 1] and gb.bias == [Fraction(-1, 2), Fraction(1, 2)]
        c = Fraction(13, 7)
        gb2 = solve_gain_bias(QuotientMc([{0: Fraction(1)}], [c]))
        assert (gb2.gain, gb2.bias) == ([c], [0])
        assert gain_bias_residual(q, gb) == 0
        loop = QuotientMc([{0: Fraction(4, 5), 1: Fraction(1, 5)}, {1: Fraction(1)}], [Fraction(1), Fraction(0)],
                          [False, True])
        assert solve_ssp(loop) == [5, 0]
        info["detail"] = "g=(1,1), b=(-1/2,1/2); absorbing (c,0)"
