"""Explicit-state reference engine.

Enumerates states and solves with plain per-state strategy iteration.  It
shares the linear solvers and the tie rules with the symbolic engine (the
first declared action wins among equally good improvements, and the current
action is kept unless some action is strictly better) but none of the
symbolic machinery, so the two engines cross-check each other.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .numeric import QuotientMc, solve_gain_bias, solve_sparse

ZERO = Fraction(0)


class StateCapExceeded(ValueError):
    pass


@dataclass
class ExplicitMdp:
    states: list
    index: dict
    actions: tuple
    enabled: list  # per state, enabled actions in declaration order
    trans: dict  # (state index, action) -> [(state index, probability)]
    cost: dict  # (state index, action) -> signed cost
    goal: list
    source: object = None


def enumerate_mdp(mdp, costs, goal=None, cap=2 ** 20):
    """Explicit copy of ``mdp``; refuses state spaces larger than ``cap``."""
    states = []
    member = mdp.states.__contains__
    for s in mdp.domain.elements():
        if member(s):
            states.append(s)
            if len(states) > cap:
                raise StateCapExceeded(f"more than {cap} states")
    index = {s: i for i, s in enumerate(states)}
    enabled, trans, cost = [], {}, {}
    sign = 1 if costs.direction == "minimize" else -1
    for i, s in enumerate(states):
        acts = mdp.enabled_actions(s)
        enabled.append(acts)
        for a in acts:
            succ = []
            for t, p in mdp.successors(s, a):
                if t not in index:
                    raise ValueError("successor outside the state space")
                succ.append((index[t], p))
            trans[(i, a)] = succ
            cost[(i, a)] = mdp.cost(s, a) * sign
    flags = [False] * len(states)
    if goal is not None:
        for i, s in enumerate(states):
            flags[i] = s in goal
    return ExplicitMdp(states, index, mdp.actions, enabled, trans, cost, flags, mdp)


# -- reachability -----------------------------------------------------------------


def _attractor_layers(e, Y, goal):
    layers = [set(goal)]
    X = set(goal)
    while True:
        new = set()
        for s in Y - X:
            for a in e.enabled[s]:
                succ = e.trans[(s, a)]
                if all(t in Y for t, _ in succ) and any(t in X for t, _ in succ):
                    new.add(s)
                    break
        if not new:
            return layers
        X = X | new
        layers.append(X)


def explicit_proper(e):
    """Greatest fixpoint of the almost-sure reachability attractor."""
    goal = {i for i, g in enumerate(e.goal) if g}
    Y = set(range(len(e.states)))
    while True:
        X = _attractor_layers(e, Y, goal)[-1]
        if X == Y:
            return X
        Y = X


def explicit_initial_ssp(e, proper):
    goal = {i for i, g in enumerate(e.goal) if g}
    layers = _attractor_layers(e, proper, goal)
    strategy = {}
    for prev, cur in zip(layers, layers[1:]):
        for s in cur - prev:
            for a in e.enabled[s]:
                succ = e.trans[(s, a)]
                if all(t in proper for t, _ in succ) and any(t in prev for t, _ in succ):
                    strategy[s] = a
                    break
    return strategy


def explicit_initial_emp(e):
    mdp = e.source
    d = mdp.domain
    strategy = {}
    for i, s in enumerate(e.states):
        for x, alpha in mdp.states.elements:
            if d.leq(s, x) and not any(d.leq(s, a) for a in alpha):
                first = [a for a in mdp.actions if x in mdp.states_enabling(a)]
                break
        else:
            raise ValueError("state outside the state space")
        for a in first + list(e.enabled[i]):
            if a in e.enabled[i]:
                strategy[i] = a
                break
    return strategy


# -- evaluation -------------------------------------------------------------------


def chain_of(e, strategy, carrier):
    """Chain on sorted ``carrier`` plus goal states, as a ``QuotientMc``."""
    order = sorted(carrier)
    pos = {s: k for k, s in enumerate(order)}
    rows, costs, goal = [], [], []
    for s in order:
        if e.goal[s] and s not in strategy:
            rows.append({pos[s]: Fraction(1)})
            costs.append(ZERO)
            goal.append(True)
            continue
        a = strategy[s]
        row = {}
        for t, p in e.trans[(s, a)]:
            row[pos[t]] = row.get(pos[t], ZERO) + p
        rows.append(row)
        costs.append(e.cost[(s, a)])
        goal.append(False)
    return QuotientMc(rows, costs, goal, order), pos


def _ssp_values(e, strategy, proper):
    order = sorted(s for s in proper if not e.goal[s])
    pos = {s: k for k, s in enumerate(order)}
    rows, rhs = [], []
    for s in order:
        a = strategy[s]
        r = {pos[s]: Fraction(1)}
        for t, p in e.trans[(s, a)]:
            if t in pos:
                r[pos[t]] = r.get(pos[t], ZERO) - p
        rows.append(r)
        rhs.append(e.cost[(s, a)])
    sol = solve_sparse(rows, rhs)
    v = {s: ZERO for s in proper if e.goal[s]}
    v.update(zip(order, sol))
    return v


@dataclass
class ExplicitResult:
    strategy: dict
    values: dict
    iterations: int
    history: list = field(default_factory=list)  # (strategy, values) per iteration
    proper: set = None


def explicit_ssp(e, max_iterations=10 ** 6):
    proper = explicit_proper(e)
    strategy = explicit_initial_ssp(e, proper)
    safe = {s: [a for a in e.enabled[s] if all(t in proper for t, _ in e.trans[(s, a)])]
            for s in proper if not e.goal[s]}
    history = []
    if not safe:
        return ExplicitResult(strategy, _ssp_values(e, strategy, proper), 0, history, proper)
    for it in range(1, max_iterations + 1):
        v = _ssp_values(e, strategy, proper)
        history.append((dict(strategy), v))
        new = dict(strategy)
        changed = False
        for s, acts in safe.items():
            best, bv = strategy[s], v[s]
            for a in acts:
                l = e.cost[(s, a)] + sum(p * v[t] for t, p in e.trans[(s, a)])
                if l < bv:
                    best, bv = a, l
            if best != strategy[s]:
                new[s] = best
                changed = True
        if not changed:
            return ExplicitResult(strategy, v, it, history, proper)
        strategy = new
    raise RuntimeError("iteration limit")


def explicit_emp(e, max_iterations=10 ** 6):
    strategy = explicit_initial_emp(e)
    n = len(e.states)
    history = []
    for it in range(1, max_iterations + 1):
        chain, _ = chain_of(e, strategy, range(n))
        gb = solve_gain_bias(chain)
        g, b = gb.gain, gb.bias
        history.append((dict(strategy), (g, b)))
        new = dict(strategy)
        changed = False
        for s in range(n):
            best, bv = strategy[s], g[s]
            for a in e.enabled[s]:
                l = sum(p * g[t] for t, p in e.trans[(s, a)])
                if l < bv:
                    best, bv = a, l
            if best != strategy[s]:
                new[s] = best
                changed = True
        if not changed:
            for s in range(n):
                best, bv = strategy[s], g[s] + b[s]
                for a in e.enabled[s]:
                    succ = e.trans[(s, a)]
                    if sum(p * g[t] for t, p in succ) != g[s]:
                        continue
                    l = e.cost[(s, a)] + sum(p * b[t] for t, p in succ)
                    if l < bv:
                        best, bv = a, l
                if best != strategy[s]:
                    new[s] = best
                    changed = True
        if not changed:
            return ExplicitResult(strategy, (g, b), it, history, set(range(n)))
        strategy = new
    raise RuntimeError("iteration limit")


# -- audits and lumping -------------------------------------------------------------


def audit_ssp(e, values, proper):
    """True when no safe action strictly improves any proper state."""
    for s in proper:
        if e.goal[s]:
            continue
        for a in e.enabled[s]:
            succ = e.trans[(s, a)]
            if all(t in proper for t, _ in succ):
                if e.cost[(s, a)] + sum(p * values[t] for t, p in succ) < values[s]:
                    return False
    return True


def audit_emp(e, gain, bias):
    for s in range(len(e.states)):
        for a in e.enabled[s]:
            succ = e.trans[(s, a)]
            lg = sum(p * gain[t] for t, p in succ)
            if lg < gain[s]:
                return False
            if lg == gain[s] and e.cost[(s, a)] + sum(p * bias[t] for t, p in succ) < gain[s] + bias[s]:
                return False
    return True


def explicit_lump(e, strategy, carrier):
    """Coarsest lumping of the chain induced by ``strategy`` on ``carrier``.

    Goal states without an action form an absorbing class of their own.
    Uses signature refinement (iterate until the number of classes is
    stable), which shares nothing with the symbolic splitter queue.
    Returns ``{state index: class id}``.
    """
    label = {}
    for s in carrier:
        label[s] = ("goal",) if s not in strategy else ("cost", e.cost[(s, strategy[s])])
    ids = {}
    cls = {s: ids.setdefault(label[s], len(ids)) for s in sorted(carrier)}
    count = len(ids)
    while True:
        ids = {}
        nxt = {}
        for s in sorted(carrier):
            sig = {}
            if s in strategy:
                for t, p in e.trans[(s, strategy[s])]:
                    sig[cls[t]] = sig.get(cls[t], ZERO) + p
            key = (cls[s], tuple(sorted(sig.items())))
            nxt[s] = ids.setdefault(key, len(ids))
        cls = nxt
        if len(ids) == count:
            return cls
        count = len(ids)
