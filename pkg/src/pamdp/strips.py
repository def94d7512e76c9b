"""Monotonic stochastic STRIPS: model, text format, conversion and generators."""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import BitsetDomain, PseudoAntichain, pa_intersect
from .mdp import MonotonicMdp, pre_union


class MssParseError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MssValidationError(ValueError):
    pass


class EmptyStateSpaceError(ValueError):
    """Every state is blocking once dead ends are pruned."""


@dataclass(frozen=True)
class Effect:
    prob: Fraction
    add: frozenset = frozenset()
    delete: frozenset = frozenset()


@dataclass(frozen=True)
class Operator:
    name: str
    guard: frozenset
    effects: tuple
    cost: Fraction = Fraction(1)
    guard_false: frozenset = frozenset()


@dataclass
class Mss:
    """Stochastic STRIPS instance.

    ``goal`` is a set of conditions that must hold, or None for models used
    with the mean-payoff objective.  Operators of a monotonic instance have
    empty ``guard_false``; :func:`monotonize` produces such instances.
    """

    conditions: tuple
    init: frozenset
    goal: frozenset = None
    operators: list = field(default_factory=list)
    goal_false: frozenset = frozenset()

    def validate(self):
        names = set(self.conditions)
        if len(names) != len(self.conditions):
            raise MssValidationError("duplicate condition")
        if not self.operators:
            raise MssValidationError("no operator")
        seen = set()
        for op in self.operators:
            if op.name in seen:
                raise MssValidationError(f"duplicate operator {op.name!r}")
            seen.add(op.name)
            if op.guard_false:
                raise MssValidationError(f"operator {op.name!r} has a negative guard; monotonize first")
            if not op.effects:
                raise MssValidationError(f"operator {op.name!r} has no effect")
            used = set(op.guard)
            for e in op.effects:
                if e.prob < 0:
                    raise MssValidationError(f"operator {op.name!r}: negative probability")
                used |= e.add | e.delete
            total = sum(e.prob for e in op.effects)
            if total != 1:
                raise MssValidationError(f"operator {op.name!r}: probabilities sum to {total}")
            unknown = used - names
            if unknown:
                raise MssValidationError(f"operator {op.name!r}: unknown conditions {sorted(unknown)}")
        for label, s in (("init", self.init), ("goal", self.goal or frozenset())):
            if not s <= names:
                raise MssValidationError(f"{label}: unknown conditions {sorted(s - names)}")
        if self.goal_false:
            raise MssValidationError("negative goal; monotonize first")
        return self


# -- text format -----------------------------------------------------------


def _fraction(text, line):
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise MssParseError(line, f"bad number {text!r}") from None
    return f


def _effect_sets(rest, line):
    add, delete, cur = [], [], None
    for tok in rest:
        if tok == "add:":
            cur = add
        elif tok == "del:":
            cur = delete
        elif cur is None:
            raise MssParseError(line, f"expected 'add:' or 'del:' before {tok!r}")
        else:
            cur.append(tok)
    return frozenset(add), frozenset(delete)


def parse_mss(text):
    """Parse the line-oriented MSS format; errors carry line numbers."""
    conditions = init = goal = None
    ops = []
    cur = None

    def close():
        if cur is not None:
            ops.append(Operator(cur["name"], cur["guard"], tuple(cur["effects"]), cur["cost"]))

    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head == "conditions:":
            conditions = tuple(toks[1:])
        elif head == "init:":
            init = frozenset(toks[1:])
        elif head == "goal:":
            goal = frozenset(toks[1:])
        elif head == "operator":
            close()
            if len(toks) != 4 or toks[2] != "cost":
                raise MssParseError(no, "expected 'operator <name> cost <num>'")
            cur = {"name": toks[1], "guard": frozenset(), "effects": [], "cost": _fraction(toks[3], no)}
        elif head == "guard:":
            if cur is None:
                raise MssParseError(no, "guard outside operator")
            cur["guard"] = frozenset(toks[1:])
        elif head == "effect":
            if cur is None:
                raise MssParseError(no, "effect outside operator")
            if len(toks) < 2:
                raise MssParseError(no, "effect needs a probability")
            add, delete = _effect_sets(toks[2:], no)
            cur["effects"].append(Effect(_fraction(toks[1], no), add, delete))
        else:
            raise MssParseError(no, f"unexpected {head!r}")
    close()
    if conditions is None:
        raise MssParseError(0, "missing 'conditions:'")
    mss = Mss(conditions, init or frozenset(), goal, ops)
    try:
        mss.validate()
    except MssValidationError as e:
        raise MssParseError(0, str(e)) from None
    return mss


def format_mss(mss):
    def frac(f):
        return f"{f.numerator}/{f.denominator}"

    out = [f"conditions: {' '.join(mss.conditions)}".rstrip(), f"init: {' '.join(sorted(mss.init))}".rstrip()]
    if mss.goal is not None:
        out.append(f"goal: {' '.join(sorted(mss.goal))}".rstrip())
    for op in mss.operators:
        out.append(f"operator {op.name} cost {frac(op.cost)}")
        out.append(f"  guard: {' '.join(sorted(op.guard))}".rstrip())
        for e in op.effects:
            out.append(f"  effect {frac(e.prob)} add: {' '.join(sorted(e.add))} del: {' '.join(sorted(e.delete))}")
    return "\n".join(out) + "\n"


# -- monotonization ----------------------------------------------------------


def negated(name):
    return f"not_{name}"


def monotonize(strips):
    """Rewrite negative guards and goals with fresh complement conditions.

    Every condition ``p`` gets a counterpart ``not_p`` that is kept equal to
    the complement of ``p``, so the result has no negative guard or goal.
    """
    neg = list(strips.conditions)
    bar = {p: negated(p) for p in neg}
    clash = set(bar.values()) & set(strips.conditions)
    if clash:
        raise MssValidationError(f"fresh names already used: {sorted(clash)}")
    conditions = tuple(strips.conditions) + tuple(bar[p] for p in neg)
    init = frozenset(strips.init) | {bar[p] for p in neg if p not in strips.init}
    goal = None
    if strips.goal is not None:
        goal = frozenset(strips.goal) | {bar[p] for p in strips.goal_false}

    def lift(s):
        return frozenset(bar[p] for p in s if p in bar)

    ops = []
    for op in strips.operators:
        effects = tuple(Effect(e.prob, e.add | lift(e.delete), e.delete | lift(e.add)) for e in op.effects)
        ops.append(Operator(op.name, op.guard | lift(op.guard_false), effects, op.cost))
    return Mss(conditions, init, goal, ops)


# -- MDP view ----------------------------------------------------------------


class StripsMdp(MonotonicMdp):
    """Monotonic MDP of an MSS over bitmask states ordered by ``⊇``."""

    def __init__(self, mss):
        mss.validate()
        d = BitsetDomain(len(mss.conditions), mss.conditions)
        taus = []
        index = {}
        self.guard = {}
        self.op_cost = {}
        self.op_dist = {}
        for op in mss.operators:
            self.guard[op.name] = d.mask(op.guard)
            self.op_cost[op.name] = Fraction(op.cost)
            dist = {}
            for e in op.effects:
                key = (d.mask(e.add), d.mask(e.delete))
                if key not in index:
                    index[key] = len(taus)
                    taus.append(key)
                tau = index[key]
                dist[tau] = dist.get(tau, Fraction(0)) + Fraction(e.prob)
            self.op_dist[op.name] = dist
        self.effects = taus
        super().__init__(d, [op.name for op in mss.operators], range(len(taus)))
        self.mss = mss
        self.initial = d.mask(mss.init)
        self._parts = {}

    def _pre_max(self, x, action, tau):
        add, delete = self.effects[tau]
        if x & delete:
            return ()
        return (self.guard[action] | (x & ~add),)

    def succ(self, s, action, tau):
        add, delete = self.effects[tau]
        return (s | add) & ~delete

    def _single_block(self, action, payload):
        return [(self.states_enabling(action), payload)]

    def dist_partition(self, action):
        key = ("d", action)
        if key not in self._parts:
            self._parts[key] = self._single_block(action, self.op_dist[action])
        return self._parts[key]

    def cost_partition(self, action):
        key = ("c", action)
        if key not in self._parts:
            self._parts[key] = self._single_block(action, self.op_cost[action])
        return self._parts[key]

    def restricted(self, states, enabled):
        clone = super().restricted(states, enabled)
        clone._parts = {}
        return clone

    def goal_set(self):
        if self.mss.goal is None:
            return PseudoAntichain.empty(self.domain)
        g = PseudoAntichain.closure(self.domain, (self.domain.mask(self.mss.goal),))
        return pa_intersect(g, self.states)


def prune_blocking(mdp, keep=None):
    """Greatest set of states from which some action stays inside the set.

    ``keep`` (e.g. absorbing goal states) is never pruned.  Returns
    ``(states, enabled)`` where ``enabled[action]`` is the set of surviving
    states whose ``action`` successors all survive.
    """
    d = mdp.domain
    N = mdp.states
    keep = keep if keep is not None else PseudoAntichain.empty(d)
    while True:
        enabled = {}
        nxt = keep
        for a in mdp.actions:
            safe = mdp.states_enabling(a)
            for tau in mdp.support(a):
                safe = safe & mdp.pre_star(N, a, tau)
            enabled[a] = safe & N
            nxt = nxt | enabled[a]
        nxt = nxt & N
        if nxt == N:
            return N, enabled
        N = nxt


def mss_to_mdp(mss, prune=True, keep_goal=True):
    """Build the MDP of an MSS and prune blocking states.

    Returns ``(mdp, goal)``.  Goal states are treated as absorbing when
    ``keep_goal`` is set, so they survive pruning even without actions.
    """
    mdp = StripsMdp(mss)
    goal = mdp.goal_set()
    if not prune:
        return mdp, goal
    N, enabled = prune_blocking(mdp, goal if keep_goal else None)
    if not N:
        raise EmptyStateSpaceError("every state is blocking")
    if N == mdp.states and all(enabled[a] == mdp.states_enabling(a) for a in mdp.actions):
        return mdp, goal
    pruned = mdp.restricted(N, enabled)
    return pruned, pa_intersect(goal, N)


def safe_region(mdp, action, target):
    """States enabling ``action`` whose successors all lie in ``target``."""
    safe = mdp.states_enabling(action)
    for tau in mdp.support(action):
        safe = safe & mdp.pre_star(target, action, tau)
    return safe


def any_successor_region(mdp, action, target):
    return pre_union(mdp, target, action, mdp.support(action))


# -- generators --------------------------------------------------------------


def _op(name, cost, guard=(), effects=((1, (), ()),)):
    return Operator(
        name,
        frozenset(guard),
        tuple(Effect(Fraction(p), frozenset(a), frozenset(dl)) for p, a, dl in effects),
        Fraction(cost),
    )


def gen_monkey(sticks, pieces):
    """Monkey instance with ``sticks`` useful piece sets of ``pieces`` pieces.

    Conditions: box, stone, stick, bananas and ``(sticks + 1) * pieces`` piece
    conditions, the last set being useless (its assembly never yields a stick).
    The monkey can take the box, a stone or any piece, assemble a stick from a
    complete set, and try to get the bananas with what it holds.
    """
    if sticks < 1 or pieces < 1:
        raise ValueError("sticks and pieces must be positive")
    conds = ["box", "stone", "stick", "bananas"]
    sets = [[f"piece{j}_{i}" for i in range(pieces)] for j in range(sticks + 1)]
    for s in sets:
        conds.extend(s)
    ops = [
        _op("takebox", 5, effects=((1, ["box"], ()),)),
        _op("takestone", 1, effects=((1, ["stone"], ()),)),
    ]
    for s in sets:
        for p in s:
            ops.append(_op(f"take{p}", 1, effects=((Fraction(3, 4), [p], ()), (Fraction(1, 4), (), ()))))
    for j, s in enumerate(sets):
        if j < sticks:
            ops.append(_op(f"assemble{j}", 1 + j, s, ((1, ["stick"], s),)))
        else:
            ops.append(_op(f"assemble{j}", 2, s, ((1, (), ()),)))
    ops += [
        _op("takebananaswithstone", 1, ["stone"],
            ((Fraction(1, 10), ["bananas"], ["stone"]), (Fraction(9, 10), (), ["stone"]))),
        _op("takebananaswithbox", 2, ["box"], ((Fraction(1, 4), ["bananas"], ()), (Fraction(3, 4), (), ()))),
        _op("takebananaswithstick", 2, ["stick"], ((Fraction(1, 5), ["bananas"], ()), (Fraction(4, 5), (), ()))),
        _op("takebananaswithboth", 2, ["box", "stick"],
            ((Fraction(1, 2), ["bananas"], ()), (Fraction(1, 2), (), ()))),
    ]
    return Mss(tuple(conds), frozenset(), frozenset(["bananas"]), ops).validate()


def moat_probability(depth):
    """Castle survival probability behind a moat of the given depth."""
    if depth == 0:
        return Fraction(1, 10)
    return Fraction((2 * depth - 1) ** 2, 4 * (depth * depth + depth - 1))


def gen_moats(castles, depth, build_cost=4):
    """Moats and castles instance: ``castles * (depth + 1)`` conditions.

    Digging one more level of a moat costs 1 and is deterministic.  Building a
    castle succeeds with :func:`moat_probability` of the deepest level dug in
    sequence; a failed attempt changes nothing.
    """
    if castles < 1 or depth < 1:
        raise ValueError("castles and depth must be positive")
    conds, ops = [], []
    for c in range(castles):
        levels = [f"moat{c}_{k}" for k in range(1, depth + 1)]
        conds += levels + [f"castle{c}"]
        for k, lv in enumerate(levels):
            ops.append(_op(f"dig{c}_{k + 1}", 1, levels[:k], ((1, [lv], ()),)))
        for k in range(depth + 1):
            p = moat_probability(k)
            ops.append(_op(f"build{c}_{k}", build_cost, levels[:k],
                           ((p, [f"castle{c}"], ()), (1 - p, (), ()))))
    goal = frozenset(f"castle{c}" for c in range(castles))
    return Mss(tuple(conds), frozenset(), goal, ops).validate()


def gen_random(seed, conditions=None, operators=None, max_den=20, with_goal=True):
    """Random MSS with positive costs, reproducible from ``seed``.

    At most 10 conditions and 6 operators by default; every operator has one
    to three effects whose probabilities have denominators at most
    ``max_den``.
    """
    rng = random.Random(seed)
    n = conditions if conditions is not None else rng.randint(2, 10)
    m = operators if operators is not None else rng.randint(1, 6)
    names = [f"c{i}" for i in range(n)]

    def subset(p):
        return [c for c in names if rng.random() < p]

    ops = []
    for k in range(m):
        den = rng.randint(1, max_den)
        parts = rng.randint(1, min(3, den))
        cuts = sorted(rng.sample(range(1, den), parts - 1)) if parts > 1 else []
        bounds = [0] + cuts + [den]
        effects = []
        for lo, hi in zip(bounds, bounds[1:]):
            add = subset(0.3)
            delete = [c for c in subset(0.15) if c not in add]
            effects.append((Fraction(hi - lo, den), add, delete))
        ops.append(_op(f"o{k}", rng.randint(1, 5), subset(0.2), effects))
    goal = frozenset(subset(0.3) or [rng.choice(names)]) if with_goal else None
    return Mss(tuple(names), frozenset(subset(0.2)), goal, ops).validate()
