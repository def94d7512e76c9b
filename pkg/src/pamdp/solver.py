"""Symbolic strategy iteration for stochastic shortest path and mean payoff.

Each iteration lumps the chain induced by the current strategy, solves the
small quotient chain exactly and improves the strategy block-wise.  States
are never enumerated.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import PseudoAntichain, pa_difference, pa_intersect, pa_subset, pa_union_all
from .lump import _dist_only, _split_with, _Splitter, induced_partitions, lump
from .numeric import explicitize, gain_bias_residual, solve_gain_bias, solve_ssp, ssp_residual
from .partition import SymbolicPartition, coarsen, override

MAX_ITERATIONS = 10 ** 6
FLOAT_EPS = 1e-9


class SolverError(RuntimeError):
    pass


class IterationLimitError(SolverError):
    pass


class SolveTimeout(SolverError):
    pass


class NoProperStatesError(SolverError):
    """No state reaches the goal almost surely."""


class NonPositiveCostError(ValueError):
    pass


# -- proper states ------------------------------------------------------------


class _Reach:
    """``R(Y, X)``: states with an action whose successors stay in ``Y`` and
    reach ``X`` with positive probability, computed per distribution block."""

    def __init__(self, mdp, Y, actions=None):
        self.mdp = mdp
        self.actions = mdp.actions if actions is None else actions
        self.safe = {}
        for a in self.actions:
            parts = []
            for D, dist in mdp.dist_partition(a):
                S = D
                for tau, p in dist.items():
                    if p:
                        S = pa_intersect(S, mdp.pre_star(Y, a, tau))
                        if not S:
                            break
                if S:
                    parts.append((S, [t for t, p in dist.items() if p]))
            self.safe[a] = parts

    def region(self, X, action):
        mdp = self.mdp
        parts = []
        for S, taus in self.safe[action]:
            hit = pa_union_all(mdp.domain, [mdp.pre_star(X, action, t) for t in taus])
            I = pa_intersect(S, hit)
            if I:
                parts.append(I)
        return pa_union_all(mdp.domain, parts)

    def __call__(self, X):
        return pa_union_all(self.mdp.domain, [self.region(X, a) for a in self.actions])


def _least_layers(reach, goal):
    layers = [goal]
    X = goal
    while True:
        new = pa_difference(reach(X), X)
        if not new:
            return layers
        X = X | new
        layers.append(X)


def proper_states(mdp, goal):
    """States from which some strategy reaches ``goal`` with probability 1."""
    goal = pa_intersect(goal, mdp.states)
    Y = mdp.states
    while True:
        X = _least_layers(_Reach(mdp, Y), goal)[-1]
        if pa_subset(Y, X):
            return X
        Y = X


def proper_layers(mdp, goal, proper):
    """Increasing sets ``X_0 = goal ⊆ X_1 ⊆ ...`` ending at ``proper``."""
    return _least_layers(_Reach(mdp, proper), pa_intersect(goal, mdp.states))


def safe_regions(mdp, target):
    """Per action, the enabled states whose successors all lie in ``target``."""
    out = {}
    for a in mdp.actions:
        parts = [S for S, _ in _Reach(mdp, target, [a]).safe[a]]
        out[a] = pa_union_all(mdp.domain, parts)
    return out


# -- initial strategies -------------------------------------------------------


def initial_strategy_ssp(mdp, goal, proper):
    """Proper strategy on ``proper`` minus ``goal``.

    States are peeled layer by layer; a state of layer ``i`` plays the first
    action (in declaration order) that stays proper and reaches layer
    ``i - 1`` with positive probability.  Goal states are absorbing and get
    no action.
    """
    d = mdp.domain
    reach = _Reach(mdp, proper)
    layers = _least_layers(reach, pa_intersect(goal, mdp.states))
    blocks = []
    for prev, cur in zip(layers, layers[1:]):
        remaining = pa_difference(cur, prev)
        for a in mdp.actions:
            if not remaining:
                break
            part = pa_intersect(remaining, reach.region(prev, a))
            if part:
                blocks.append((part, a))
                remaining = pa_difference(remaining, part)
        if remaining:
            raise SolverError("layer state without a progressing action")
    return coarsen(SymbolicPartition(d, blocks))


def initial_strategy_emp(mdp):
    """Strategy given by the maximal states: each pseudo-element of the state
    space (minus earlier ones) plays the first action enabled at its maximum."""
    d = mdp.domain
    blocks = []
    seen = PseudoAntichain.empty(d)
    for x, alpha in mdp.states.elements:
        region = pa_difference(PseudoAntichain(d, [(x, alpha)]), seen)
        seen = seen | region
        order = [a for a in mdp.actions if x in mdp.states_enabling(a)]
        order += [a for a in mdp.actions if a not in order]
        remaining = region
        for a in order:
            if not remaining:
                break
            part = pa_intersect(remaining, mdp.states_enabling(a))
            if part:
                blocks.append((part, a))
                remaining = pa_difference(remaining, part)
        if remaining:
            raise SolverError("blocking states in the state space")
    return coarsen(SymbolicPartition(d, blocks))


# -- improvement ----------------------------------------------------------------


def action_values(mdp, costs, action, region, targets, weights, init):
    """Partition of ``region`` by the one-step look-ahead value of ``action``.

    ``targets`` are disjoint sets covering every successor, ``weights[k]`` the
    value vector attached to ``targets[k]`` and ``init(cost)`` the vector
    contributed by the action cost.  Blocks carry
    ``init(cost) + sum_k P(target_k) * weights[k]``.
    """
    cur = []
    for C, c in costs.partition(action):
        I = pa_intersect(region, C)
        if I:
            cur.append((I, init(c), Fraction(0)))
    if not cur:
        return []
    const = SymbolicPartition(mdp.domain, [(region, action)])
    dist_part = _dist_only(mdp, const)
    for C, w in zip(targets, weights):
        if all(m == 1 for _, _, m in cur):
            break
        parts = _split_with(region, _Splitter(mdp, dist_part, C))
        parts = [(p, P) for p, P in parts if p]
        if not parts:
            continue
        nxt = {}
        for blk, val, mass in cur:
            if mass == 1:
                nxt.setdefault((val, mass), []).append(blk)
                continue
            moved = []
            for p, P in parts:
                I = pa_intersect(blk, P)
                if I:
                    moved.append(I)
                    key = (tuple(v + p * x for v, x in zip(val, w)), mass + p)
                    nxt.setdefault(key, []).append(I)
            rest = pa_difference(blk, pa_union_all(mdp.domain, moved)) if moved else blk
            if rest:
                nxt.setdefault((val, mass), []).append(rest)
        cur = [(pa_union_all(mdp.domain, bs), val, mass) for (val, mass), bs in nxt.items()]
    return [(blk, val) for blk, val, _ in cur]


def improve_strategy(strategy, improving, actions):
    """Apply improving ``(block, action, score)`` triples to ``strategy``.

    Triples are applied by decreasing score so that the best action wins; on
    equal scores the action declared first is applied last and wins.
    """
    rank = {a: i for i, a in enumerate(actions)}
    order = sorted(range(len(improving)), key=lambda k: (-improving[k][2], -rank[improving[k][1]], -k))
    for k in order:
        blk, a, _ = improving[k]
        strategy = override(strategy, blk, a)
    return coarsen(strategy)


# -- reports ------------------------------------------------------------------


@dataclass
class IterationStats:
    quotient_size: int
    lump_seconds: float
    solve_seconds: float
    improve_seconds: float
    splitters: int
    strategy: SymbolicPartition = None
    quotient: SymbolicPartition = None
    chain: object = None
    solution: object = None
    residual: object = None


@dataclass
class SolveReport:
    """Outcome of a solve.

    ``values`` maps blocks to a value (expected cost) or to a ``(gain, bias)``
    pair.  For expected costs, states outside ``proper`` have infinite value.
    """

    objective: str
    strategy: SymbolicPartition
    values: SymbolicPartition
    iterations: int
    history: list = field(default_factory=list)
    proper: PseudoAntichain = None
    goal: PseudoAntichain = None
    seconds: float = 0.0
    direction: str = "minimize"

    @property
    def max_quotient(self):
        return max((h.quotient_size for h in self.history), default=0)

    def value_of(self, s):
        """Value at ``s`` (in the original cost sign), None when undefined."""
        i = self.values.locate(s)
        if i is None:
            return None
        v = self.values.blocks[i][1]
        sign = 1 if self.direction == "minimize" else -1
        if self.objective == "ssp":
            return v * sign
        return (v[0] * sign, v[1] * sign)

    def action_of(self, s):
        i = self.strategy.locate(s)
        return None if i is None else self.strategy.blocks[i][1]

    def timings(self):
        return {
            "lump": sum(h.lump_seconds for h in self.history),
            "syst": sum(h.solve_seconds for h in self.history),
            "impr": sum(h.improve_seconds for h in self.history),
            "total": self.seconds,
        }


def _less(a, b, arith):
    return a < b - FLOAT_EPS if arith == "float" else a < b


def _equal(a, b, arith):
    return abs(a - b) <= FLOAT_EPS if arith == "float" else a == b


def _check_budget(it, max_iterations, deadline):
    if it >= max_iterations:
        raise IterationLimitError(f"no convergence after {max_iterations} iterations")
    if deadline is not None and time.perf_counter() > deadline:
        raise SolveTimeout("time budget exhausted")


# -- stochastic shortest path ---------------------------------------------------


def solve_ssp_symblicit(mdp, costs, goal, arith="exact", max_iterations=MAX_ITERATIONS,
                        timeout=None, keep_history=True, check=False):
    """Optimal expected cost to reach ``goal`` on the proper states.

    Costs must be positive after the sign change of the direction.  With
    ``check`` every quotient solution is verified to have zero residual.
    """
    t0 = time.perf_counter()
    deadline = None if timeout is None else t0 + timeout
    if not costs.positive_costs():
        raise NonPositiveCostError("expected-cost objective needs strictly positive costs")
    d = mdp.domain
    goal = pa_intersect(goal, mdp.states)
    proper = proper_states(mdp, goal)
    if not proper:
        raise NoProperStatesError("no state reaches the goal almost surely")
    carrier = pa_difference(proper, goal)
    safe = safe_regions(mdp, proper)
    regions = {a: pa_intersect(safe[a], carrier) for a in mdp.actions}
    strategy = initial_strategy_ssp(mdp, goal, proper) if carrier else SymbolicPartition(d)
    history = []
    it = 0
    values = SymbolicPartition(d, [(goal, Fraction(0))])
    while carrier:
        _check_budget(it, max_iterations, deadline)
        it += 1
        t1 = time.perf_counter()
        cost_part, dist_part = induced_partitions(mdp, costs, strategy)
        res = lump(mdp, strategy, cost_part, dist_part, splitters=[goal])
        quotient = res.partition
        t2 = time.perf_counter()
        chain = explicitize(mdp, quotient, strategy, costs, goal)
        v = solve_ssp(chain, arith)
        residual = ssp_residual(chain, v) if (check or keep_history) and arith == "exact" else None
        if check and residual != 0:
            raise SolverError(f"non-zero residual {residual}")
        t3 = time.perf_counter()
        nq = len(quotient)
        targets = [B for B, _ in quotient.blocks] + ([goal] if goal else [])
        weights = [(v[k],) for k in range(nq)] + ([(Fraction(0),)] if goal else [])
        improving = []
        for a in mdp.actions:
            R = regions[a]
            if not R:
                continue
            for blk, (l,) in action_values(mdp, costs, a, R, targets, weights, lambda c: (c,)):
                for k, (Q, _) in enumerate(quotient.blocks):
                    if _less(l, v[k], arith):
                        I = pa_intersect(blk, Q)
                        if I:
                            improving.append((I, a, l))
        values = SymbolicPartition(d, [(Q, v[k]) for k, (Q, _) in enumerate(quotient.blocks)]
                                   + ([(goal, v[nq])] if goal else []))
        new = improve_strategy(strategy, improving, mdp.actions) if improving else strategy
        t4 = time.perf_counter()
        history.append(IterationStats(
            nq + (1 if goal else 0), t2 - t1, t3 - t2, t4 - t3, res.stats.splitters,
            strategy if keep_history else None, values if keep_history else None,
            chain if keep_history else None, v if keep_history else None, residual,
        ))
        if not improving:
            break
        strategy = new
    return SolveReport("ssp", strategy, values, it, history, proper, goal,
                       time.perf_counter() - t0, costs.direction)


# -- mean payoff ----------------------------------------------------------------


def solve_emp_symblicit(mdp, costs, arith="exact", max_iterations=MAX_ITERATIONS,
                        timeout=None, keep_history=True, check=False):
    """Optimal gain (and a matching bias) for the expected mean payoff."""
    t0 = time.perf_counter()
    deadline = None if timeout is None else t0 + timeout
    d = mdp.domain
    strategy = initial_strategy_emp(mdp)
    regions = {a: mdp.states_enabling(a) for a in mdp.actions}
    history = []
    it = 0
    while True:
        _check_budget(it, max_iterations, deadline)
        it += 1
        t1 = time.perf_counter()
        cost_part, dist_part = induced_partitions(mdp, costs, strategy)
        res = lump(mdp, strategy, cost_part, dist_part)
        quotient = res.partition
        t2 = time.perf_counter()
        chain = explicitize(mdp, quotient, strategy, costs)
        gb = solve_gain_bias(chain, arith)
        residual = gain_bias_residual(chain, gb) if (check or keep_history) and arith == "exact" else None
        if check and residual != 0:
            raise SolverError(f"non-zero residual {residual}")
        t3 = time.perf_counter()
        g, b = gb.gain, gb.bias
        targets = [B for B, _ in quotient.blocks]
        blocks = quotient.blocks
        improving = []
        for a in mdp.actions:
            if not regions[a]:
                continue
            for blk, (lg,) in action_values(mdp, costs, a, regions[a], targets,
                                            [(x,) for x in g], lambda c: (Fraction(0),)):
                for k, (Q, _) in enumerate(blocks):
                    if _less(lg, g[k], arith):
                        I = pa_intersect(blk, Q)
                        if I:
                            improving.append((I, a, lg))
        if not improving:
            for a in mdp.actions:
                if not regions[a]:
                    continue
                for blk, (lg, lb) in action_values(mdp, costs, a, regions[a], targets,
                                                   list(zip(g, b)), lambda c: (Fraction(0), c)):
                    for k, (Q, _) in enumerate(blocks):
                        if _equal(lg, g[k], arith) and _less(lb, g[k] + b[k], arith):
                            I = pa_intersect(blk, Q)
                            if I:
                                improving.append((I, a, lb))
        values = SymbolicPartition(d, [(Q, (g[k], b[k])) for k, (Q, _) in enumerate(blocks)])
        new = improve_strategy(strategy, improving, mdp.actions) if improving else strategy
        t4 = time.perf_counter()
        history.append(IterationStats(
            len(quotient), t2 - t1, t3 - t2, t4 - t3, res.stats.splitters,
            strategy if keep_history else None, values if keep_history else None,
            chain if keep_history else None, gb if keep_history else None, residual,
        ))
        if not improving:
            break
        strategy = new
    return SolveReport("emp", strategy, values, it, history, mdp.states, None,
                       time.perf_counter() - t0, costs.direction)
