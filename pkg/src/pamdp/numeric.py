"""Exact linear solvers for expected costs and gain/bias of Markov chains.

Chains are given as sparse rows ``{column: probability}``.  All arithmetic
is over ``Fraction`` unless the float mode is requested.
"""

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

ZERO = Fraction(0)
ONE = Fraction(1)


class SingularSystemError(ArithmeticError):
    pass


class NotProperError(ValueError):
    """The chain reaches the goal with probability below one from some state."""


@dataclass
class QuotientMc:
    """Markov chain with costs; goal states are absorbing with value 0."""

    rows: list
    costs: list
    goal: list = None
    witnesses: list = field(default_factory=list)

    def __post_init__(self):
        if self.goal is None:
            self.goal = [False] * len(self.rows)

    @property
    def n(self):
        return len(self.rows)


def solve_sparse(rows, rhs):
    """Solve ``A x = rhs`` exactly; ``rows[i]`` is ``{j: A[i][j]}``.

    Gaussian elimination with a Markowitz-style pivot order (shortest row,
    then sparsest column) keeps fill-in low on the near-triangular systems
    produced by monotone models.
    """
    n = len(rows)
    rows = [{j: v for j, v in r.items() if v} for r in rows]
    rhs = list(rhs)
    cols = {}
    for i, r in enumerate(rows):
        for j in r:
            cols.setdefault(j, set()).add(i)
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    done = [False] * n
    order = []
    while heap:
        length, r = heapq.heappop(heap)
        if done[r] or length != len(rows[r]):
            continue
        row = rows[r]
        if not row:
            raise SingularSystemError("singular system")
        c = min(row, key=lambda j: (len(cols[j]), j))
        piv = row[c]
        done[r] = True
        for j in row:
            cols[j].discard(r)
        for i in list(cols[c]):
            target = rows[i]
            f = target[c] / piv
            for j, v in row.items():
                w = target.get(j, ZERO) - f * v
                if w:
                    if j not in target:
                        cols[j].add(i)
                    target[j] = w
                elif j in target:
                    del target[j]
                    cols[j].discard(i)
            rhs[i] -= f * rhs[r]
            heapq.heappush(heap, (len(target), i))
        order.append((r, c))
    if len(order) != n:
        raise SingularSystemError("singular system")
    x = [ZERO] * n
    for r, c in reversed(order):
        row = rows[r]
        acc = rhs[r]
        for j, v in row.items():
            if j != c:
                acc -= v * x[j]
        x[c] = acc / row[c]
    return x


def solve_float(rows, rhs):
    n = len(rows)
    A = np.zeros((n, n))
    for i, r in enumerate(rows):
        for j, v in r.items():
            A[i, j] = float(v)
    try:
        return list(np.linalg.solve(A, np.array([float(b) for b in rhs])))
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(str(e)) from None


def _solver(arith):
    if arith == "exact":
        return solve_sparse
    if arith == "float":
        return solve_float
    raise ValueError(f"unknown arithmetic {arith!r}")


# -- stochastic shortest path -------------------------------------------------


def solve_ssp(q, arith="exact"):
    """Expected cost to the goal: ``(I - P) v = c`` off the goal, 0 on it."""
    idx = [i for i in range(q.n) if not q.goal[i]]
    pos = {i: k for k, i in enumerate(idx)}
    rows = []
    for i in idx:
        r = {pos[i]: ONE}
        for j, p in q.rows[i].items():
            if j in pos:
                r[pos[j]] = r.get(pos[j], ZERO) - p
        rows.append(r)
    try:
        sol = _solver(arith)(rows, [q.costs[i] for i in idx])
    except SingularSystemError:
        raise NotProperError("some state does not reach the goal almost surely") from None
    v = [ZERO if arith == "exact" else 0.0] * q.n
    for i, x in zip(idx, sol):
        v[i] = x
    return v


def ssp_residual(q, v):
    """Largest absolute defect of the expected-cost equations."""
    worst = 0
    for i in range(q.n):
        if q.goal[i]:
            d = v[i]
        else:
            d = v[i] - q.costs[i] - sum(p * v[j] for j, p in q.rows[i].items())
        worst = max(worst, abs(d))
    return worst


# -- gain and bias ------------------------------------------------------------


@dataclass
class GainBias:
    gain: list
    bias: list
    classes: list
    stationary: list


def recurrent_classes(q):
    """Bottom strongly connected components, each sorted, in index order."""
    g = nx.DiGraph()
    g.add_nodes_from(range(q.n))
    for i, r in enumerate(q.rows):
        g.add_edges_from((i, j) for j, p in r.items() if p)
    cond = nx.condensation(g)
    out = [sorted(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]
    return sorted(out)


def stationary_distribution(q, cls, arith="exact"):
    """Stationary distribution of the closed class ``cls`` (list of indices)."""
    pos = {s: k for k, s in enumerate(cls)}
    m = len(cls)
    one = ONE if arith == "exact" else 1.0
    # Balance equations pi_j = sum_i pi_i P_ij; the last one is replaced by sum(pi) = 1.
    eq = [{k: one} for k in range(m)]
    for s in cls:
        i = pos[s]
        for t, p in q.rows[s].items():
            j = pos[t]
            eq[j][i] = eq[j].get(i, 0) - p
    eq[-1] = {k: one for k in range(m)}
    rhs = [0] * (m - 1) + [one]
    return _solver(arith)(eq, rhs)


def solve_gain_bias(q, arith="exact"):
    """Gain and bias of a (multichain) Markov chain with costs.

    The bias is normalized so that its stationary average vanishes on every
    recurrent class, which makes it unique.
    """
    zero = ZERO if arith == "exact" else 0.0
    solve = _solver(arith)
    classes = recurrent_classes(q)
    gain = [zero] * q.n
    bias = [zero] * q.n
    fixed = [False] * q.n
    stationary = []
    for cls in classes:
        pi = stationary_distribution(q, cls, arith)
        stationary.append(pi)
        g = sum((p * q.costs[s] for p, s in zip(pi, cls)), zero)
        pos = {s: k for k, s in enumerate(cls)}
        # Pin the first state to 0, drop its equation, then shift.
        eq, rhs = [], []
        for s in cls:
            if s == cls[0]:
                eq.append({0: ONE if arith == "exact" else 1.0})
                rhs.append(zero)
                continue
            r = {pos[s]: ONE if arith == "exact" else 1.0}
            for t, p in q.rows[s].items():
                r[pos[t]] = r.get(pos[t], 0) - p
            eq.append(r)
            rhs.append(q.costs[s] - g)
        b = solve(eq, rhs)
        shift = sum((p * x for p, x in zip(pi, b)), zero)
        for s, x in zip(cls, b):
            gain[s] = g
            bias[s] = x - shift
            fixed[s] = True
    trans = [i for i in range(q.n) if not fixed[i]]
    if trans:
        pos = {s: k for k, s in enumerate(trans)}
        eq, rg = [], []
        for s in trans:
            r = {pos[s]: ONE if arith == "exact" else 1.0}
            acc = zero
            for t, p in q.rows[s].items():
                if t in pos:
                    r[pos[t]] = r.get(pos[t], 0) - p
                else:
                    acc += p * gain[t]
            eq.append(r)
            rg.append(acc)
        gt = solve(eq, rg)
        for s, x in zip(trans, gt):
            gain[s] = x
        rb = []
        for s in trans:
            acc = q.costs[s] - gain[s]
            for t, p in q.rows[s].items():
                if t not in pos:
                    acc += p * bias[t]
            rb.append(acc)
        bt = solve(eq, rb)
        for s, x in zip(trans, bt):
            bias[s] = x
    return GainBias(gain, bias, classes, stationary)


def gain_bias_residual(q, gb):
    """Largest defect of ``g = Pg``, ``g + b = c + Pb`` and ``pi.b = 0``."""
    worst = 0
    g, b = gb.gain, gb.bias
    for i in range(q.n):
        pg = sum(p * g[j] for j, p in q.rows[i].items())
        pb = sum(p * b[j] for j, p in q.rows[i].items())
        worst = max(worst, abs(g[i] - pg), abs(g[i] + b[i] - q.costs[i] - pb))
    for cls, pi in zip(gb.classes, gb.stationary):
        worst = max(worst, abs(sum(p * b[s] for p, s in zip(pi, cls))))
    return worst


# -- quotient construction ----------------------------------------------------


def explicitize(mdp, quotient, strategy, costs, goal=None):
    """Markov chain on quotient blocks, read off one witness state per block.

    ``quotient`` holds ``(block, cost)`` pairs; when ``goal`` is given it is
    appended as an absorbing last block.  Witnesses are the maximum of the
    first pseudo-element of each block.
    """
    blocks = [B for B, _ in quotient.blocks]
    cost = [c for _, c in quotient.blocks]
    is_goal = [False] * len(blocks)
    if goal:
        blocks.append(goal)
        cost.append(ZERO)
        is_goal.append(True)
    n = len(blocks)
    rows, wits = [], []
    for i, B in enumerate(blocks):
        w = B.elements[0][0]
        wits.append(w)
        if is_goal[i]:
            rows.append({i: ONE})
            continue
        a = strategy.lookup(w)
        row = {}
        for t, p in mdp.successors(w, a):
            j = _locate(blocks, t)
            if j is None:
                raise ValueError(f"successor {mdp.domain.render(t)!r} leaves the quotient carrier")
            row[j] = row.get(j, ZERO) + p
        rows.append(row)
    return QuotientMc(rows, cost, is_goal, wits)


def _locate(blocks, s):
    for j, B in enumerate(blocks):
        if s in B:
            return j
    return None
