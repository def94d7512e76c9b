"""Symbolic lumping of the Markov chain induced by a strategy.

Blocks are refined with respect to splitters until every state of a block
has the same cost and the same probability of moving into each block.
"""

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import pa_difference, pa_intersect, pa_union_all
from .partition import SymbolicPartition, coarsen

ZERO = Fraction(0)


def induced_partitions(mdp, costs, strategy):
    """Cost and distribution partitions of the chain induced by ``strategy``.

    Cost blocks carry the signed cost.  Distribution blocks carry
    ``(action, ((tau, p), ...))`` with positive probabilities only; they never
    merge across actions because predecessors depend on the action.
    """
    cost_blocks, dist_blocks = [], []
    for B, a in strategy.blocks:
        for C, c in costs.partition(a):
            I = pa_intersect(B, C)
            if I:
                cost_blocks.append((I, c))
        for D, dist in mdp.dist_partition(a):
            I = pa_intersect(B, D)
            if I:
                key = tuple(sorted((t, p) for t, p in dist.items() if p))
                dist_blocks.append((I, (a, key)))
    d = mdp.domain
    return coarsen(SymbolicPartition(d, cost_blocks)), coarsen(SymbolicPartition(d, dist_blocks))


def pre_lambda(mdp, target, tau, strategy):
    """States whose strategy action reaches ``target`` through ``tau``."""
    parts = [pa_intersect(mdp.pre_star(target, a, tau), B) for B, a in strategy.blocks]
    return pa_union_all(mdp.domain, parts)


class _Splitter:
    """Predecessors of one splitter, grouped by stochastic action and probability."""

    def __init__(self, mdp, dist_part, target):
        self.mdp = mdp
        self.dist_part = dist_part
        self.target = target
        self._pre = {}
        taus = []
        for _, (_, key) in dist_part.blocks:
            for t, _ in key:
                if t not in taus:
                    taus.append(t)
        self.taus = sorted(taus, key=mdp.stochastic.index)
        self._hull = None

    def by_prob(self, tau):
        """``{q: states reaching the target through tau with probability q}``."""
        r = self._pre.get(tau)
        if r is not None:
            return r
        mdp, d = self.mdp, self.mdp.domain
        per_action = {}
        groups = {}
        for D, (a, key) in self.dist_part.blocks:
            q = dict(key).get(tau, ZERO)
            if not q:
                continue
            P = per_action.get(a)
            if P is None:
                P = per_action[a] = mdp.pre_star(self.target, a, tau)
            if not P:
                continue
            I = pa_intersect(P, D)
            if I:
                groups.setdefault(q, []).append(I)
        r = self._pre[tau] = {q: pa_union_all(d, Is) for q, Is in groups.items()}
        return r

    def hull(self):
        """Every state with a positive probability of reaching the target."""
        if self._hull is None:
            parts = [P for t in self.taus for P in self.by_prob(t).values()]
            self._hull = pa_union_all(self.mdp.domain, parts)
        return self._hull


def _split_with(block, sp):
    if not pa_intersect(block, sp.hull()):
        return [(ZERO, block)]
    table = {ZERO: [block]}
    for tau in sp.taus:
        groups = sp.by_prob(tau)
        if not groups:
            continue
        nxt = {}
        for p, blks in table.items():
            for blk in blks:
                moved = []
                for q, P in groups.items():
                    part = pa_intersect(blk, P)
                    if part:
                        nxt.setdefault(p + q, []).append(part)
                        moved.append(part)
                rest = pa_difference(blk, pa_union_all(blk.domain, moved)) if moved else blk
                if rest:
                    nxt.setdefault(p, []).append(rest)
        table = nxt
    d = block.domain
    return [(p, blks[0] if len(blks) == 1 else pa_union_all(d, blks)) for p, blks in table.items()]


def split(mdp, block, target, strategy, dist_part=None):
    """Partition ``block`` by the probability of moving into ``target``.

    Returns ``[(probability, sub-block)]`` with distinct probabilities and
    non-empty sub-blocks.
    """
    if dist_part is None:
        dist_part = _dist_only(mdp, strategy)
    return _split_with(block, _Splitter(mdp, dist_part, target))


def _dist_only(mdp, strategy):
    blocks = []
    for B, a in strategy.blocks:
        for D, dist in mdp.dist_partition(a):
            I = pa_intersect(B, D)
            if I:
                blocks.append((I, (a, tuple(sorted((t, p) for t, p in dist.items() if p)))))
    return coarsen(SymbolicPartition(mdp.domain, blocks))


@dataclass
class LumpStats:
    splitters: int = 0
    blocks: int = 0
    seconds: float = 0.0


@dataclass
class LumpResult:
    partition: SymbolicPartition
    stats: LumpStats = field(default_factory=LumpStats)


def lump(mdp, strategy, cost_part, dist_part, splitters=()):
    """Coarsest refinement of ``cost_part`` that is a lumping of the chain.

    ``splitters`` are extra sets outside the carrier that transitions may
    enter (absorbing goal states); they are used as splitters only.
    Returns the quotient blocks with their costs.
    """
    t0 = time.perf_counter()
    blocks = [(B, c) for B, c in cost_part.blocks]
    queue = deque(B for B, _ in blocks)
    queue.extend(S for S in splitters if S)
    stats = LumpStats()
    while queue:
        C = queue.popleft()
        stats.splitters += 1
        sp = _Splitter(mdp, dist_part, C)
        new = []
        for B, c in blocks:
            parts = _split_with(B, sp)
            if len(parts) == 1:
                new.append((B, c))
                continue
            largest = max(range(len(parts)), key=lambda i: (len(parts[i][1]), -i))
            for i, (_, blk) in enumerate(parts):
                new.append((blk, c))
                if i != largest:
                    queue.append(blk)
        blocks = new
    stats.blocks = len(blocks)
    stats.seconds = time.perf_counter() - t0
    return LumpResult(SymbolicPartition(mdp.domain, blocks), stats)


def is_lumping(mdp, costs, strategy, quotient, extra=()):
    """Check stability of ``quotient`` symbolically (used by tests)."""
    cost_part, dist_part = induced_partitions(mdp, costs, strategy)
    for B, _ in quotient.blocks:
        if len({c for C, c in cost_part.blocks if pa_intersect(B, C)}) > 1:
            return False
    targets = [B for B, _ in quotient.blocks] + [S for S in extra if S]
    for C in targets:
        sp = _Splitter(mdp, dist_part, C)
        for B, _ in quotient.blocks:
            if len(_split_with(B, sp)) > 1:
                return False
    return True

