"""Monotonic MDPs with symbolic predecessor operators."""

from fractions import Fraction

from .lattice import PseudoAntichain, maximal, pa_intersect


class ActionDisabledError(ValueError):
    """An action was queried in a state where it is not enabled."""


class MonotonicMdp:
    """Base class for monotonic MDPs ``(S, Σ, T, E, D)`` with costs.

    Subclasses implement ``_pre_max``, ``succ``, ``dist_partition`` and
    ``cost_partition``.  ``_pre_max(x, action, tau)`` returns the maximal
    states that enable ``action`` and reach a state below ``x`` through the
    stochastic action ``tau``.  Distribution and cost partitions are lists of
    ``(PseudoAntichain, payload)`` blocks covering the states that enable the
    action; distributions are ``{tau: Fraction}`` dicts.

    The state space and the enabled sets can be narrowed with
    :meth:`restricted`; the predecessor operator then intersects with the
    narrowed enabled set.
    """

    def __init__(self, domain, actions, stochastic, states=None):
        self.domain = domain
        self.actions = tuple(actions)
        self.stochastic = tuple(stochastic)
        self.states = states if states is not None else PseudoAntichain.full(domain)
        self._enabled_override = None
        self._premax_cache = {}
        self._enabled_cache = {}
        self._action_index = {a: i for i, a in enumerate(self.actions)}

    # -- to implement --------------------------------------------------------

    def _pre_max(self, x, action, tau):
        raise NotImplementedError

    def succ(self, s, action, tau):
        raise NotImplementedError

    def dist_partition(self, action):
        raise NotImplementedError

    def cost_partition(self, action):
        raise NotImplementedError

    # -- derived -------------------------------------------------------------

    def action_index(self, action):
        return self._action_index[action]

    def pre_max(self, x, action, tau):
        key = (x, action, tau)
        r = self._premax_cache.get(key)
        if r is None:
            r = self._premax_cache[key] = maximal(self.domain, self._pre_max(x, action, tau))
        return r

    def raw_pre(self, A, action, tau):
        """Predecessors ignoring any restriction of the enabled sets."""
        d = self.domain
        elems = []
        for x, alpha in A.elements:
            tops = self.pre_max(x, action, tau)
            if not tops:
                continue
            excl = []
            for a in alpha:
                excl.extend(self.pre_max(a, action, tau))
            excl = tuple(excl)
            for t in tops:
                elems.append((t, excl))
        return PseudoAntichain(d, elems)

    def pre_star(self, A, action, tau):
        """States enabling ``action`` whose ``tau`` successor lies in ``A``."""
        P = self.raw_pre(A, action, tau)
        if self._enabled_override is not None:
            P = pa_intersect(P, self._enabled_override[action])
        return P

    def states_enabling(self, action):
        """``S_σ``, memoized."""
        r = self._enabled_cache.get(action)
        if r is None:
            if self._enabled_override is not None:
                r = self._enabled_override[action]
            else:
                r = pa_intersect(self.raw_pre(self.states, action, self.stochastic[0]), self.states)
            self._enabled_cache[action] = r
        return r

    def enabled(self, s, action):
        return s in self.states_enabling(action)

    def enabled_actions(self, s):
        return [a for a in self.actions if self.enabled(s, a)]

    def distribution(self, s, action):
        """``{tau: probability}`` at ``s``; raises if ``action`` is disabled."""
        for block, dist in self.dist_partition(action):
            if s in block:
                return dist
        raise ActionDisabledError(f"action {action!r} disabled in {self.domain.render(s)!r}")

    def cost(self, s, action):
        for block, c in self.cost_partition(action):
            if s in block:
                return c
        raise ActionDisabledError(f"action {action!r} disabled in {self.domain.render(s)!r}")

    def successors(self, s, action):
        """``[(state, probability)]`` with probabilities of equal states summed."""
        out = {}
        for tau, p in self.distribution(s, action).items():
            if p:
                t = self.succ(s, action, tau)
                out[t] = out.get(t, Fraction(0)) + p
        return list(out.items())

    def restricted(self, states, enabled):
        """Copy with state space ``states`` and enabled sets ``enabled[action]``."""
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.states = states
        clone._enabled_override = dict(enabled)
        clone._enabled_cache = {}
        return clone

    def support(self, action):
        """Stochastic actions with positive probability somewhere for ``action``."""
        seen = []
        for _, dist in self.dist_partition(action):
            for tau, p in dist.items():
                if p and tau not in seen:
                    seen.append(tau)
        return seen


class CostModel:
    """Cost view of an MDP with an optimization direction.

    Maximization is handled by negating costs, so solvers always minimize.
    """

    def __init__(self, mdp, direction="minimize"):
        if direction not in ("minimize", "maximize"):
            raise ValueError(f"unknown direction {direction!r}")
        self.mdp = mdp
        self.direction = direction
        self._sign = 1 if direction == "minimize" else -1

    def partition(self, action):
        """Cost blocks of ``action`` with the sign used for minimization."""
        if self._sign == 1:
            return self.mdp.cost_partition(action)
        return [(b, -c) for b, c in self.mdp.cost_partition(action)]

    def signed(self, value):
        return value * self._sign

    def positive_costs(self):
        return all(c > 0 for a in self.mdp.actions for _, c in self.partition(a))


def pre_union(mdp, A, action, taus):
    """Union of predecessor sets over several stochastic actions."""
    out = PseudoAntichain.empty(mdp.domain)
    for tau in taus:
        out = out | mdp.pre_star(A, action, tau)
    return out
