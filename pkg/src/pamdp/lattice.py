"""Antichains and pseudo-antichains over a finite lower semilattice.

A domain supplies the order, the meet and a few helpers.  An antichain is a
sorted tuple of pairwise incomparable elements.  A pseudo-element is a couple
``(x, alpha)`` denoting the set of states below ``x`` and not below any member
of ``alpha``; a pseudo-antichain is a simplified collection of such couples and
denotes the union of their sets.
"""

from itertools import product


class Domain:
    """Interface of a finite lower semilattice.

    ``height`` must be strictly monotone (``a`` strictly below ``b`` implies
    ``height(a) < height(b)``); it lets maximal-element filtering run in one
    pass instead of a quadratic scan.
    """

    def leq(self, a, b):
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def height(self, a):
        raise NotImplementedError

    def key(self, a):
        return a

    def top(self):
        """Antichain of the maximal elements of the whole domain."""
        raise NotImplementedError

    def elements(self):
        """Iterate over every element (used by enumeration oracles only)."""
        raise NotImplementedError

    def size(self):
        raise NotImplementedError

    def render(self, a):
        return a


class BitsetDomain(Domain):
    """Subsets of ``n`` propositions encoded as int bitmasks, ordered by ``⊇``.

    ``a`` is below ``b`` when ``a`` contains ``b``, so the meet is the union and
    the single top element is the empty set.
    """

    def __init__(self, n, names=None):
        self.n = n
        self.names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(n))
        if len(self.names) != n:
            raise ValueError("one name per proposition required")
        self._full = (1 << n) - 1

    def leq(self, a, b):
        return b & ~a == 0

    def meet(self, a, b):
        return a | b

    def height(self, a):
        return -a.bit_count()

    def top(self):
        return (0,)

    def elements(self):
        return range(1 << self.n)

    def size(self):
        return 1 << self.n

    def mask(self, names):
        index = {name: i for i, name in enumerate(self.names)}
        m = 0
        for name in names:
            m |= 1 << index[name]
        return m

    def render(self, a):
        return [self.names[i] for i in range(self.n) if a >> i & 1]

    def __eq__(self, other):
        return isinstance(other, BitsetDomain) and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"BitsetDomain({self.n})"


class GridDomain(Domain):
    """Vectors in ``{0..bound}^dim`` ordered componentwise."""

    def __init__(self, dim, bound):
        self.dim = dim
        self.bound = bound

    def leq(self, a, b):
        return all(u <= v for u, v in zip(a, b))

    def meet(self, a, b):
        return tuple(min(u, v) for u, v in zip(a, b))

    def height(self, a):
        return sum(a)

    def top(self):
        return ((self.bound,) * self.dim,)

    def elements(self):
        return product(range(self.bound + 1), repeat=self.dim)

    def size(self):
        return (self.bound + 1) ** self.dim

    def render(self, a):
        return list(a)

    def __eq__(self, other):
        return isinstance(other, GridDomain) and (other.dim, other.bound) == (self.dim, self.bound)

    def __hash__(self):
        return hash((self.dim, self.bound))

    def __repr__(self):
        return f"GridDomain({self.dim}, {self.bound})"


# -- antichains ---------------------------------------------------------------


def maximal(d, elems):
    """Sorted antichain of the maximal elements of ``elems``."""
    leq = d.leq
    cand = sorted(set(elems), key=d.height, reverse=True)
    kept = []
    for e in cand:
        for k in kept:
            if leq(e, k):
                break
        else:
            kept.append(e)
    kept.sort(key=d.key)
    return tuple(kept)


def ac_member(d, s, alpha):
    leq = d.leq
    for a in alpha:
        if leq(s, a):
            return True
    return False


def ac_union(d, a1, a2):
    return maximal(d, a1 + a2)


def ac_intersect(d, a1, a2):
    meet = d.meet
    return maximal(d, [meet(x, y) for x in a1 for y in a2])


def ac_subset(d, a1, a2):
    """Whether the closure of ``a1`` is included in the closure of ``a2``."""
    return all(ac_member(d, x, a2) for x in a1)


# -- pseudo-elements ----------------------------------------------------------


def pe_canonicalize(d, x, alpha):
    """Canonical couple denoting the same set, or None if that set is empty."""
    meet = d.meet
    beta = maximal(d, [meet(x, a) for a in alpha])
    if x in beta:
        return None
    return (x, beta)


def pe_member(d, s, pe):
    x, alpha = pe
    return d.leq(s, x) and not ac_member(d, s, alpha)


def pe_subset(d, p, q):
    """Inclusion of pseudo-closures; ``p`` must be canonical."""
    x, alpha = p
    y, beta = q
    if not d.leq(x, y):
        return False
    meet, leq = d.meet, d.leq
    for b in beta:
        m = meet(b, x)
        for a in alpha:
            if leq(m, a):
                break
        else:
            return False
    return True


def pe_disjoint(d, p, q):
    x, alpha = p
    y, beta = q
    z = d.meet(x, y)
    return ac_member(d, z, alpha) or ac_member(d, z, beta)


def pe_difference(d, p, q):
    """List of canonical couples covering ``p`` minus ``q``."""
    if pe_disjoint(d, p, q):
        return [p]
    if pe_subset(d, p, q):
        return []
    x, alpha = p
    y, beta = q
    out = []
    c = pe_canonicalize(d, x, alpha + (y,))
    if c is not None:
        out.append(c)
    meet = d.meet
    for b in beta:
        c = pe_canonicalize(d, meet(x, b), alpha)
        if c is not None:
            out.append(c)
    return out


def simplify(d, pes):
    """Simplified tuple of couples with the same union as ``pes``.

    Couples are canonicalized, couples sharing their maximum are merged, and
    couples included in another one are dropped.
    """
    by_max = {}
    for x, alpha in pes:
        c = pe_canonicalize(d, x, alpha)
        if c is None:
            continue
        prev = by_max.get(x)
        by_max[x] = c[1] if prev is None else ac_intersect(d, prev, c[1])
    if len(by_max) <= 1:
        return tuple(by_max.items())
    height = d.height
    order = sorted(by_max.items(), key=lambda pe: height(pe[0]), reverse=True)
    kept = []
    for pe in order:
        for k in kept:
            if pe_subset(d, pe, k):
                break
        else:
            kept.append(pe)
    key = d.key
    kept.sort(key=lambda pe: (key(pe[0]), [key(a) for a in pe[1]]))
    return tuple(kept)


# -- pseudo-antichains --------------------------------------------------------


class PseudoAntichain:
    """Immutable simplified set of pseudo-elements.

    ``==`` compares representations; use :func:`pa_equal` for set equality.
    Operators ``|``, ``&``, ``-`` and ``in`` follow set semantics.
    """

    __slots__ = ("domain", "elements", "_hash")

    def __init__(self, domain, elements=(), simplified=False):
        self.domain = domain
        self.elements = tuple(elements) if simplified else simplify(domain, elements)
        self._hash = None

    @classmethod
    def closure(cls, domain, antichain):
        """Downward closure of an antichain."""
        return cls(domain, [(x, ()) for x in antichain])

    @classmethod
    def full(cls, domain):
        return cls.closure(domain, domain.top())

    @classmethod
    def empty(cls, domain):
        return cls(domain, (), simplified=True)

    def __bool__(self):
        return bool(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, s):
        return pa_member(s, self)

    def __or__(self, other):
        return pa_union(self, other)

    def __and__(self, other):
        return pa_intersect(self, other)

    def __sub__(self, other):
        return pa_difference(self, other)

    def __eq__(self, other):
        return isinstance(other, PseudoAntichain) and self.elements == other.elements

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.elements)
        return self._hash

    def is_closed(self):
        return all(not alpha for _, alpha in self.elements)

    def states(self):
        """Enumerate the denoted set (oracle use only)."""
        return [s for s in self.domain.elements() if pa_member(s, self)]

    def to_records(self):
        """Debug serialization: list of ``{max, excluded}`` records."""
        r = self.domain.render
        return [{"max": r(x), "excluded": [r(a) for a in alpha]} for x, alpha in self.elements]

    def __repr__(self):
        return f"PseudoAntichain({list(self.elements)!r})"


def pa_member(s, A):
    d = A.domain
    leq = d.leq
    for x, alpha in A.elements:
        if leq(s, x):
            for a in alpha:
                if leq(s, a):
                    break
            else:
                return True
    return False


def pa_is_empty(A):
    return not A.elements


def pa_union(A, B):
    if not A.elements:
        return B
    if not B.elements or A.elements == B.elements:
        return A
    return PseudoAntichain(A.domain, A.elements + B.elements)


def pa_union_all(domain, pas):
    elems = []
    for A in pas:
        elems.extend(A.elements)
    return PseudoAntichain(domain, elems)


def pa_intersect(A, B):
    if not A.elements or not B.elements:
        return PseudoAntichain.empty(A.domain)
    if A.elements == B.elements:
        return A
    d = A.domain
    meet, leq = d.meet, d.leq
    out = []
    for x, alpha in A.elements:
        for y, beta in B.elements:
            z = meet(x, y)
            ok = True
            for a in alpha:
                if leq(z, a):
                    ok = False
                    break
            if ok:
                for b in beta:
                    if leq(z, b):
                        ok = False
                        break
            if ok:
                out.append((z, alpha + beta))
    return PseudoAntichain(d, out)


def pa_difference(A, B):
    if not A.elements or not B.elements:
        return A
    d = A.domain
    out = []
    for p in A.elements:
        pieces = [p]
        for q in B.elements:
            nxt = []
            for r in pieces:
                nxt.extend(pe_difference(d, r, q))
            pieces = nxt
            if not pieces:
                break
            if len(pieces) > 1:
                pieces = list(simplify(d, pieces))
        out.extend(pieces)
    return PseudoAntichain(d, out)


def pa_subset(A, B):
    return not pa_difference(A, B).elements


def pa_equal(A, B):
    """Set equality, decided by two emptiness checks."""
    if A.elements == B.elements:
        return True
    return pa_subset(A, B) and pa_subset(B, A)


def pa_simplify(A):
    return PseudoAntichain(A.domain, A.elements)


def down_up_difference(d, alpha, beta):
    """``↓alpha \\ ↓beta`` as a pseudo-antichain."""
    return PseudoAntichain(d, [(x, tuple(beta)) for x in alpha])
