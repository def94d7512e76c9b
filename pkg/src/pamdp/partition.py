"""Symbolic partitions: blocks of pseudo-antichains carrying a payload.

Payloads are hashable values (an action, a cost, a distribution key, ...).
Blocks with equal payloads are allowed unless the partition is coarsened.
"""

from .lattice import pa_difference, pa_equal, pa_intersect, pa_union_all


class PartitionError(ValueError):
    pass


class SymbolicPartition:
    __slots__ = ("domain", "blocks")

    def __init__(self, domain, blocks=()):
        self.domain = domain
        self.blocks = [(B, v) for B, v in blocks if B]

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def carrier(self):
        return pa_union_all(self.domain, [B for B, _ in self.blocks])

    def locate(self, s):
        """Index of the block containing ``s``, or None."""
        for i, (B, _) in enumerate(self.blocks):
            if s in B:
                return i
        return None

    def lookup(self, s):
        i = self.locate(s)
        if i is None:
            raise KeyError(s)
        return self.blocks[i][1]

    def payloads(self):
        return [v for _, v in self.blocks]

    def restrict(self, region):
        return SymbolicPartition(self.domain, [(pa_intersect(B, region), v) for B, v in self.blocks])

    def to_records(self, render_payload=str):
        return [{"block": B.to_records(), "payload": render_payload(v)} for B, v in self.blocks]

    def __repr__(self):
        return f"SymbolicPartition({len(self.blocks)} blocks)"


def coarsen(P):
    """Merge blocks sharing the same payload; first occurrence fixes the order."""
    groups = {}
    for B, v in P.blocks:
        groups.setdefault(v, []).append(B)
    blocks = []
    for v, Bs in groups.items():
        blocks.append((Bs[0] if len(Bs) == 1 else pa_union_all(P.domain, Bs), v))
    return SymbolicPartition(P.domain, blocks)


def partition_product(P, Q, combine=lambda a, b: (a, b), merge=True):
    """Common refinement of two partitions of the same carrier.

    The payload of ``B ∩ C`` is ``combine(payload(B), payload(C))``; blocks
    with equal payloads are merged when ``merge`` is set.
    """
    blocks = []
    for B, u in P.blocks:
        for C, w in Q.blocks:
            I = pa_intersect(B, C)
            if I:
                blocks.append((I, combine(u, w)))
    R = SymbolicPartition(P.domain, blocks)
    return coarsen(R) if merge else R


def refine_block(P, i, C, payload):
    """Split block ``i`` into its part inside ``C`` (new payload) and the rest."""
    B, v = P.blocks[i]
    inside = pa_intersect(B, C)
    if not inside:
        return P
    rest = pa_difference(B, inside)
    blocks = list(P.blocks[:i]) + [(inside, payload)]
    if rest:
        blocks.append((rest, v))
    blocks += P.blocks[i + 1:]
    return SymbolicPartition(P.domain, blocks)


def override(P, C, payload):
    """Give ``payload`` to every state of ``C`` covered by ``P``."""
    blocks = []
    for B, v in P.blocks:
        inside = pa_intersect(B, C)
        if not inside:
            blocks.append((B, v))
            continue
        blocks.append((inside, payload))
        rest = pa_difference(B, inside)
        if rest:
            blocks.append((rest, v))
    return SymbolicPartition(P.domain, blocks)


def check_partition(P, carrier=None):
    """Raise unless blocks are non-empty, pairwise disjoint and cover ``carrier``."""
    for i, (B, _) in enumerate(P.blocks):
        if not B:
            raise PartitionError(f"block {i} is empty")
        for j in range(i):
            if pa_intersect(B, P.blocks[j][0]):
                raise PartitionError(f"blocks {j} and {i} overlap")
    if carrier is not None and not pa_equal(P.carrier(), carrier):
        raise PartitionError("blocks do not cover the carrier")
    return True


def single_block(carrier, payload):
    return SymbolicPartition(carrier.domain, [(carrier, payload)])


def empty_partition(domain):
    return SymbolicPartition(domain, ())
