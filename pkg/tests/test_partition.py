import pytest

from conftest import pa, sem
from pamdp.lattice import GridDomain, PseudoAntichain
from pamdp.partition import (PartitionError, SymbolicPartition, check_partition, coarsen, override, partition_product,
                             refine_block)

G = GridDomain(2, 3)
FULL = PseudoAntichain.full(G)
LOW = pa(G, [((1, 3), []), ((3, 1), [])])
HIGH = FULL - LOW


def test_product_and_coarsen():
    P = SymbolicPartition(G, [(LOW, "a"), (HIGH, "b")])
    Q = SymbolicPartition(G, [(pa(G, [((3, 1), [])]), 1), (FULL - pa(G, [((3, 1), [])]), 2)])
    R = partition_product(P, Q)
    check_partition(R, FULL)
    assert sorted(R.payloads()) == [("a", 1), ("a", 2), ("b", 2)]
    merged = coarsen(SymbolicPartition(G, [(LOW, "x"), (HIGH, "x")]))
    assert len(merged) == 1 and sem(merged.blocks[0][0]) == sem(FULL)


def test_refine_block_and_override():
    P = SymbolicPartition(G, [(FULL, "a")])
    R = refine_block(P, 0, LOW, "b")
    check_partition(R, FULL)
    assert R.lookup((0, 0)) == "b" and R.lookup((3, 3)) == "a"
    O = override(R, pa(G, [((0, 3), [])]), "c")
    check_partition(O, FULL)
    assert O.lookup((0, 2)) == "c" and O.lookup((1, 0)) == "b"
    assert refine_block(P, 0, PseudoAntichain.empty(G), "z") is P


def test_check_partition_detects_overlap_and_gaps():
    with pytest.raises(PartitionError):
        check_partition(SymbolicPartition(G, [(FULL, 1), (LOW, 2)]))
    with pytest.raises(PartitionError):
        check_partition(SymbolicPartition(G, [(LOW, 1)]), FULL)


def test_lookup_and_locate():
    P = SymbolicPartition(G, [(LOW, "a"), (HIGH, "b")])
    assert P.locate((3, 3)) == 1
    with pytest.raises(KeyError):
        SymbolicPartition(G, [(LOW, "a")]).lookup((3, 3))
    assert P.to_records()[0]["payload"] == "a"
