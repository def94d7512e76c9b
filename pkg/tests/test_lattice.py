from hypothesis import given
from hypothesis import strategies as st

from conftest import pa, sem
from pamdp.lattice import (BitsetDomain, GridDomain, PseudoAntichain, ac_intersect, ac_member, ac_subset, ac_union,
                           down_up_difference, maximal, pa_difference, pa_equal, pa_intersect, pa_member, pa_subset,
                           pa_union, pe_canonicalize, pe_subset)

G5 = GridDomain(2, 5)


def grid_points(bound=5):
    return st.tuples(st.integers(0, bound), st.integers(0, bound))


def grid_pes(bound=5):
    return st.lists(st.tuples(grid_points(bound), st.lists(grid_points(bound), max_size=3)), max_size=4)


def bit_pes(n):
    pt = st.integers(0, (1 << n) - 1)
    return st.lists(st.tuples(pt, st.lists(pt, max_size=3)), max_size=4)


def test_grid_order_and_meet():
    assert G5.leq((1, 2), (3, 2))
    assert not G5.leq((1, 3), (3, 2))
    assert G5.meet((1, 3), (3, 2)) == (1, 2)
    assert G5.top() == ((5, 5),)


def test_bitset_order_is_reverse_inclusion():
    d = BitsetDomain(3, "abc")
    ab, a = d.mask("ab"), d.mask("a")
    assert d.leq(ab, a) and not d.leq(a, ab)
    assert d.meet(a, d.mask("c")) == d.mask("ac")
    assert d.top() == (0,)
    assert d.render(ab) == ["a", "b"]


def test_antichain_intersection_example():
    assert set(ac_intersect(G5, ((2, 1), (0, 3)), ((1, 2),))) == {(1, 1), (0, 2)}


def test_antichain_basics():
    assert maximal(G5, [(1, 1), (2, 2), (0, 3), (2, 2)]) == ((0, 3), (2, 2))
    assert ac_member(G5, (1, 1), ((2, 2),))
    assert not ac_member(G5, (3, 0), ((2, 2),))
    assert ac_union(G5, ((1, 1),), ((2, 2),)) == ((2, 2),)
    assert ac_subset(G5, ((1, 1), (0, 2)), ((2, 2),))
    assert not ac_subset(G5, ((3, 0),), ((2, 2),))


def test_canonical_form_example():
    assert pe_canonicalize(G5, (2, 2), ((1, 3),)) == ((2, 2), ((1, 2),))
    assert pe_canonicalize(G5, (2, 2), ((2, 3),)) is None


def test_pseudo_closure_example():
    A = pa(G5, [((3, 2), [(2, 1), (0, 2)])])
    assert sem(A) == {(3, 2), (3, 1), (3, 0), (2, 2), (1, 2)}


def test_difference_example():
    D = pa_difference(pa(G5, [((2, 2), [])]), pa(G5, [((1, 3), [])]))
    assert D.elements == (((2, 2), ((1, 2),)),)


def test_down_closure_difference_is_pseudo_closure():
    alpha, beta = ((3, 1), (1, 4)), ((2, 2), (0, 5))
    down = lambda ac: {p for p in G5.elements() if ac_member(G5, p, ac)}
    assert sem(down_up_difference(G5, alpha, beta)) == down(alpha) - down(beta)


def test_records():
    A = pa(G5, [((3, 2), [(2, 1)])])
    assert A.to_records() == [{"max": [3, 2], "excluded": [[2, 1]]}]


def _check_simplified(A):
    d = A.domain
    xs = [x for x, _ in A.elements]
    assert len(set(xs)) == len(xs)
    for p in A.elements:
        assert pe_canonicalize(d, *p) == p
        for q in A.elements:
            if p != q:
                assert not pe_subset(d, p, q)


@given(grid_pes(), grid_pes(), grid_points())
def test_grid_operations_match_sets(p, q, s):
    A, B = pa(G5, p), pa(G5, q)
    a, b = sem(A), sem(B)
    for R, expect in ((pa_union(A, B), a | b), (pa_intersect(A, B), a & b), (pa_difference(A, B), a - b)):
        _check_simplified(R)
        assert sem(R) == expect
    assert pa_member(s, A) == (s in a)
    assert pa_subset(A, B) == (a <= b)
    assert pa_equal(A, B) == (a == b)


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), bit_pes(n), bit_pes(n))))
def test_bitset_operations_match_sets(args):
    n, p, q = args
    d = BitsetDomain(n)
    A, B = pa(d, p), pa(d, q)
    a, b = sem(A), sem(B)
    assert sem(A | B) == a | b
    assert sem(A & B) == a & b
    assert sem(A - B) == a - b
    assert pa_subset(A, B) == (a <= b)


@given(grid_points(), st.lists(grid_points(), max_size=3), grid_points(), st.lists(grid_points(), max_size=3))
def test_pseudo_element_inclusion(x, alpha, y, beta):
    p = pe_canonicalize(G5, x, tuple(alpha))
    q = pe_canonicalize(G5, y, tuple(beta))
    if p is None or q is None:
        return
    assert pe_subset(G5, p, q) == (sem(PseudoAntichain(G5, [p])) <= sem(PseudoAntichain(G5, [q])))


def test_full_and_empty():
    d = BitsetDomain(3)
    assert len(sem(PseudoAntichain.full(d))) == 8
    assert not PseudoAntichain.empty(d)
    assert PseudoAntichain.full(d).is_closed()
