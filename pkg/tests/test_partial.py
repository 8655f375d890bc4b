import itertools
from dataclasses import replace

import pytest

from lefkit.errors import (BoundExceeded, DuplicateElement, PreconditionFailed, UndecidedEquality,
                           WordTooLong)
from lefkit.finite import ISO, chain_semilattice, cyclic_group, left_zero, semigroups_of_order
from lefkit.partial import (BOTTOM, DegreeSpace, Exhausted, OrderSpace, Outside,
                            PartialTable, WrapInstance, Witnessed, accurate_set,
                            check_partial_associativity, designations, embed_search,
                            finite_lef_wrap, free_pattern, free_truncation_witness, induce,
                            is_accurate_tight, is_tight, projection_wrap, self_wrap, square_closure,
                            tighten, tighten_all, tighten_trace, verify_embedding, wrap_problems,
                            wrap_search, wrap_verify)
from lefkit.rewriting import aab_semigroup, bicyclic, tn_semigroup


def products(pt):
    return {(pt.elements[i], pt.elements[j]): pt.elements[k] for (i, j), k in pt.product.items()}


def junk_wrap():
    # H = the 2-chain {0 < 1}; D = the 3-chain with its top relabelled as a second copy of 1
    H = induce(chain_semilattice(2), [0, 1])
    return WrapInstance(chain_semilattice(3), (0, 1, 1), H)


# --- partial tables --------------------------------------------------------------------

def test_partial_associativity():
    assert check_partial_associativity(PartialTable(("x",), {})) is None
    assert check_partial_associativity(induce(bicyclic(), ["1", "a", "b", "ba"])) is None
    x, y, z, w, u, v = range(6)
    bad = PartialTable(tuple("xyzwuv"), {(x, y): z, (y, z): w, (z, z): u, (x, w): v})
    assert check_partial_associativity(bad) == (x, y, z)


def test_induce_bicyclic_pattern():
    pt = induce(bicyclic(), ["1", "a", "b", "ba"])
    p = products(pt)
    assert p[("a", "b")] == "1" and p[("b", "a")] == "ba"
    assert all(p[("1", h)] == h == p[(h, "1")] for h in pt.elements)
    # ba is idempotent in B, so ba*ba stays in the set
    assert p[("ba", "ba")] == "ba"
    assert pt.is_out_of_set(pt.index("a"), pt.index("a"))
    assert pt.is_out_of_set(pt.index("b"), pt.index("b"))


def test_induce_aab_pattern():
    pt = induce(aab_semigroup(), ["a", "b", "ab", "aba"])
    p = products(pt)
    assert p[("a", "ab")] == "a" and p[("a", "b")] == "ab" and p[("ab", "a")] == "aba"


def test_induce_free_pattern():
    pt = free_pattern(["a", "b", "ab"])
    assert products(pt) == {("a", "b"): "ab"}
    assert pt.ambient[(0, 0)] == "aa"


def test_induce_errors():
    with pytest.raises(DuplicateElement):
        induce(aab_semigroup(), ["a", "aab"])
    with pytest.raises(UndecidedEquality):
        induce(tn_semigroup(2), ["ba", "ab"])
    pt = induce(tn_semigroup(2), ["ba", "ab"], max_len=8, max_steps=10_000,
                unknown_as_distinct=True)
    assert pt.size == 2


def test_induce_from_table_matches_table(iso_upto4):
    for t in iso_upto4[:40]:
        pt = induce(t, list(t.elements()))
        assert len(pt.product) == t.order ** 2
        assert all(t.rows[i][j] == k for (i, j), k in pt.product.items())


# --- embeddings ---------------------------------------------------------------------------

def test_free_truncation_witness():
    w = free_truncation_witness(["a"], 1)
    assert w.target.order == 2
    w = free_truncation_witness(["a", "b", "ab"], 2)
    assert w.target.order == 7
    assert verify_embedding(free_pattern(["a", "b", "ab"]), w)
    w = free_truncation_witness(["a", "b", "ab", "ba"], 2)
    assert verify_embedding(free_pattern(["a", "b", "ab", "ba"]), w)
    with pytest.raises(WordTooLong):
        free_truncation_witness(["aba"], 2)


def test_embed_search_finds_verified_witness():
    pt = free_pattern(["a", "b", "ab"])
    found = embed_search(pt, OrderSpace(5))
    assert isinstance(found, Witnessed)
    assert verify_embedding(pt, found.witness)
    found = embed_search(pt, DegreeSpace(3))
    assert isinstance(found, Witnessed) and verify_embedding(pt, found.witness)


def test_verify_embedding_negative():
    pt = free_pattern(["a", "b", "ab"])
    w = free_truncation_witness(["a", "b", "ab"], 2)
    a, b, ab = w.assignment
    assert not verify_embedding(pt, replace(w, assignment=(a, a, ab)))
    other = next(x for x in range(w.target.order) if x not in (a, b, ab))
    assert not verify_embedding(pt, replace(w, assignment=(a, b, other)))


def test_exhausted_is_reproducible():
    pt = induce(aab_semigroup(), ["a", "b", "ab", "aba"])
    first = embed_search(pt, OrderSpace(4))
    assert isinstance(first, Exhausted)
    assert embed_search(pt, OrderSpace(4)) == first
    assert first.targets == sum(len(semigroups_of_order(n, ISO)) for n in range(1, 5))


def test_embed_search_bound():
    with pytest.raises(BoundExceeded):
        embed_search(free_pattern(["a"]), OrderSpace(9))


def test_subsets_of_finite_semigroups_embed():
    for n in range(1, 4):
        for t in semigroups_of_order(n, ISO):
            for r in range(1, n + 1):
                for H in itertools.combinations(range(n), r):
                    pt = induce(t, H)
                    found = embed_search(pt, OrderSpace(n))
                    assert isinstance(found, Witnessed) and verify_embedding(pt, found.witness)


# --- wraps ------------------------------------------------------------------------------------

def test_self_wrap_verifies():
    for t in (left_zero(2), cyclic_group(3), chain_semilattice(3)):
        assert wrap_verify(self_wrap(t))
        assert wrap_verify(self_wrap(t, [0]))


def test_broken_labeling_fails():
    wi = self_wrap(cyclic_group(3))
    bad = replace(wi, labeling=(1, 0, 2))
    assert not wrap_verify(bad) and wrap_problems(bad)
    uncovered = replace(wi, labeling=(0, 1, Outside("2")))
    assert not wrap_verify(uncovered)


def test_wrap_search_self_wrap():
    t = chain_semilattice(2)
    pt = induce(t, [0, 1])
    found = wrap_search(pt, 2)
    assert isinstance(found, Witnessed) and wrap_verify(found.witness)


def test_finite_lef_wraps_verify(iso_upto4):
    for t in iso_upto4[:60]:
        for r in range(1, t.order + 1):
            for H in itertools.combinations(range(t.order), r):
                wi = finite_lef_wrap(t, H)
                assert wrap_verify(wi)
                assert is_accurate_tight(wi)


def test_finite_lef_wrap_by_search():
    t = semigroups_of_order(3, ISO)[7]
    wi = finite_lef_wrap(t, [0, 1], search=True)
    assert wrap_verify(wi)


def test_square_closure():
    assert square_closure(cyclic_group(4), [1]) == [1, 2]


# --- accurate sets and tightening ----------------------------------------------------------------

def test_accurate_set_self_wrap():
    wi = self_wrap(cyclic_group(3))
    assert accurate_set(wi) == {0, 1, 2}


def test_junk_is_excluded_and_tightened():
    wi = junk_wrap()
    assert wrap_verify(wi)
    assert accurate_set(wi) == {0, 1}
    t = tighten(wi)
    assert t.labeling == (0, 1, BOTTOM)
    assert wrap_verify(t) and is_accurate_tight(t)
    assert tighten(t) == t


def test_tighten_fixpoint_unchanged():
    wi = self_wrap(chain_semilattice(3))
    assert tighten(wi).labeling == wi.labeling


def test_tighten_trace_strictly_shrinks():
    wi = projection_wrap(chain_semilattice(2), cyclic_group(2))
    trace = tighten_trace(wi)
    sizes = [len(w.h_preimage()) for w in trace]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    assert all(wrap_verify(w) for w in trace)


def test_tighten_rejects_sink_in_h():
    wi = junk_wrap()
    with pytest.raises(PreconditionFailed):
        tighten(wi, sink=Outside("0"))


def test_tight_over_all_designations():
    wi = projection_wrap(left_zero(2), cyclic_group(2))
    assert len(list(designations(wi))) == 4
    t = tighten_all(wi)
    assert is_tight(t) and wrap_verify(t)
    assert all(len(t.preimages(h)) >= 1 for h in range(t.H.size))
    with pytest.raises(BoundExceeded):
        list(designations(wi, cap=2))
