import itertools
from dataclasses import replace

import pytest

from lefkit.finite import (ISO, CayleyTable, canonical_form, chain_semilattice, cyclic_group,
                           direct_product, left_zero, semigroups_of_order)
from lefkit.obstructions import (LAWS, ONE_SIDED_UNIT, PPQ, PPQ_COMMUTES, PROB, SIX_SET,
                                 EqualityFound, SeparationHolds, check_law, detect_obstruction,
                                 law_holds_at, law_ppq, law_prob, law_six_set,
                                 power_counterexample_check, prob_exponents,
                                 random_transformation_scan, scan_law, tn_separation, tn_words,
                                 verify_certificate)
from lefkit.partial import Exhausted, OrderSpace, PartialTable, embed_search, free_pattern, induce
from lefkit.rewriting import aab_semigroup, bicyclic


def mul(rows, *xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = rows[acc][x]
    return acc


def pw(rows, s, k):
    return mul(rows, *[s] * k)


# Plain restatements of the laws, used as oracles for the table checkers.
def ppq_ok(r, p, q):
    return mul(r, p, p, q) != p or mul(r, p, q, p) == p


def six_ok(r, p, q):
    qp = mul(r, q, p)
    if mul(r, q, p, p, q) != qp:
        return True
    return mul(r, q, p, q) == qp or r[mul(r, q, p, q)][mul(r, q, p, p)] == qp


def prob_ok(r, p, q, n):
    qp, pq = r[q][p], r[p][q]
    if r[qp][pw(r, pq, n)] != pw(r, qp, n):
        return True
    ms = [m for m in range(1, n * n + 2 * n) if m % n != 0]
    return any(mul(r, qp, qp, pw(r, pq, m)) == mul(r, qp, pw(r, pq, m), qp) for m in ms)


def least_failure(t, ok):
    for p, q in itertools.product(range(t.order), repeat=2):
        if not ok(t.rows, p, q):
            return (p, q)
    return None


def prob_pattern():
    # yx acts as an idempotent, xy swaps yx and r, and r(yx) leaves the set
    names = ("x", "y", "xy", "yx", "r", "s")
    x, y, xy, yx, r, s = range(6)
    product = {(x, y): xy, (y, x): yx, (yx, yx): yx, (yx, xy): r, (r, xy): yx, (r, yx): s}
    return PartialTable(names, product)


# --- law checkers ---------------------------------------------------------------------

def test_prob_exponents():
    assert prob_exponents(2) == [1, 3, 5, 7]
    assert prob_exponents(3) == [1, 2, 4, 5, 7, 8, 10, 11, 13, 14]


def test_groups_satisfy_all_laws():
    for n in range(1, 6):
        t = cyclic_group(n)
        assert law_ppq(t) is None and law_six_set(t) is None and law_prob(t) is None


def test_small_examples():
    assert law_six_set(CayleyTable(((0,),))) is None
    assert law_six_set(left_zero(2)) is None
    assert law_prob(chain_semilattice(3)) is None
    with pytest.raises(ValueError):
        law_prob(left_zero(2), 1)


def test_checkers_match_oracles_order3():
    for t in semigroups_of_order(3):
        assert law_ppq(t) == least_failure(t, ppq_ok)
        assert law_six_set(t) == least_failure(t, six_ok)
        assert law_prob(t, 2) == least_failure(t, lambda r, p, q: prob_ok(r, p, q, 2))
        assert law_prob(t, 3) == least_failure(t, lambda r, p, q: prob_ok(r, p, q, 3))


def test_commuting_control_is_false():
    t = left_zero(2)
    pq = check_law(PPQ_COMMUTES, t)
    assert pq is not None and not law_holds_at(PPQ_COMMUTES, t, *pq)


def test_law_holds_at_agrees_with_checkers():
    for t in (direct_product(left_zero(2), cyclic_group(2)), *semigroups_of_order(3, ISO)):
        for law in LAWS:
            fails = [pq for pq in itertools.product(range(t.order), repeat=2)
                     if not law_holds_at(law, t, *pq)]
            assert check_law(law, t) == (fails[0] if fails else None)


def test_scans_small_orders():
    for law in (PPQ, SIX_SET, PROB):
        rep = scan_law(law, 3)
        assert rep.holds and rep.scanned == 1 + 8 + 113
    assert scan_law(PROB, 3, n=3).holds


def test_labeled_and_iso_scans_agree():
    lab = scan_law(PPQ_COMMUTES, 3, keep=10**6)
    iso = scan_law(PPQ_COMMUTES, 3, ISO, keep=10**6)
    assert not lab.holds and not iso.holds
    assert {canonical_form(CayleyTable(rows)) for rows, _ in lab.counterexamples} == \
        {CayleyTable(rows) for rows, _ in iso.counterexamples}


def test_random_transformation_scan():
    rep = random_transformation_scan(PPQ, 3, 30, seed=1)
    assert rep.holds and rep.scanned == 30


def test_unknown_law():
    with pytest.raises(KeyError):
        scan_law("nope", 2)


# --- obstruction patterns ------------------------------------------------------------------

def test_ppq_pattern_in_aab():
    pt = induce(aab_semigroup(), ["a", "b", "ab", "aba"])
    (cert,) = detect_obstruction(pt)
    assert cert.pattern == PPQ and cert.roles() == {"x": "a", "y": "b", "xy": "ab", "xyx": "aba"}
    assert verify_certificate(pt, cert)


def test_one_sided_unit_in_bicyclic():
    pt = induce(bicyclic(), ["1", "a", "b", "ba"])
    certs = detect_obstruction(pt)
    assert [c.pattern for c in certs] == [ONE_SIDED_UNIT]
    assert certs[0].roles() == {"1": "1", "a": "a", "b": "b", "ba": "ba"}


def test_six_set_in_bicyclic():
    pt = induce(bicyclic(), ["a", "b", "ba", "baa", "bbaa"])
    certs = [c for c in detect_obstruction(pt) if c.pattern == SIX_SET]
    # x=a, y=b: yxy = bab = b differs from ba, and (bab)(baa) = bbaa does too
    assert {"x": "a", "y": "b", "yx": "ba", "yxx": "baa", "yxy": "b",
            "(yxy)(yxx)": "bbaa"} in [c.roles() for c in certs]
    assert all(verify_certificate(pt, c) for c in certs)


def test_prob_pattern():
    pt = prob_pattern()
    certs = detect_obstruction(pt)
    assert [(c.pattern, c.n) for c in certs] == [(PROB, 2)]
    assert certs[0].roles() == {"x": "x", "y": "y", "xy": "xy", "yx": "yx"}
    # without r(yx) a required product is missing and the pattern does not apply
    product = dict(pt.product)
    del product[(4, 3)]
    assert detect_obstruction(PartialTable(pt.elements, product)) == []


def test_no_pattern_in_free_sets():
    assert detect_obstruction(free_pattern(["a", "b", "ab", "ba"])) == []


def test_tampered_certificate_rejected():
    pt = induce(aab_semigroup(), ["a", "b", "ab", "aba"])
    (cert,) = detect_obstruction(pt)
    assert not verify_certificate(pt, replace(cert, matched=(("x", "b"),) + cert.matched[1:]))


def test_certified_patterns_do_not_embed():
    pts = [induce(aab_semigroup(), ["a", "b", "ab", "aba"]),
           induce(bicyclic(), ["1", "a", "b", "ba"]),
           induce(bicyclic(), ["a", "b", "ba", "baa", "bbaa"]),
           prob_pattern()]
    for pt in pts:
        assert detect_obstruction(pt)
        assert isinstance(embed_search(pt, OrderSpace(4)), Exhausted)


# --- T_n and the power semigroup ---------------------------------------------------------

def test_tn_words():
    assert tn_words(2, 1) == ("baabba", "babaab")


def test_tn_separation_small():
    for m in (1, 3):
        res = tn_separation(2, m)
        assert isinstance(res, SeparationHolds) and not isinstance(res, EqualityFound)
        assert res.search.exhausted


@pytest.mark.parametrize("n,m", [(2, 2), (2, 0), (1, 1), (3, 6)])
def test_tn_separation_rejects_bad_input(n, m):
    with pytest.raises(ValueError):
        tn_separation(n, m)


def test_power_check_small():
    rep = power_counterexample_check(5)
    assert rep.ok and rep.orbit == ("a", "aab", "aaabb", "aabab")
    with pytest.raises(ValueError):
        power_counterexample_check(4)
