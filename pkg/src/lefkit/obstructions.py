"""Laws of finite semigroups, law scanners and non-embeddability patterns.

Each law is a predicate on a pair (p, q) of elements of a Cayley table; a
violation at a pair is a counterexample.  The patterns in
:func:`detect_obstruction` are partial-table shapes which, if embedded in a
finite semigroup, would violate one of these laws (or the fact that one-sided
units of finite monoids are two-sided).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .finite import (LABELED, CayleyTable, enumerate_semigroups, transformation_closure,
                     Transformation)
from .partial import PartialTable
from .rewriting import (Equal, Step, Unknown, abab_monoid, congruence_search, generate_orbit,
                        normal_form, power_word, tn_semigroup, wa_shape_check)

PPQ = "ppq"
SIX_SET = "six-set"
PROB = "prob"
ONE_SIDED_UNIT = "one-sided-unit"
PPQ_COMMUTES = "ppq-commutes"   # false law, kept as a control for the scanners


# --- laws -----------------------------------------------------------------------

def violates_ppq(t: CayleyTable, p: int, q: int) -> bool:
    r = t.rows
    return r[r[p][p]][q] == p and r[r[p][q]][p] != p


def violates_six_set(t: CayleyTable, p: int, q: int) -> bool:
    r = t.rows
    qp = r[q][p]
    qpp = r[qp][p]
    if r[qpp][q] != qp:
        return False
    qpq = r[qp][q]
    return qpq != qp and r[qpq][qpp] != qp


def prob_exponents(n: int) -> list[int]:
    """The admissible m: 1 <= m < n^2 + 2n with n not dividing m."""
    return [m for m in range(1, n * n + 2 * n) if m % n]


def violates_prob(t: CayleyTable, p: int, q: int, n: int = 2) -> bool:
    r = t.rows
    qp, pq = r[q][p], r[p][q]
    top = n * n + 2 * n
    pq_pow = [None, pq]
    for _ in range(top):
        pq_pow.append(r[pq_pow[-1]][pq])
    qp_n = qp
    for _ in range(n - 1):
        qp_n = r[qp_n][qp]
    if r[qp][pq_pow[n]] != qp_n:
        return False
    qp2 = r[qp][qp]
    return all(r[qp2][pq_pow[m]] != r[r[qp][pq_pow[m]]][qp] for m in prob_exponents(n))


def violates_ppq_commutes(t: CayleyTable, p: int, q: int) -> bool:
    r = t.rows
    return r[r[p][p]][q] == p and r[p][q] != r[q][p]


def _least(t: CayleyTable, pred) -> tuple[int, int] | None:
    for p, q in itertools.product(range(t.order), repeat=2):
        if pred(t, p, q):
            return (p, q)
    return None


def law_ppq(table: CayleyTable) -> tuple[int, int] | None:
    """Least (p, q) with ppq = p but pqp != p."""
    return _least(table, violates_ppq)


def law_six_set(table: CayleyTable) -> tuple[int, int] | None:
    """Least (p, q) with qppq = qp but neither qpq = qp nor (qpq)(qpp) = qp."""
    return _least(table, violates_six_set)


def law_prob(table: CayleyTable, n: int = 2) -> tuple[int, int] | None:
    """Least (p, q) with (qp)(pq)^n = (qp)^n and (qp)^2(pq)^m != (qp)(pq)^m(qp) for every admissible m."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return _least(table, lambda t, p, q: violates_prob(t, p, q, n))


def law_ppq_commutes(table: CayleyTable) -> tuple[int, int] | None:
    """ppq = p implies pq = qp.  This is false in general; used as a scanner control."""
    return _least(table, violates_ppq_commutes)


LAWS: dict[str, Callable] = {
    PPQ: law_ppq,
    SIX_SET: law_six_set,
    PROB: law_prob,
    PPQ_COMMUTES: law_ppq_commutes,
}


def check_law(law: str, table: CayleyTable, n: int = 2):
    if law not in LAWS:
        raise KeyError(f"unknown law {law!r}; choose from {sorted(LAWS)}")
    if law == PROB:
        return law_prob(table, n)
    return LAWS[law](table)


def law_holds_at(law: str, table: CayleyTable, p: int, q: int, n: int = 2) -> bool:
    """Independent re-evaluation through :meth:`CayleyTable.mul`."""
    m = table.mul
    if law in (PPQ, PPQ_COMMUTES):
        if m(p, p, q) != p:
            return True
        return m(p, q, p) == p if law == PPQ else m(p, q) == m(q, p)
    if law == SIX_SET:
        if m(q, p, p, q) != m(q, p):
            return True
        return m(q, p, q) == m(q, p) or m(m(q, p, q), m(q, p, p)) == m(q, p)
    if law == PROB:
        qp, pq = m(q, p), m(p, q)
        if m(qp, table.power(pq, n)) != table.power(qp, n):
            return True
        return any(m(qp, qp, table.power(pq, k)) == m(qp, table.power(pq, k), qp)
                   for k in prob_exponents(n))
    raise KeyError(law)


@dataclass
class LawReport:
    law: str
    space: dict
    counterexamples: list = field(default_factory=list)   # (rows, (p, q)) pairs
    scanned: int = 0
    total_counterexamples: int = 0

    @property
    def holds(self) -> bool:
        return self.total_counterexamples == 0


def _scan_chunk(args):
    law, n, tables = args
    hits = []
    for rows in tables:
        w = check_law(law, CayleyTable(rows), n)
        if w is not None:
            hits.append((rows, w))
    return hits


def scan_law(law: str, max_order: int, mode: str = LABELED, *, n: int = 2, jobs: int = 1,
             min_order: int = 1, keep: int = 100) -> LawReport:
    """Evaluate ``law`` on every enumerated table of order min_order..max_order.

    Every counterexample is re-checked with :func:`law_holds_at` before it is
    reported; at most ``keep`` are stored, all are counted.
    """
    if law not in LAWS:
        raise KeyError(f"unknown law {law!r}; choose from {sorted(LAWS)}")
    report = LawReport(law, {"kind": "enumerated", "mode": mode, "orders": [min_order, max_order]}
                       | ({"n": n} if law == PROB else {}))
    for order in range(min_order, max_order + 1):
        tables = [t.rows for t in enumerate_semigroups(order, mode)]
        report.scanned += len(tables)
        if jobs > 1 and len(tables) > 1000:
            from concurrent.futures import ProcessPoolExecutor
            size = -(-len(tables) // (4 * jobs))
            chunks = [(law, n, tables[i:i + size]) for i in range(0, len(tables), size)]
            with ProcessPoolExecutor(jobs) as ex:
                hits = [h for part in ex.map(_scan_chunk, chunks) for h in part]
        else:
            hits = _scan_chunk((law, n, tables))
        for rows, (p, q) in sorted(hits):
            if law_holds_at(law, CayleyTable(rows), p, q, n):
                raise AssertionError(f"scanner reported a pair that satisfies {law}: {rows} {(p, q)}")
            report.total_counterexamples += 1
            if len(report.counterexamples) < keep:
                report.counterexamples.append((rows, (p, q)))
    return report


def random_transformation_scan(law: str, degree: int, samples: int, seed: int = 0, *,
                               n: int = 2, cap: int = 5000) -> LawReport:
    """Check ``law`` on closures of random generator pairs in T_degree."""
    rng = random.Random(seed)
    report = LawReport(law, {"kind": "random-transformation-pairs", "degree": degree,
                             "samples": samples, "seed": seed})
    for _ in range(samples):
        gens = [Transformation(tuple(rng.randrange(degree) for _ in range(degree)))
                for _ in range(2)]
        ts = transformation_closure(gens, cap)
        report.scanned += 1
        w = check_law(law, ts.cayley, n)
        if w is not None:
            report.total_counterexamples += 1
            report.counterexamples.append((ts.cayley.rows, w))
    return report


# --- non-embeddable patterns ----------------------------------------------------

@dataclass(frozen=True)
class ObstructionCertificate:
    pattern: str
    matched: tuple[tuple[str, str], ...]   # (role, element name)
    reason: str
    n: int | None = None

    def roles(self) -> dict[str, str]:
        return dict(self.matched)


_REASONS = {
    PPQ: "x(xy) = x forces xy to commute with x in any finite semigroup, so (xy)x = x there",
    SIX_SET: "(yxx)y = yx forces yxy = yx or (yxy)(yxx) = yx in any finite semigroup",
    PROB: "(yx)(xy)^n = (yx)^n forces (yx)^2(xy)^m = (yx)(xy)^m(yx) for some admissible m "
          "in any finite semigroup",
    ONE_SIDED_UNIT: "a one-sided inverse of the identity of a finite monoid is two-sided, "
                    "so ab = 1 would force ba = 1",
}


def _match_ppq(pt: PartialTable):
    for x, y in itertools.product(range(pt.size), repeat=2):
        xy = pt.mul(x, y)
        xyx = pt.mul(xy, x)
        if xyx is None or pt.mul(x, xy) != x or xyx == x:
            continue
        yield {"x": x, "y": y, "xy": xy, "xyx": xyx}, None


def _match_six_set(pt: PartialTable):
    for x, y in itertools.product(range(pt.size), repeat=2):
        yx = pt.mul(y, x)
        yxx = pt.mul(yx, x)
        yxy = pt.mul(yx, y)
        last = pt.mul(yxy, yxx)
        if last is None or pt.mul(yxx, y) != yx:
            continue
        if yxy != yx and last != yx:
            yield {"x": x, "y": y, "yx": yx, "yxx": yxx, "yxy": yxy, "(yxy)(yxx)": last}, None


def _match_prob(pt: PartialTable, n: int):
    exps = prob_exponents(n)
    top = max(exps)
    for x, y in itertools.product(range(pt.size), repeat=2):
        xy, yx = pt.mul(x, y), pt.mul(y, x)
        if xy is None or yx is None:
            continue
        yx_n = pt.chain(*[yx] * n)
        yx2 = pt.mul(yx, yx)
        left = [pt.chain(yx, *[xy] * k) for k in range(top + 1)]       # (yx)(xy)^k
        sq = [pt.chain(yx2, *[xy] * k) if yx2 is not None else None
              for k in range(top + 1)]                                  # (yx)^2 (xy)^k
        needed = [yx_n, left[n]] + [sq[m] for m in exps] + [left[m] for m in exps]
        if any(v is None for v in needed):
            continue  # pattern inapplicable: a required power is missing
        if left[n] != yx_n:
            continue
        rights = [pt.mul(left[m], yx) for m in exps]
        if any(r is None for r in rights):
            continue
        if all(sq[m] != r for m, r in zip(exps, rights)):
            yield {"x": x, "y": y, "xy": xy, "yx": yx}, n


def _match_one_sided_unit(pt: PartialTable):
    for e in range(pt.size):
        for a, b in itertools.product(range(pt.size), repeat=2):
            if pt.mul(a, b) != e:
                continue
            ba = pt.mul(b, a)
            if ba is None or ba == e:
                continue
            if all(pt.mul(e, z) == z and pt.mul(z, e) == z for z in (e, a, b, ba)):
                yield {"1": e, "a": a, "b": b, "ba": ba}, None


def detect_obstruction(pt: PartialTable, prob_n: tuple[int, ...] = (2,)) -> list[ObstructionCertificate]:
    """Certificates for every known non-embeddable pattern found in ``pt``."""
    out = []
    matchers = [(PPQ, _match_ppq(pt)), (SIX_SET, _match_six_set(pt)),
                (ONE_SIDED_UNIT, _match_one_sided_unit(pt))]
    matchers += [(PROB, _match_prob(pt, n)) for n in prob_n]
    for pattern, found in matchers:
        for roles, n in found:
            matched = tuple((role, pt.elements[i]) for role, i in roles.items())
            out.append(ObstructionCertificate(pattern, matched, _REASONS[pattern], n))
    return out


def verify_certificate(pt: PartialTable, cert: ObstructionCertificate) -> bool:
    """Re-run the matcher and check the certificate is among its matches."""
    return cert in detect_obstruction(pt, (cert.n,) if cert.n else ())


# --- bounded separation in T_n ---------------------------------------------------

@dataclass(frozen=True)
class SeparationHolds:
    """No equality found within the bounds (bounded corroboration, not proof)."""
    n: int
    m: int
    search: Unknown


@dataclass(frozen=True)
class EqualityFound:
    n: int
    m: int
    path: tuple[Step, ...]


def tn_words(n: int, m: int) -> tuple[str, str]:
    """(ba)(ab)^m(ba) and (ba)^2(ab)^m."""
    return (power_word(("ba", 1), ("ab", m), ("ba", 1)), power_word(("ba", 2), ("ab", m)))


def tn_separation(n: int, m: int, max_len: int = 14, max_steps: int = 1_000_000):
    if n < 2:
        raise ValueError("n must be at least 2")
    if m < 1 or m % n == 0:
        raise ValueError(f"m must be positive and not divisible by n={n}")
    u, v = tn_words(n, m)
    res = congruence_search(u, v, tn_semigroup(n), max_len, max_steps)
    if isinstance(res, Equal):
        return EqualityFound(n, m, res.path)
    return SeparationHolds(n, m, res)


# --- the orbit of a -> aab inside the power semigroup of S_abab -------------------

@dataclass
class PowerCheckReport:
    max_len: int
    orbit: tuple[str, ...]
    factorises: bool
    closed: bool
    aabab_to_a: bool
    shapes_hold: bool
    aba_excluded: bool
    bad_words: list = field(default_factory=list)
    blockwise_failures: tuple[str, ...] = ()   # informational only

    @property
    def ok(self) -> bool:
        return self.factorises and self.closed and self.aabab_to_a and self.shapes_hold \
            and self.aba_excluded


def power_counterexample_check(max_len: int = 9) -> PowerCheckReport:
    """Check the orbit of ``a`` under a -> aab against the S_a S_a S_b = S_a argument.

    - every orbit word other than ``a`` is w1 w2 b with w1, w2 in the orbit;
    - conversely w1 w2 b stays in the orbit (within the length cap);
    - ``aabab`` reduces to ``a`` in S_abab, so ``a`` lies in S_a S_a S_b;
    - every orbit word has the shape checked by :func:`wa_shape_check`;
    - ``aba`` is irreducible in S_abab and fails that shape check.
    """
    if max_len < 5:
        raise ValueError("length cap must be at least 5")
    orbit = generate_orbit("a", ("a", "aab"), max_len)
    bad = []
    factorises = True
    for w in orbit:
        if w == "a":
            continue
        if not (w.endswith("b") and any(w[:k] in orbit and w[k:-1] in orbit
                                         for k in range(1, len(w) - 1))):
            factorises = False
            bad.append(("factor", w))
    closed = True
    for w1, w2 in itertools.product(orbit, repeat=2):
        w = w1 + w2 + "b"
        if len(w) <= max_len and w not in orbit:
            closed = False
            bad.append(("closure", w))
    shapes = [w for w in orbit if not wa_shape_check(w)]
    bad += [("shape", w) for w in shapes]
    blockwise = tuple(sorted(w for w in orbit if not wa_shape_check(w, cumulative=False)))
    sabab = abab_monoid()
    # aabab = (aab)(a)b with aab, a in the orbit
    aabab = "aab" in orbit and normal_form("aabab", sabab) == "a"
    aba = normal_form("aba", sabab) == "aba" and not wa_shape_check("aba") \
        and not wa_shape_check("aba", cumulative=False)
    return PowerCheckReport(max_len, tuple(sorted(orbit, key=lambda w: (len(w), w))),
                            factorises, closed, aabab, not shapes, aba, bad, blockwise)
