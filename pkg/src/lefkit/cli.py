"""Command line interface: ``lefkit <verb> [options]``.

Exit codes: 0 success / expectation met, 1 counterexample or failed check or
expectation not met, 2 search exhausted without a decision, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import serialize as ser
from .config import load_bounds
from .errors import LefkitError
from .finite import (ISO, LABELED, CayleyTable, chain_semilattice, cyclic_group,
                     enumerate_semigroups, idempotent_set, left_zero, right_zero)
from .inverse import (as_inverse, brandt_b2, check_hmin_lemmas, check_wrap_inverse_compat,
                      ilef_from_wrap, ilef_lift, inverse_wrap, regular_map,
                      symmetric_inverse_monoid, symmetrise, wagner_preston)
from .obstructions import (LAWS, PROB, EqualityFound, detect_obstruction,
                           power_counterexample_check, scan_law, tn_separation)
from .partial import (DegreeSpace, OrderSpace, Witnessed, embed_search, finite_lef_wrap,
                      free_pattern, induce, is_accurate_tight, self_wrap, tighten, tighten_all,
                      wrap_search)
from .rewriting import (aab_semigroup, bicyclic, critical_pairs, is_locally_confluent,
                        normal_form, presentation, show_word)

OK, FAIL, UNKNOWN, INPUT = 0, 1, 2, 3

PATTERNS = {
    "bicyclic4": (bicyclic, ["1", "a", "b", "ba"]),
    "aab4": (aab_semigroup, ["a", "b", "ab", "aba"]),
    "sixset-B": (bicyclic, ["a", "b", "ba", "baa", "bbaa"]),
    "free3": (None, ["a", "b", "ab"]),
    "free4": (None, ["a", "b", "ab", "ba"]),
}


def builtin_pattern(name: str):
    if name not in PATTERNS:
        raise KeyError(f"unknown pattern {name!r}; choose from {sorted(PATTERNS)}")
    make, words = PATTERNS[name]
    return free_pattern(words) if make is None else induce(make(), words)


def load_table(spec: str) -> CayleyTable:
    """A builtin name (sim2, brandt, z<n>, chain<n>, left-zero<n>, right-zero<n>) or a JSON file."""
    if spec == "sim2":
        return symmetric_inverse_monoid(2).table.cayley
    if spec == "brandt":
        return brandt_b2().table.cayley
    m = re.fullmatch(r"(z|chain|left-zero|right-zero)(\d+)", spec)
    if m:
        make = {"z": cyclic_group, "chain": chain_semilattice, "left-zero": left_zero,
                "right-zero": right_zero}[m.group(1)]
        return make(int(m.group(2)))
    return ser.table_from_json(json.loads(Path(spec).read_text()))


def load_pattern(args):
    if args.pattern:
        return builtin_pattern(args.pattern)
    if args.input:
        doc = json.loads(Path(args.input).read_text())
        return ser.partial_from_json(doc.get("payload", doc).get("H", doc.get("payload", doc)))
    raise ValueError("give --pattern or --input")


def _ints(text: str | None):
    return None if text is None else [int(t) for t in text.split(",") if t.strip()]


def _expect(args, outcome: str, default_code: int) -> int:
    if args.expect is None:
        return default_code
    return OK if args.expect == outcome else FAIL


# --- verbs ----------------------------------------------------------------------------

def cmd_normal_form(args, bounds):
    rs = presentation(args.system, args.n)
    w = rs.word(args.word)
    nf = normal_form(w, rs)
    return OK, {"system": rs.name, "word": show_word(w), "normal_form": show_word(nf)}, show_word(nf)


def cmd_confluence(args, bounds):
    rs = presentation(args.system, args.n)
    pairs = critical_pairs(rs)
    ok = is_locally_confluent(rs)
    doc = {"system": rs.name, "locally_confluent": ok,
           "critical_pairs": [{"peak": p.peak, "left": show_word(p.left),
                               "right": show_word(p.right), "joinable": p.joinable,
                               "rules": list(p.rules)} for p in pairs]}
    text = f"{rs.name}: {'locally confluent' if ok else 'not locally confluent'}" + "".join(
        f"\n  {p.peak} -> {show_word(p.left)} | {show_word(p.right)}"
        f"{'' if p.joinable else '  (not joinable)'}" for p in pairs)
    return _expect(args, "confluent" if ok else "not-confluent", OK), doc, text


def cmd_nf_table(args, bounds):
    rs = presentation(args.system, args.n)
    words = args.words.split(",")
    pt = induce(rs, words, max_len=args.max_len or bounds.max_len,
                max_steps=args.max_steps or bounds.max_steps)
    return OK, ser.partial_to_json(pt), None


def cmd_embed_search(args, bounds):
    pt = load_pattern(args)
    space = DegreeSpace(args.max_degree) if args.max_degree else \
        OrderSpace(args.max_order or bounds.embed_order)
    outcome = embed_search(pt, space, bounds=bounds)
    kind, payload = ser.embedding_payload(pt, outcome, args.pattern)
    code = _expect(args, "witness" if kind == "embedding" else "exhausted",
                   OK if kind == "embedding" else UNKNOWN)
    return code, ser.certificate(kind, payload, bounds), f"{kind} ({payload.get('targets', payload.get('targets_tried'))} targets)"


def cmd_wrap_search(args, bounds):
    pt = load_pattern(args)
    outcome = wrap_search(pt, args.max_order or bounds.wrap_order, bounds=bounds)
    kind, payload = ser.wrap_payload(pt, outcome, args.pattern)
    code = _expect(args, "witness" if kind == "wrap" else "exhausted",
                   OK if kind == "wrap" else UNKNOWN)
    return code, ser.certificate(kind, payload, bounds), kind


def cmd_tighten(args, bounds):
    if args.input:
        doc = json.loads(Path(args.input).read_text())
        wi = ser.wrap_from_json(doc.get("payload", doc).get("wrap", doc))
    else:
        table = load_table(args.table)
        subset = _ints(args.subset) or list(range(table.order))
        wi = finite_lef_wrap(table, subset) if args.construction == "lef" else self_wrap(table, subset)
    out = tighten_all(wi) if args.all else tighten(wi)
    doc = ser.certificate("wrap", {"wrap": ser.wrap_to_json(out),
                                   "removed": len(wi.h_preimage()) - len(out.h_preimage())}, bounds)
    return (OK if is_accurate_tight(out) else FAIL), doc, \
        f"preimage {len(wi.h_preimage())} -> {len(out.h_preimage())}"


def cmd_scan_law(args, bounds):
    report = scan_law(args.law, args.max_order or bounds.law_order, args.mode,
                      n=args.n or 2, jobs=bounds.jobs)
    doc = ser.certificate("law-report", ser.law_report_to_json(report), bounds)
    text = f"{args.law}: {report.scanned} tables, {report.total_counterexamples} counterexamples"
    return _expect(args, "holds" if report.holds else "fails", OK if report.holds else FAIL), doc, text


def cmd_detect_obstruction(args, bounds):
    pt = load_pattern(args)
    certs = detect_obstruction(pt, tuple(_ints(args.prob_n) or [2]))
    doc = ser.certificate("obstruction", {"H": ser.partial_to_json(pt),
                                          "certificates": [ser.obstruction_to_json(c) for c in certs]},
                          bounds)
    text = "\n".join(f"{c.pattern}: {dict(c.matched)}" for c in certs) or "no known pattern"
    return _expect(args, "found" if certs else "none", OK if certs else FAIL), doc, text


def cmd_tn_check(args, bounds):
    res = tn_separation(args.n or 2, args.m, args.max_len or bounds.max_len,
                        args.max_steps or bounds.max_steps)
    if isinstance(res, EqualityFound):
        doc = {"n": res.n, "m": res.m, "outcome": "equality-found",
               "path": [[s.rule, s.forward, s.position, show_word(s.word)] for s in res.path]}
        return FAIL, doc, "equality found"
    doc = {"n": res.n, "m": res.m, "outcome": "separation-holds",
           "visited": res.search.visited, "exhausted": res.search.exhausted}
    return _expect(args, "separated", UNKNOWN), doc, \
        f"no equality within bounds ({res.search.visited} words)"


def cmd_power_check(args, bounds):
    r = power_counterexample_check(args.max_len or bounds.orbit_len)
    doc = {"max_len": r.max_len, "orbit_size": len(r.orbit), "ok": r.ok,
           "factorises": r.factorises, "closed": r.closed, "aabab_to_a": r.aabab_to_a,
           "shapes_hold": r.shapes_hold, "aba_excluded": r.aba_excluded,
           "bad_words": [list(b) for b in r.bad_words],
           "blockwise_failures": list(r.blockwise_failures)}
    return (OK if r.ok else FAIL), doc, f"{len(r.orbit)} orbit words, {'ok' if r.ok else 'FAILED'}"


def cmd_wagner_preston(args, bounds):
    it = as_inverse(load_table(args.table))
    r = wagner_preston(it)
    doc = {"table": ser.inverse_table_to_json(it), "ok": r.ok, "injective": r.injective,
           "multiplicative": r.multiplicative, "images": [ser.pb_to_json(f) for f in r.images]}
    return (OK if r.ok else FAIL), doc, f"monomorphism: {r.ok}"


def cmd_ilef_lift(args, bounds):
    it = as_inverse(load_table(args.table))
    K = _ints(args.subset) or list(range(it.order))
    r = ilef_lift(it, K, regular_map(it))
    doc = {"ok": r.ok, "violations": {k: ser._plain(v) for k, v in r.violations.items()},
           "lift": {str(x): ser.pb_to_json(f) for x, f in r.lift.items()}}
    return (OK if r.ok else FAIL), doc, f"lift verified: {r.ok}"


def cmd_ilef_from_wrap(args, bounds):
    it = as_inverse(load_table(args.table))
    H = _ints(args.subset) or list(range(it.order))
    K = list(dict.fromkeys(list(symmetrise(H, it)) + sorted(idempotent_set(it.cayley))))
    wi = finite_lef_wrap(it.cayley, K) if args.construction == "lef" else self_wrap(it.cayley, K)
    iw = inverse_wrap(tighten_all(wi), it)
    compat, hmin = check_wrap_inverse_compat(iw), check_hmin_lemmas(iw)
    labels = [iw.k_label(h) for h in H]
    ilef = ilef_from_wrap(iw, labels, bounds=bounds)
    ok = compat.ok and hmin.ok and ilef.ok
    doc = ser.certificate("lemma-report", ser.lemma_payload(iw, compat, hmin, ilef), bounds)
    return (OK if ok else FAIL), doc, f"lemmas {compat.ok and hmin.ok}, lef map {ilef.ok}"


def cmd_verify(args, bounds):
    doc = ser.load(Path(args.input).read_text())
    ok = ser.verify_certificate(doc)
    return (OK if ok else FAIL), {"kind": doc["kind"], "verified": ok}, f"{doc['kind']}: {ok}"


def cmd_enumerate(args, bounds):
    tables = list(enumerate_semigroups(args.order, args.mode, limit=args.limit, jobs=bounds.jobs))
    doc = {"order": args.order, "mode": args.mode, "count": len(tables),
           "tables": [[list(r) for r in t.rows] for t in tables] if not args.count_only else None}
    return OK, doc, str(len(tables))


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def add_common(parser, suppress):
        # accepted before or after the verb; the verb-level copy must not reset defaults
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        parser.add_argument("--format", choices=["json", "text"], **(kw or {"default": "json"}))
        parser.add_argument("--config", help="key=value bounds file", **kw)
        parser.add_argument("--jobs", type=int, **kw)
        parser.add_argument("--out", help="write the JSON document here", **kw)
        parser.add_argument("--expect", help="expected outcome; exit 0 iff it matches", **kw)

    common = argparse.ArgumentParser(add_help=False)
    add_common(common, True)
    p = argparse.ArgumentParser(prog="lefkit", description=__doc__.splitlines()[0])
    add_common(p, False)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(fn=fn)
        return sp

    def system_args(sp):
        sp.add_argument("--system", required=True, help="B, A, T, T_n, S_abab or free")
        sp.add_argument("--n", type=int)

    def pattern_args(sp):
        sp.add_argument("--pattern", help=f"builtin: {', '.join(PATTERNS)}")
        sp.add_argument("--input", help="JSON partial table (or certificate holding one)")

    sp = verb("normal-form", cmd_normal_form)
    system_args(sp)
    sp.add_argument("--word", required=True)
    system_args(verb("confluence", cmd_confluence))
    sp = verb("nf-table", cmd_nf_table)
    system_args(sp)
    sp.add_argument("--words", required=True, help="comma separated")
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--max-steps", type=int)
    sp = verb("embed-search", cmd_embed_search)
    pattern_args(sp)
    sp.add_argument("--max-order", type=int)
    sp.add_argument("--max-degree", type=int)
    sp = verb("wrap-search", cmd_wrap_search)
    pattern_args(sp)
    sp.add_argument("--max-order", type=int)
    sp = verb("tighten", cmd_tighten)
    sp.add_argument("--input", help="wrap certificate")
    sp.add_argument("--table", help="builtin table name or JSON file")
    sp.add_argument("--subset", help="comma separated element indices")
    sp.add_argument("--construction", choices=["self", "lef"], default="lef")
    sp.add_argument("--all", action="store_true", help="tighten against every designation")
    sp = verb("scan-law", cmd_scan_law)
    sp.add_argument("--law", required=True, choices=sorted(LAWS))
    sp.add_argument("--max-order", type=int)
    sp.add_argument("--mode", choices=[LABELED, ISO], default=LABELED)
    sp.add_argument("--n", type=int, help=f"exponent for {PROB}")
    sp = verb("detect-obstruction", cmd_detect_obstruction)
    pattern_args(sp)
    sp.add_argument("--prob-n", help="comma separated n values for the prob pattern")
    sp = verb("tn-check", cmd_tn_check)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--max-steps", type=int)
    sp = verb("power-check", cmd_power_check)
    sp.add_argument("--max-len", type=int)
    for name, fn in [("wagner-preston", cmd_wagner_preston), ("ilef-lift", cmd_ilef_lift),
                     ("ilef-from-wrap", cmd_ilef_from_wrap)]:
        sp = verb(name, fn)
        sp.add_argument("--table", required=True,
                        help="sim2, brandt, z<n>, chain<n>, left-zero<n>, or a JSON table")
        if name != "wagner-preston":
            sp.add_argument("--subset", help="comma separated element indices")
        if name == "ilef-from-wrap":
            sp.add_argument("--construction", choices=["self", "lef"], default="self")
    sp = verb("verify", cmd_verify)
    sp.add_argument("--input", required=True)
    sp = verb("enumerate", cmd_enumerate)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--mode", choices=[LABELED, ISO], default=ISO)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--count-only", action="store_true")
    return p


def _text(doc) -> str:
    if isinstance(doc, dict):
        return "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(doc.items()))
    return str(doc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        bounds = load_bounds(args.config, jobs=args.jobs)
        code, doc, text = args.fn(args, bounds)
    except LefkitError as e:
        code, doc, text = INPUT, {"error": e.code, "message": str(e)}, f"error [{e.code}]: {e}"
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        code, doc, text = INPUT, {"error": type(e).__name__, "message": str(e)}, f"error: {e}"
    body = ser.dumps(doc)
    if args.out and code != INPUT:
        Path(args.out).write_text(body + "\n")
    if args.format == "json":
        print(body)
    else:
        print(text if text is not None else _text(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
