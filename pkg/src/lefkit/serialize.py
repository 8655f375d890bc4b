"""JSON documents and certificates.

Every reader re-validates what it builds (tables are re-checked for
associativity, partial tables for consistency), so a certificate can be
trusted only as far as :func:`verify_certificate` re-checks it.
"""

from __future__ import annotations

import dataclasses
import json
import time

from . import __version__
from .config import Bounds
from .errors import CorruptCertificate, LefkitError
from .finite import CayleyTable, Transformation
from .inverse import (InverseTable, LemmaReport, PartialBijection, check_hmin_lemmas,
                      check_wrap_inverse_compat, inverse_wrap)
from .obstructions import (LAWS, LawReport, ObstructionCertificate, detect_obstruction,
                           law_holds_at)
from .partial import (BOTTOM, EmbeddingWitness, Exhausted, Outside, PartialTable, WrapInstance,
                      Witnessed, verify_embedding, wrap_verify)
from .rewriting import RewritingSystem

SCHEMA = 1
KINDS = ("embedding", "exhausted", "wrap", "law-report", "obstruction", "lemma-report")


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


# --- plain objects ----------------------------------------------------------------

def table_to_json(t: CayleyTable) -> dict:
    return {"order": t.order, "table": [list(r) for r in t.rows]}


def table_from_json(d: dict) -> CayleyTable:
    t = CayleyTable.from_rows(d["table"])
    if "order" in d and d["order"] != t.order:
        raise CorruptCertificate(f"order {d['order']} does not match a {t.order}-row table")
    return t


def transformation_to_json(t: Transformation) -> dict:
    return {"degree": t.degree, "images": list(t.images)}


def transformation_from_json(d: dict) -> Transformation:
    t = Transformation.of(d["images"])
    if d.get("degree", t.degree) != t.degree:
        raise CorruptCertificate("degree does not match images")
    return t


def system_to_json(rs: RewritingSystem) -> dict:
    return {"alphabet": list(rs.alphabet), "kind": rs.kind, "name": rs.name,
            "rules": [[l, r] for l, r in rs.rules]}


def system_from_json(d: dict) -> RewritingSystem:
    return RewritingSystem(tuple(d["alphabet"]), tuple((l, r) for l, r in d["rules"]),
                           d["kind"], d.get("name", ""))


def partial_to_json(pt: PartialTable) -> dict:
    names = pt.elements
    out = {"elements": list(names),
           "products": sorted([names[i], names[j], names[k]] for (i, j), k in pt.product.items())}
    out["ambient"] = None if pt.ambient is None else sorted(
        [names[i], names[j], w] for (i, j), w in pt.ambient.items())
    return out


def partial_from_json(d: dict) -> PartialTable:
    names = tuple(d["elements"])
    idx = {n: i for i, n in enumerate(names)}
    try:
        product = {(idx[x], idx[y]): idx[z] for x, y, z in d["products"]}
        ambient = None
        if d.get("ambient") is not None:
            ambient = {(idx[x], idx[y]): w for x, y, w in d["ambient"]}
    except KeyError as e:
        raise CorruptCertificate(f"unknown element {e}") from None
    return PartialTable(names, product, ambient)


def pb_to_json(f: PartialBijection) -> dict:
    return {"universe": f.universe, "map": {str(k): v for k, v in f.as_map().items()}}


def pb_from_json(d: dict) -> PartialBijection:
    return PartialBijection.from_map(d["universe"], {int(k): v for k, v in d["map"].items()})


def inverse_table_to_json(it: InverseTable) -> dict:
    return table_to_json(it.cayley) | {"inv": list(it.inv)}


def inverse_table_from_json(d: dict) -> InverseTable:
    from .inverse import as_inverse
    it = as_inverse(table_from_json(d))
    if "inv" in d and tuple(d["inv"]) != it.inv:
        raise CorruptCertificate("stored inverses disagree with the table")
    return it


def label_to_json(label, pt: PartialTable):
    if isinstance(label, Outside):
        return ["out", label.word]
    return ["in", pt.elements[label]]


def label_from_json(v, pt: PartialTable):
    tag, name = v
    if tag == "out":
        return Outside(name) if name is not None else BOTTOM
    if tag == "in":
        return pt.index(name)
    raise CorruptCertificate(f"bad label {v!r}")


def wrap_to_json(wi: WrapInstance) -> dict:
    return {"H": partial_to_json(wi.H), "D": table_to_json(wi.D),
            "labeling": [label_to_json(l, wi.H) for l in wi.labeling],
            "designated": None if wi.designated is None else list(wi.designated)}


def wrap_from_json(d: dict) -> WrapInstance:
    pt = partial_from_json(d["H"])
    D = table_from_json(d["D"])
    lab = tuple(label_from_json(v, pt) for v in d["labeling"])
    des = d.get("designated")
    return WrapInstance(D, lab, pt, None if des is None else tuple(des))


def law_report_to_json(r: LawReport) -> dict:
    return {"law": r.law, "space": r.space, "scanned": r.scanned,
            "total_counterexamples": r.total_counterexamples,
            "counterexamples": [{"table": [list(x) for x in rows], "pair": list(pq)}
                                for rows, pq in r.counterexamples]}


def obstruction_to_json(c: ObstructionCertificate) -> dict:
    return {"pattern": c.pattern, "matched": [list(m) for m in c.matched], "reason": c.reason,
            "n": c.n}


def obstruction_from_json(d: dict) -> ObstructionCertificate:
    return ObstructionCertificate(d["pattern"], tuple(tuple(m) for m in d["matched"]),
                                  d["reason"], d.get("n"))


def lemma_report_to_json(r: LemmaReport) -> dict:
    return {"ok": r.ok, "checked": r.checked,
            "violations": {k: [_plain(w) for w in v] for k, v in r.violations.items()}}


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


# --- certificates ------------------------------------------------------------------

def certificate(kind: str, payload: dict, bounds: Bounds | None = None,
                timestamp: float | None = None) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown certificate kind {kind!r}")
    return {"schema": SCHEMA, "kind": kind, "payload": payload, "tool_version": __version__,
            "bounds": dataclasses.asdict(bounds) if bounds is not None else None,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                       time.gmtime(time.time() if timestamp is None else timestamp))}


def embedding_payload(pt: PartialTable, outcome, pattern: str | None = None) -> tuple[str, dict]:
    if isinstance(outcome, Witnessed):
        w = outcome.witness
        return "embedding", {"pattern": pattern, "H": partial_to_json(pt),
                             "target": table_to_json(w.target), "assignment": list(w.assignment),
                             "targets_tried": outcome.targets_tried}
    return "exhausted", {"pattern": pattern, "search": "embedding", "H": partial_to_json(pt),
                         "space": outcome.space, "targets": outcome.targets}


def wrap_payload(pt: PartialTable, outcome, pattern: str | None = None) -> tuple[str, dict]:
    if isinstance(outcome, Witnessed):
        return "wrap", {"pattern": pattern, "wrap": wrap_to_json(outcome.witness)}
    return "exhausted", {"pattern": pattern, "search": "wrap", "H": partial_to_json(pt),
                         "space": outcome.space, "targets": outcome.targets}


def lemma_payload(iw, compat: LemmaReport, hmin: LemmaReport, ilef=None) -> dict:
    out = {"wrap": wrap_to_json(iw.wi), "ambient": inverse_table_to_json(iw.ambient),
           "compat": lemma_report_to_json(compat), "hmin": lemma_report_to_json(hmin)}
    if ilef is not None:
        out["ilef"] = {"ok": ilef.ok, "injective": ilef.injective,
                       "multiplicative": ilef.multiplicative,
                       "masks": {iw.wi.H.elements[h]: m for h, m in ilef.masks.items()}}
    return out


def load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptCertificate(f"not JSON: {e}") from None
    if not isinstance(doc, dict):
        raise CorruptCertificate("certificate must be a JSON object")
    return doc


def _check_space(space) -> bool:
    if not isinstance(space, dict):
        return False
    if space.get("kind") == "orders":
        return isinstance(space.get("max_order"), int) and space["max_order"] >= 1
    if space.get("kind") == "transformations":
        return isinstance(space.get("max_degree"), int) and space["max_degree"] >= 1
    return False


def verify_certificate(doc: dict) -> bool:
    """Cheap re-verification of a certificate (searches are never re-run).

    Raises CorruptCertificate when the document cannot be read at all.
    """
    if doc.get("schema") != SCHEMA or doc.get("kind") not in KINDS or "payload" not in doc:
        raise CorruptCertificate("missing schema, kind or payload")
    kind, p = doc["kind"], doc["payload"]
    try:
        if kind == "embedding":
            pt = partial_from_json(p["H"])
            w = EmbeddingWitness(table_from_json(p["target"]), tuple(p["assignment"]))
            return verify_embedding(pt, w)
        if kind == "exhausted":
            partial_from_json(p["H"])
            return _check_space(p["space"]) and isinstance(p.get("targets"), int)
        if kind == "wrap":
            return wrap_verify(wrap_from_json(p["wrap"]))
        if kind == "law-report":
            if p["law"] not in LAWS:
                return False
            n = p["space"].get("n", 2)
            for ce in p["counterexamples"]:
                if law_holds_at(p["law"], table_from_json({"table": ce["table"]}), *ce["pair"], n=n):
                    return False
            return (p["total_counterexamples"] == 0) == (not p["counterexamples"])
        if kind == "obstruction":
            pt = partial_from_json(p["H"])
            found = detect_obstruction(pt, tuple({2} | {c.get("n") or 2 for c in p["certificates"]}))
            return all(obstruction_from_json(c) in found for c in p["certificates"]) \
                and (bool(found) == bool(p["certificates"]))
        if kind == "lemma-report":
            iw = inverse_wrap(wrap_from_json(p["wrap"]), inverse_table_from_json(p["ambient"]))
            compat, hmin = check_wrap_inverse_compat(iw), check_hmin_lemmas(iw)
            return compat.ok == p["compat"]["ok"] and hmin.ok == p["hmin"]["ok"]
    except CorruptCertificate:
        raise
    except (KeyError, TypeError, ValueError, IndexError, LefkitError) as e:
        raise CorruptCertificate(f"unreadable {kind} payload: {e}") from None
    raise CorruptCertificate(f"unknown kind {kind!r}")
