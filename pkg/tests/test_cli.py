import json

import pytest

from lefkit import serialize as ser
from lefkit.cli import FAIL, INPUT, OK, UNKNOWN, main
from lefkit.config import load_bounds, parse_config
from lefkit.errors import CorruptCertificate, NotAssociative
from lefkit.finite import Transformation, chain_semilattice, semigroups_of_order
from lefkit.inverse import (PartialBijection, brandt_b2, check_hmin_lemmas,
                            check_wrap_inverse_compat, inverse_wrap)
from lefkit.partial import finite_lef_wrap, induce, projection_wrap, self_wrap, tighten_all
from lefkit.rewriting import abab_monoid, tn_semigroup


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def verify_file(capsys, path):
    return run(capsys, "verify", "--input", str(path))[0]


# --- JSON round trips ----------------------------------------------------------------

def test_plain_round_trips():
    for t in semigroups_of_order(3)[:20]:
        assert ser.table_from_json(json.loads(ser.dumps(ser.table_to_json(t)))) == t
    tr = Transformation.of([2, 0, 0])
    assert ser.transformation_from_json(ser.transformation_to_json(tr)) == tr
    for rs in (abab_monoid(), tn_semigroup(3)):
        assert ser.system_from_json(json.loads(ser.dumps(ser.system_to_json(rs)))) == rs
    pb = PartialBijection.from_map(3, {0: 2, 2: 1})
    assert ser.pb_from_json(json.loads(ser.dumps(ser.pb_to_json(pb)))) == pb
    it = brandt_b2().table
    assert ser.inverse_table_from_json(ser.inverse_table_to_json(it)) == it


def test_partial_and_wrap_round_trips():
    pt = induce(chain_semilattice(3), [0, 2])
    assert ser.partial_from_json(json.loads(ser.dumps(ser.partial_to_json(pt)))) == pt
    for wi in (finite_lef_wrap(chain_semilattice(3), [1]),
               tighten_all(projection_wrap(chain_semilattice(2), chain_semilattice(2)))):
        back = ser.wrap_from_json(json.loads(ser.dumps(ser.wrap_to_json(wi))))
        assert back == wi


def test_readers_reject_bad_input():
    with pytest.raises(NotAssociative):
        ser.table_from_json({"order": 2, "table": [[1, 0], [0, 0]]})
    with pytest.raises(CorruptCertificate):
        ser.table_from_json({"order": 3, "table": [[0, 0], [0, 0]]})
    with pytest.raises(CorruptCertificate):
        ser.load("[1, 2")
    with pytest.raises(CorruptCertificate):
        ser.verify_certificate({"schema": 1, "kind": "embedding", "payload": {}})
    with pytest.raises(CorruptCertificate):
        ser.verify_certificate({"schema": 7, "kind": "wrap", "payload": {}})


def test_lemma_certificate_round_trip():
    it = brandt_b2().table
    iw = inverse_wrap(self_wrap(it.cayley), it)
    doc = ser.certificate("lemma-report", ser.lemma_payload(
        iw, check_wrap_inverse_compat(iw), check_hmin_lemmas(iw)))
    assert ser.verify_certificate(ser.load(ser.dumps(doc)))
    doc["payload"]["hmin"]["ok"] = False
    assert not ser.verify_certificate(doc)


# --- config --------------------------------------------------------------------------------

def test_config_file(tmp_path, monkeypatch):
    path = tmp_path / "bounds.cfg"
    path.write_text("# search bounds\nwrap-order = 3\nmax_len=10\n")
    b = load_bounds(path, jobs=None)
    assert (b.wrap_order, b.max_len, b.jobs) == (3, 10, 1)
    monkeypatch.setenv("LEFKIT_JOBS", "2")
    assert load_bounds(path).jobs == 2
    assert load_bounds(path, jobs=3).jobs == 3
    with pytest.raises(ValueError):
        parse_config("colour = 3")


def test_bad_config_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("nonsense\n")
    assert run(capsys, "--config", str(path), "power-check")[0] == INPUT


# --- verbs ------------------------------------------------------------------------------------

def test_normal_form(capsys):
    code, doc = run_json(capsys, "normal-form", "--system", "A", "--word", "aab")
    assert code == OK and doc["normal_form"] == "a"
    code, out = run(capsys, "--format", "text", "normal-form", "--system", "S_abab",
                    "--word", "ababa")
    assert code == OK and out.strip() == "a"
    code, out = run(capsys, "normal-form", "--system", "B", "--word", "ab", "--format", "text")
    assert out.strip() == "1"


def test_confluence(capsys):
    code, doc = run_json(capsys, "confluence", "--system", "T")
    assert code == OK and not doc["locally_confluent"]
    assert doc["critical_pairs"][0]["peak"] == "baabaab"
    assert run(capsys, "confluence", "--system", "T", "--expect", "confluent")[0] == FAIL
    assert run(capsys, "confluence", "--system", "A", "--expect", "confluent")[0] == OK


def test_nf_table(capsys):
    code, doc = run_json(capsys, "nf-table", "--system", "B", "--words", "1,a,b,ba")
    assert code == OK and ["a", "b", "1"] in doc["products"]


def test_embedding_certificates(capsys, tmp_path):
    out = tmp_path / "free.json"
    code, doc = run_json(capsys, "embed-search", "--pattern", "free3", "--max-order", "4",
                         "--out", str(out))
    assert code == OK and doc["kind"] == "embedding"
    assert verify_file(capsys, out) == OK
    doc["payload"]["assignment"][1] = doc["payload"]["assignment"][0]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    assert verify_file(capsys, tampered) == FAIL


def test_exhausted_certificates(capsys, tmp_path):
    out = tmp_path / "aab.json"
    code, doc = run_json(capsys, "embed-search", "--pattern", "aab4", "--max-order", "3",
                         "--out", str(out))
    assert code == UNKNOWN and doc["kind"] == "exhausted"
    assert doc["payload"]["targets"] == 1 + 5 + 24
    assert verify_file(capsys, out) == OK
    doc["payload"]["space"] = {"kind": "orders", "max_order": 0}
    out.write_text(json.dumps(doc))
    assert verify_file(capsys, out) == FAIL
    code = run(capsys, "embed-search", "--pattern", "aab4", "--max-degree", "2",
               "--expect", "exhausted")[0]
    assert code == OK


def test_wrap_search_and_tighten(capsys, tmp_path):
    h = tmp_path / "h.json"
    h.write_text(ser.dumps(ser.partial_to_json(induce(chain_semilattice(2), [0, 1]))))
    out = tmp_path / "wrap.json"
    code, doc = run_json(capsys, "wrap-search", "--input", str(h), "--max-order", "2",
                         "--out", str(out))
    assert code == OK and doc["kind"] == "wrap"
    assert verify_file(capsys, out) == OK
    code, doc = run_json(capsys, "tighten", "--input", str(out))
    assert code == OK
    tight = tmp_path / "tight.json"
    code, doc = run_json(capsys, "tighten", "--table", "chain3", "--subset", "0,2",
                         "--construction", "self", "--all", "--out", str(tight))
    assert code == OK and verify_file(capsys, tight) == OK
    assert run(capsys, "wrap-search", "--pattern", "aab4", "--max-order", "3")[0] == UNKNOWN


def test_law_reports(capsys, tmp_path):
    assert run(capsys, "scan-law", "--law", "ppq", "--max-order", "3")[0] == OK
    out = tmp_path / "control.json"
    code, doc = run_json(capsys, "scan-law", "--law", "ppq-commutes", "--max-order", "3",
                         "--out", str(out))
    assert code == FAIL and doc["payload"]["total_counterexamples"] > 0
    assert verify_file(capsys, out) == OK
    # a pair at which the control law actually holds is not a counterexample
    doc["payload"]["counterexamples"][0]["pair"] = [0, 0]
    out.write_text(json.dumps(doc))
    assert verify_file(capsys, out) == FAIL
    code = run(capsys, "scan-law", "--law", "ppq-commutes", "--max-order", "2",
               "--expect", "fails")[0]
    assert code == OK


def test_obstruction_certificates(capsys, tmp_path):
    out = tmp_path / "obs.json"
    code, doc = run_json(capsys, "detect-obstruction", "--pattern", "aab4", "--out", str(out))
    assert code == OK and [c["pattern"] for c in doc["payload"]["certificates"]] == ["ppq"]
    assert verify_file(capsys, out) == OK
    assert run(capsys, "detect-obstruction", "--pattern", "free4")[0] == FAIL
    code, doc = run_json(capsys, "detect-obstruction", "--pattern", "sixset-B")
    assert "six-set" in [c["pattern"] for c in doc["payload"]["certificates"]]


def test_tn_and_power_checks(capsys):
    code, doc = run_json(capsys, "tn-check", "--m", "1")
    assert code == UNKNOWN and doc["outcome"] == "separation-holds"
    assert run(capsys, "tn-check", "--m", "3", "--expect", "separated")[0] == OK
    assert run(capsys, "tn-check", "--m", "2")[0] == INPUT
    code, doc = run_json(capsys, "power-check", "--max-len", "7")
    assert code == OK and doc["ok"]


def test_inverse_verbs(capsys, tmp_path):
    code, doc = run_json(capsys, "wagner-preston", "--table", "sim2")
    assert code == OK and len(doc["images"]) == 7
    assert run(capsys, "wagner-preston", "--table", "left-zero2")[0] == INPUT
    assert run(capsys, "ilef-lift", "--table", "sim2")[0] == OK
    out = tmp_path / "lemmas.json"
    code, doc = run_json(capsys, "ilef-from-wrap", "--table", "brandt", "--out", str(out))
    assert code == OK and doc["payload"]["ilef"]["ok"]
    assert verify_file(capsys, out) == OK
    assert run(capsys, "ilef-from-wrap", "--table", "z3", "--construction", "lef",
               "--subset", "1")[0] == OK


def test_table_from_file(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(ser.dumps(ser.table_to_json(chain_semilattice(3))))
    assert run(capsys, "wagner-preston", "--table", str(path))[0] == OK
    path.write_text(json.dumps({"order": 2, "table": [[1, 0], [0, 0]]}))
    assert run(capsys, "wagner-preston", "--table", str(path))[0] == INPUT


def test_verify_rejects_garbage(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert verify_file(capsys, path) == INPUT
    path.write_text(json.dumps({"schema": 1, "kind": "wrap", "payload": {"wrap": {}}}))
    assert verify_file(capsys, path) == INPUT
    assert verify_file(capsys, tmp_path / "missing.json") == INPUT


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", "--order", "3", "--mode", "labeled", "--count-only",
                    "--format", "text")
    assert code == OK and out.strip() == "113"
    assert run(capsys, "enumerate", "--order", "7")[0] == INPUT


def test_identical_runs_identical_payloads(capsys):
    docs = []
    for _ in range(2):
        code, doc = run_json(capsys, "embed-search", "--pattern", "bicyclic4", "--max-order", "3")
        doc.pop("timestamp")
        docs.append(ser.dumps(doc))
    assert docs[0] == docs[1]


def test_unknown_pattern_is_input_error(capsys):
    assert run(capsys, "embed-search", "--pattern", "nope")[0] == INPUT
