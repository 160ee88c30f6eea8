import json

import pytest

from gnst import acceptance, theories
from gnst.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_zeta_qubit(capsys):
    code, doc = run_json(capsys, "zeta", "--theory", "qubit", "--m1", "z", "--m2", "x", "--outcomes", "00")
    assert code == 0
    assert doc["results"]["zeta"] == 0.853553390593
    assert doc["provenance"]["method"] == "analytic"
    assert doc["schema_version"] == 1


def test_zeta_exact_theories(capsys):
    assert run_json(capsys, "zeta", "--theory", "toy", "--m1", "Z", "--m2", "X")[1]["results"]["zeta"] == "3/4"
    assert run_json(capsys, "zeta", "--theory", "classical")[1]["results"]["zeta"] == 1
    code, out, _ = run(capsys, "zeta", "--theory", "toy", "--m1", "Z", "--m2", "X")
    assert code == 0 and out.splitlines()[0] == "zeta = 3/4"


def test_zeta_uncertified_exit_code(capsys):
    code, out, _ = run(capsys, "zeta", "--numeric", "--resolution", "100", "--tolerance", "1e-6")
    assert code == 2 and "UNCERTIFIED" in out


def test_certify(capsys):
    code, doc = run_json(capsys, "certify", "--theory", "qubit", "--m1", "z", "--m2", "x")
    r = doc["results"]
    assert code == 0
    assert abs(r["certified_bits"] - 0.456893393673) <= 1e-9
    assert abs(r["worst_case_bits"] - r["certified_bits"]) <= 1e-6
    assert r["best_case_bits"] == 2.0 and r["genuine_source"] is True
    _, doc = run_json(capsys, "certify", "--theory", "toy", "--m1", "Z", "--m2", "X")
    r = doc["results"]
    assert abs(r["certified_bits"] - 0.830075) <= 1e-6
    assert r["vertex_worst_case_bits"] == 1.0 and r["genuine_source"] is True
    _, doc = run_json(capsys, "certify", "--theory", "gbit")
    assert doc["results"]["certified_bits"] == 0 and doc["results"]["genuine_source"] is False


def test_simulate(capsys, tmp_path):
    csv, summ = tmp_path / "r.csv", tmp_path / "s.json"
    code, doc = run_json(capsys, "simulate", "--adversarial", "--rounds", "1000000", "--seed", "42",
                         "--csv", str(csv), "--summary", str(summ))
    assert code == 0
    assert abs(doc["results"]["empirical_min_entropy"] - 0.457) <= 0.01
    assert doc["results"]["verdict"] == "pass"
    assert len(csv.read_text().splitlines()) == 1_000_001
    assert json.loads(summ.read_text())["config_hash"] == doc["provenance"]["config_hash"]
    _, doc = run_json(capsys, "simulate", "--state", "0,1,0", "--rounds", "1000000")
    assert abs(doc["results"]["empirical_min_entropy"] - 2.0) <= 0.01
    code, doc = run_json(capsys, "simulate", "--theory", "bellmermin", "--ontic", "--rounds", "1000")
    assert code == 0 and doc["results"]["empirical_min_entropy"] == 0.0


def test_simulate_is_byte_identical(capsys):
    args = ("simulate", "--adversarial", "--rounds", "5000", "--seed", "7")
    assert run(capsys, *args, "--json", "--workers", "1")[1] == run(capsys, *args, "--json", "--workers", "3")[1]


@pytest.mark.parametrize("argv", [
    ("zeta", "--theory", "nonexistent"),
    ("zeta", "--theory", "qubit", "--m1", "w"),
    ("certify", "--theory", "toy", "--m1", "Q"),
    ("simulate", "--state", "2,0,0"),
    ("simulate", "--theory", "qubit", "--ontic"),
    ("simulate", "--rounds", "10"),
])
def test_input_errors_exit_3(capsys, argv):
    assert main(list(argv)) == 3


def test_usage_errors_exit_3(capsys):
    for argv in (["bogus"], ["zeta", "--resolution", "many"], ["simulate", "--adversarial", "--ontic"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 3


def test_bad_theory_document_exit_3(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "b", "measurements": [{"id": "a", "arity": 2}],
                               "vertices": [{"label": "v", "table": {"a": ["1/2", "1/3"]}}]}))
    code, _, err = run(capsys, "zeta", "--theory", str(bad))
    assert code == 3 and "$.vertices[0].table.a" in err


def test_theory_document_path(capsys, tmp_path):
    good = tmp_path / "t.json"
    good.write_text(json.dumps({"name": "t", "measurements": [{"id": "a", "arity": 2}, {"id": "b", "arity": 2}],
                                "vertices": [{"label": "p", "table": {"a": ["1", "0"], "b": ["1/2", "1/2"]}},
                                             {"label": "q", "table": {"a": ["1/2", "1/2"], "b": ["1", "0"]}}]}))
    code, doc = run_json(capsys, "zeta", "--theory", str(good), "--m1", "a", "--m2", "b")
    assert code == 0 and doc["results"]["zeta"] == "3/4"


def test_io_error_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--state", "0,1,0", "--rounds", "10",
                       "--csv", str(tmp_path / "missing" / "r.csv"))
    assert code == 1 and "I/O error" in err


def test_verify_json(capsys, monkeypatch):
    rows = [acceptance.Row(1, "q", "1", "1", "exact", True), acceptance.Row(2, "r", "1", "0", "exact", False)]
    monkeypatch.setattr(acceptance, "run_all", lambda: rows)
    code, out, _ = run(capsys, "verify", "--json")
    doc = json.loads(out)
    assert code == 1 and doc["failed_criteria"] == [2] and len(doc["rows"]) == 2
    monkeypatch.setattr(acceptance, "run_all", lambda: rows[:1])
    code, out, _ = run(capsys, "verify")
    assert code == 0 and out.strip().endswith("all criteria pass")


def test_sign_bug_in_born_rule_fails_zeta_row(monkeypatch):
    real = theories.born_prob
    monkeypatch.setattr(theories, "born_prob", lambda s, m, o: real(s, m, 1 - o))
    rows = acceptance.criterion_1()
    assert any(not r.passed for r in rows)
    monkeypatch.undo()
    assert all(r.passed for r in acceptance.criterion_1())
