import io
import json
import subprocess
import sys

import pytest

from domainknn.cli import main

from oracle import approx_equal_records


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def kb_path(tmp_path, data_dir, capsys):
    path = tmp_path / "kb.json"
    code, out, _ = run(capsys, "build", data_dir / "fixture_corpus.jsonl", path)
    assert code == 0
    return path


def test_build_summary(tmp_path, data_dir, capsys):
    corpus = tmp_path / "two.jsonl"
    corpus.write_text('{"category": "telco", "text": "adsl fibra"}\n'
                      '{"category": "food", "text": "pasta pizza"}\n', "utf-8")
    code, out, _ = run(capsys, "build", corpus, tmp_path / "kb.json")
    summary = json.loads(out)
    assert code == 0
    assert summary["rows"] == 2 and summary["classes"] == 2 and summary["vocabulary"] == 4
    assert (tmp_path / "kb.json").exists()


def test_build_failures(tmp_path, capsys):
    code, _, err = run(capsys, "build", tmp_path / "missing.jsonl", tmp_path / "kb.json")
    assert code == 1
    assert json.loads(err.splitlines()[-1])["error"] == "IoFailure"

    corpus = tmp_path / "stop.jsonl"
    corpus.write_text('{"category": "x", "text": "il il"}\n', "utf-8")
    code, _, err = run(capsys, "build", corpus, tmp_path / "kb.json")
    assert code == 1
    assert json.loads(err.splitlines()[-1])["error"] == "AllDocumentsFiltered"


def test_classify_matches_golden_file(kb_path, data_dir, capsys, monkeypatch):
    queries = (data_dir / "fixture_queries.txt").read_text("utf-8")
    code, out, _ = run(capsys, "classify", kb_path, stdin=queries, monkeypatch=monkeypatch)
    assert code == 0
    got = [json.loads(line) for line in out.splitlines()]
    golden = [json.loads(line) for line in (data_dir / "golden_classify.jsonl").read_text("utf-8").splitlines()]
    assert len(got) == len(golden) == 7
    for g, want in zip(got, golden):
        assert approx_equal_records(g, want), (g, want)


def test_classify_field_contract(kb_path, capsys):
    code, out, _ = run(capsys, "classify", kb_path, "pizza e pasta")
    rec = json.loads(out)
    assert code == 0
    assert {"similarityValue", "knnResult", "label", "category", "inDomain", "metric", "k",
            "minDistance"} <= rec.keys()
    assert rec["knnResult"] == [1.0, 0.0, 0.0] and rec["category"] == "food"

    code, out, _ = run(capsys, "classify", kb_path, "drago unicorno")
    rec = json.loads(out)
    assert code == 0 and rec["inDomain"] is False and rec["similarityValue"] == 0.0
    code, out, _ = run(capsys, "classify", kb_path, "")
    assert code == 0 and json.loads(out)["label"] is None


def test_classify_flags(kb_path, capsys):
    code, out, _ = run(capsys, "classify", kb_path, "pizza pasta calcio", "--metric", "manhattan",
                       "--k", "3", "--threshold", "0.9", "--penalty", "4", "--workers", "2")
    rec = json.loads(out)
    assert code == 0 and rec["metric"] == "manhattan" and rec["k"] == 3
    assert rec["similarityValue"] is None and rec["minDistance"] > 0


def test_classify_rejects_mismatched_pipeline(kb_path, capsys):
    code, _, err = run(capsys, "classify", kb_path, "pizza", "--stopwords", "none")
    assert code == 1 and json.loads(err)["error"] == "FingerprintMismatch"
    code, _, err = run(capsys, "classify", kb_path, "pizza", "--mode", "binary")
    assert code == 1


def test_classify_usage_errors(kb_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", str(kb_path), "x", "--metric", "jaccard"])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err
    code, _, err = run(capsys, "classify", kb_path, "x", "--threshold", "2")
    assert code == 2 and json.loads(err)["error"] == "ConfigInvalid"


def test_classify_missing_kb(tmp_path, capsys):
    code, _, err = run(capsys, "classify", tmp_path / "nope.json", "x")
    assert code == 1 and json.loads(err)["error"] == "IoFailure"


def test_custom_resources_round_trip(tmp_path, data_dir, capsys):
    stop = tmp_path / "stop.txt"
    stop.write_text("la\nil\n", "utf-8")
    kb = tmp_path / "kb.json"
    flags = ["--stopwords", stop, "--lemmas", "none", "--mode", "binary"]
    assert run(capsys, "build", data_dir / "fixture_corpus.jsonl", kb, *flags)[0] == 0
    code, out, _ = run(capsys, "classify", kb, "la fibra la fibra", *flags)
    assert code == 0 and json.loads(out)["category"] == "telco"


def test_evaluate_outputs(tmp_path, data_dir, capsys):
    fig = tmp_path / "acc.png"
    code, out, err = run(capsys, "evaluate", data_dir / "fixture_corpus.jsonl",
                         "--metrics", "cosine,euclidean", "--ks", "1", "--figure", fig)
    report = json.loads(out)
    assert code == 0
    assert [(c["metric"], c["k"]) for c in report["cells"]] == [("cosine", 1), ("euclidean", 1)]
    assert report["table"] in err
    assert fig.stat().st_size > 0 and report["figure"] == str(fig)

    code, out, _ = run(capsys, "evaluate", data_dir / "fixture_corpus.jsonl", "--protocol", "split",
                       "--seed", "3", "--split-ratio", "0.5", "--ks", "1,2")
    assert code == 0 and json.loads(out)["protocol"]["seed"] == 3


def test_evaluate_errors(data_dir, capsys):
    code, _, err = run(capsys, "evaluate", data_dir / "fixture_corpus.jsonl", "--protocol", "split")
    assert code == 2
    code, _, err = run(capsys, "evaluate", data_dir / "fixture_corpus.jsonl", "--ks", "9")
    assert code == 1 and json.loads(err)["error"] == "ProtocolInfeasible"
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", str(data_dir / "fixture_corpus.jsonl"), "--metrics", "cosine,nope"])
    assert exc.value.code == 2


def test_bench(kb_path, tmp_path, capsys):
    fig = tmp_path / "lat.png"
    code, out, _ = run(capsys, "bench", kb_path, "--queries", "20", "--workers", "1", "--figure", fig)
    one = json.loads(out)
    assert code == 0 and one["kbRows"] == 18 and one["queries"] == 20
    lat = one["latencyMs"]
    assert 0 < lat["min"] <= lat["mean"] <= lat["max"]
    assert lat["min"] <= lat["p95"] <= lat["max"]
    assert fig.stat().st_size > 0
    code, out, _ = run(capsys, "bench", kb_path, "--queries", "20", "--workers", "8")
    assert json.loads(out)["resultsDigest"] == one["resultsDigest"]


def test_bench_single_row_kb(tmp_path, capsys):
    corpus = tmp_path / "one.jsonl"
    corpus.write_text('{"category": "a", "text": "gatto"}\n', "utf-8")
    kb = tmp_path / "kb.json"
    run(capsys, "build", corpus, kb)
    code, out, _ = run(capsys, "bench", kb, "--queries", "5")
    rep = json.loads(out)
    assert code == 0 and rep["kbRows"] == 1 and rep["latencyMs"]["min"] > 0


def test_module_entry_point(tmp_path, data_dir):
    kb = tmp_path / "kb.json"
    proc = subprocess.run([sys.executable, "-m", "domainknn", "build",
                           str(data_dir / "fixture_corpus.jsonl"), str(kb)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "domainknn", "classify", str(kb)],
                          input="fibra lenta\n\ncalcio\n", capture_output=True, text=True)
    lines = proc.stdout.splitlines()
    assert proc.returncode == 0 and len(lines) == 3
    assert all(isinstance(json.loads(line), dict) for line in lines)
    proc = subprocess.run([sys.executable, "-m", "domainknn", "frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
