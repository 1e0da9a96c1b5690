import json

import pytest

from lexcontrol.cli import main
from lexcontrol.cogs import load_split
from lexcontrol.synthcogs import SMALL_SPEC, build_corpus, write_corpus
from lexcontrol.transform import VocabularyManifest


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("smallcogs")
    write_corpus(build_corpus(SMALL_SPEC), out)
    return out


def test_infer_subcommand(data_dir, tmp_path, capsys):
    rc = main([
        "infer",
        "--train", str(data_dir / "train.tsv"),
        "--gen", str(data_dir / "gen.tsv"),
        "--out-dir", str(tmp_path),
    ])
    assert rc == 0
    assert "21 controlled item(s)" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "run_manifest.json").read_text())
    assert manifest["subcommand"] == "infer"
    listed = {a["path"] for a in manifest["artifacts"]}
    assert listed == {"controlled_items.tsv", "controlled_items.json"}


def test_sample_subcommand_stdout(capsys):
    rc = main(["sample", "--length", "shorter", "--dist", "cvcv", "--seed", "4", "--count", "3"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    assert all(7 <= len(s) < 15 for s in lines)


def test_sample_subcommand_deterministic_file(tmp_path):
    out1 = tmp_path / "a" / "seqs.txt"
    out2 = tmp_path / "b" / "seqs.txt"
    for out in (out1, out2):
        rc = main(["sample", "--seed", "11", "--count", "5", "--out", str(out)])
        assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_scan_subcommand(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "a.txt").write_text("nothing to see here, bahufowu!")
    patterns = tmp_path / "patterns.txt"
    patterns.write_text("bahufowu\nqzqzqzqz\n")
    report_path = tmp_path / "scan.json"
    rc = main([
        "scan", "--patterns", str(patterns), "--corpus", str(corpus),
        "--report", str(report_path),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "absent: 1  present: 1" in out
    data = json.loads(report_path.read_text())
    counts = {p["pattern"]: p["count"] for p in data["patterns"]}
    assert counts == {"bahufowu": 1, "qzqzqzqz": 0}


def test_transform_sentinel_end_to_end(data_dir, tmp_path):
    out = tmp_path / "transformed"
    rc = main([
        "transform",
        "--train", str(data_dir / "train.tsv"),
        "--dev", str(data_dir / "dev.tsv"),
        "--test", str(data_dir / "test.tsv"),
        "--gen", str(data_dir / "gen.tsv"),
        "--mode", "sentinel",
        "--out-dir", str(out),
    ])
    assert rc == 0
    for name in ("train", "dev", "test", "gen"):
        assert (out / f"{name}.tsv").exists()
    plan = json.loads((out / "plan.json").read_text())
    assert len(plan["entries"]) == 21
    manifest = VocabularyManifest.parse((out / "vocab_manifest.txt").read_text())
    assert len(manifest.add_order()) == 42
    assert "hedgehog" not in (out / "train.tsv").read_text()


def test_transform_deterministic(data_dir, tmp_path):
    outs = []
    for sub in ("x", "y"):
        out = tmp_path / sub
        rc = main([
            "transform", "--train", str(data_dir / "train.tsv"),
            "--gen", str(data_dir / "gen.tsv"),
            "--mode", "charseq", "--length", "longer", "--dist", "random",
            "--seed", "33", "--out-dir", str(out),
        ])
        assert rc == 0
        outs.append(out)
    for name in ("train.tsv", "gen.tsv", "plan.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_testlex_subcommand(data_dir, tmp_path):
    out = tmp_path / "tl"
    rc = main([
        "testlex",
        "--train", str(data_dir / "train.tsv"),
        "--gen", str(data_dir / "gen.tsv"),
        "--total", "42", "--seed", "5",
        "--out-dir", str(out),
    ])
    assert rc == 0
    split = load_split(out / "testlex.tsv", "testlex")
    assert len(split) == 42
    report = json.loads((out / "testlex_report.json").read_text())
    assert report["ok"] is True


def test_evaluate_subcommand_perfect_predictions(data_dir, tmp_path, capsys):
    ref = data_dir / "gen.tsv"
    split = load_split(ref, "gen")
    preds = tmp_path / "preds.txt"
    preds.write_text("".join(r.target + "\n" for r in split.rows))
    out = tmp_path / "eval.json"
    rc = main([
        "evaluate", "--split", "gen", str(ref), str(preds), "--out", str(out),
    ])
    assert rc == 0
    assert "acc=1.000" in capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["splits"]["gen"]["accuracy"] == 1.0
    assert data["splits"]["gen"]["lexical_accuracy"] == 1.0


def test_evaluate_misaligned_predictions_nonzero_exit(data_dir, tmp_path, capsys):
    ref = data_dir / "gen.tsv"
    preds = tmp_path / "short.txt"
    preds.write_text("only one line\n")
    rc = main(["evaluate", "--split", "gen", str(ref), str(preds), "--out", str(tmp_path / "e.json")])
    assert rc == 1
    assert "mismatch" in capsys.readouterr().err


def test_report_subcommand(tmp_path, capsys):
    # two seed reports in one group, a singleton baseline group, plus a sweep
    from lexcontrol.evaluate import EvalReport, SplitEval

    files = []
    for i, acc in enumerate((0.68, 0.70)):
        rep = EvalReport()
        rep.add(SplitEval(split="gen", policy="strict", n=100, correct=int(acc * 100),
                          per_category={}))
        p = tmp_path / f"seed{i}.json"
        p.write_text(rep.to_json())
        files.append(str(p))
    singles = []
    for label, acc in (("mid", 0.75), ("baseline", 0.83)):
        rep = EvalReport()
        rep.add(SplitEval(split="gen", policy="strict", n=100, correct=int(acc * 100),
                          per_category={}))
        p = tmp_path / f"{label}.json"
        p.write_text(rep.to_json())
        singles.append((label, p))

    rc = main([
        "report",
        "--group", f"controlled={','.join(files)}",
        "--group", f"mid={singles[0][1]}",
        "--group", f"baseline={singles[1][1]}",
        "--sweep", "1000000,1000,0",
        "--metric", "gen/accuracy",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "controlled" in out and "baseline" in out
    assert "spearman" in out


def test_missing_file_reports_error(tmp_path, capsys):
    rc = main([
        "infer", "--train", str(tmp_path / "nope.tsv"), "--gen", str(tmp_path / "nope2.tsv"),
        "--out-dir", str(tmp_path),
    ])
    assert rc == 1
    assert "missing file" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
