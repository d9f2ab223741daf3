import json
import subprocess
import sys

import pytest

from tim import synth
from tim.cli import main

from conftest import FIXTURE, write_jsonl


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "tim" in capsys.readouterr().out


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_run_fixture(tmp_path):
    assert main(["run", "--config", str(FIXTURE / "config.toml"), "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "incidents.geojson").exists()


def test_run_bad_config_exit_1(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("nope = 1\n", encoding="utf-8")
    assert main(["run", "--config", str(cfg)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_bad_timezone_exit_1(tmp_path):
    code = main(["--tz", "Mars/Olympus", "run", "--config", str(FIXTURE / "config.toml"),
                 "--out-dir", str(tmp_path)])
    assert code == 1


def test_stagewise_commands(tmp_path):
    corpus = write_jsonl(tmp_path / "corpus.jsonl",
                         [{"text": d.text, "label": d.label} for d in synth.incident_corpus(60, seed=2)])
    model = tmp_path / "model.json"
    assert main(["--seed", "3", "train", "--labels", "incident", "--in", str(corpus), "--model", str(model),
                 "--buckets", "4096", "--lr", "0.5", "--epochs", "20"]) == 0
    labeled = tmp_path / "labeled.jsonl"
    assert main(["classify", "--model", str(model), "--in", str(FIXTURE / "posts.jsonl"),
                 "--out", str(labeled), "--hashtag", "#AlertMPK"]) == 0
    rows = [json.loads(l) for l in labeled.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 18 and all("label" in r for r in rows)

    incidents = tmp_path / "incidents.jsonl"
    assert main(["geoparse", "--posts", str(labeled), "--gazetteer", str(FIXTURE / "gazetteer.csv"),
                 "--registry", str(FIXTURE / "lines.csv"), "--out", str(incidents)]) == 0
    assert incidents.read_text(encoding="utf-8").strip()

    impact = tmp_path / "impact.json"
    assert main(["impact", "--incidents", str(incidents), "--regions", str(FIXTURE / "regions.geojson"),
                 "--flows", str(FIXTURE / "flows.csv"), "--out", str(impact)]) == 0
    doc = json.loads(impact.read_text(encoding="utf-8"))
    assert doc["total_passengers"] == sum(doc["per_region"].values())

    out = tmp_path / "lines.csv"
    assert main(["lines", "--posts", str(FIXTURE / "posts.jsonl"), "--registry", str(FIXTURE / "lines.csv"),
                 "--hashtag", "#AlertMPK", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").splitlines()[1] == "line_id,mode,posts"


def test_sentiment_command(tmp_path):
    model = tmp_path / "s.json"
    assert main(["train", "--labels", "sentiment", "--in", str(FIXTURE / "sentiment_corpus.jsonl"),
                 "--model", str(model), "--lr", "0.5", "--epochs", "25"]) == 0
    out = tmp_path / "s.csv"
    assert main(["sentiment", "--model", str(model), "--posts", str(FIXTURE / "posts.jsonl"),
                 "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[1] == "post_id,comment_id,sentiment"
    assert len(lines) > 2


def test_agreement_command(tmp_path):
    ann = tmp_path / "ann.csv"
    rows = ["item_id,annotator_id,label"]
    for i, (x, y) in enumerate([("a", "a"), ("a", "b"), ("b", "b"), ("b", "b")]):
        rows += [f"{i},u1,{x}", f"{i},u2,{y}"]
    ann.write_text("\n".join(rows) + "\n", encoding="utf-8")
    out = tmp_path / "k.json"
    assert main(["agreement", "--in", str(ann), "--out", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    # po = 0.75, pe = (2*1 + 2*3) / 16 = 0.5
    assert doc["pairs"][0]["kappa"] == pytest.approx(0.5)
    assert doc["mean_kappa"] == pytest.approx(0.5)


def test_input_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"text": "x"}\n', encoding="utf-8")
    assert main(["train", "--labels", "incident", "--in", str(bad), "--model", str(tmp_path / "m")]) == 1
    err = capsys.readouterr().err
    assert "bad.jsonl:1" in err
    assert main(["agreement", "--in", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tim.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "geoparse" in proc.stdout
