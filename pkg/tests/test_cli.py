"""Command-line behavior: artifact production, metric output, exit
codes, and the usage-error paths."""

import json
import os

import pytest
from qaharvest.cli import entry
from qaharvest.extractor import ExtractorConfig
from qaharvest.generator import GeneratorConfig
from qaharvest.pipeline import PipelineConfig, span_record, write_span_records
from synth import number_paragraphs, squad_json


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text(squad_json(2), encoding="utf-8")
    return str(path)


@pytest.fixture()
def question_file(tmp_path):
    path = tmp_path / "questions.txt"
    path.write_text("who founded tesla ?\nwhat percentage of gdp fell ?\n", encoding="utf-8")
    return str(path)


def train_tiny(tmp_path, corpus_file):
    """Two fast CLI training runs; returns the artifact directory."""
    out = tmp_path / "run"
    qg_cfg = tmp_path / "qg_cfg.json"
    GeneratorConfig.desk(word_dim=4, hidden_dim=3, coref_feat_dim=2, answer_feat_dim=2, epochs=2).to_json(qg_cfg)
    assert entry(["train-qg", "--data", corpus_file, "--out", str(out), "--config", str(qg_cfg)]) == 0
    ext_cfg = tmp_path / "ext_cfg.json"
    ExtractorConfig.desk(word_dim=4, char_dim=2, char_hidden=2, ner_dim=2, hidden_dim=3, epochs=1).to_json(ext_cfg)
    assert entry(["train-ext", "--data", corpus_file, "--out", str(out), "--config", str(ext_cfg)]) == 0
    return out


# ------------------------------------------------------- train + harvest


def test_train_and_harvest_artifacts(tmp_path, corpus_file, capsys):
    out = train_tiny(tmp_path, corpus_file)
    for name in (
        "qg.ckpt",
        "qg_vocab.json",
        "qg_train.csv",
        "ext.ckpt",
        "ext_word_vocab.json",
        "ext_char_vocab.json",
        "ext_train.csv",
    ):
        assert (out / name).exists(), name
    assert (out / "qg_train.csv").read_text().startswith("epoch,train_nll,dev_ppl")
    assert (out / "ext_train.csv").read_text().startswith("epoch,train_nll,dev_f1")

    pipe = PipelineConfig(
        extractor_checkpoint=str(out / "ext.ckpt"),
        qg_checkpoint=str(out / "qg.ckpt"),
        qg_word_vocab=str(out / "qg_vocab.json"),
        ext_word_vocab=str(out / "ext_word_vocab.json"),
        ext_char_vocab=str(out / "ext_char_vocab.json"),
        max_decode_len=8,
    )
    cfg_path = tmp_path / "pipe.json"
    pipe.to_json(cfg_path)
    capsys.readouterr()

    # one-epoch models may extract nothing; the point here is plumbing
    # and byte-level determinism, not harvest quality
    first = tmp_path / "records_a.jsonl"
    second = tmp_path / "records_b.jsonl"
    assert entry(["harvest", "--config", str(cfg_path), "--data", corpus_file, "--out", str(first)]) == 0
    assert "wrote" in capsys.readouterr().out
    assert entry(["harvest", "--config", str(cfg_path), "--data", corpus_file, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    for line in first.read_text().splitlines():
        rec = json.loads(line)
        assert rec["question"].endswith("?")
        assert rec["char_start"] < rec["char_end"]


def test_train_qg_rejects_empty_data(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"data": []}))
    assert entry(["train-qg", "--data", str(empty), "--out", str(tmp_path / "o")]) == 2


def test_train_rejects_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert entry(["train-ext", "--data", str(bad), "--out", str(tmp_path / "o")]) == 2


# -------------------------------------------------------------- eval-qg


def test_eval_qg_identical_files_scores_one(question_file, capsys):
    assert entry(["eval-qg", "--candidates", question_file, "--references", question_file]) == 0
    out = capsys.readouterr().out
    assert "BLEU-4 1.0000" in out
    assert "METEOR: not implemented" in out


def test_eval_qg_floor_gates_exit_code(question_file, capsys):
    assert entry(["eval-qg", "--candidates", question_file, "--references", question_file, "--floor", "1.01"]) == 1
    assert "below floor" in capsys.readouterr().err


def test_eval_qg_json_output(question_file, capsys):
    assert entry(["eval-qg", "--candidates", question_file, "--references", question_file, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out.splitlines()[0])
    assert payload["bleu"] == 1.0


def test_eval_qg_length_mismatch_is_usage_error(tmp_path, question_file, capsys):
    short = tmp_path / "short.txt"
    short.write_text("who founded tesla ?\n")
    assert entry(["eval-qg", "--candidates", question_file, "--references", str(short)]) == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------- eval-ext


@pytest.fixture()
def gold_span_file(tmp_path):
    paras = number_paragraphs(3)
    rows = [span_record(p, s) for p, spans in paras for s in spans]
    path = tmp_path / "gold.jsonl"
    write_span_records(rows, path)
    return str(path)


def test_eval_ext_identical_spans_all_ones(gold_span_file, capsys):
    assert entry(["eval-ext", "--predicted", gold_span_file, "--gold", gold_span_file]) == 0
    out = capsys.readouterr().out
    for regime in ("exact", "binary", "proportional"):
        assert f"{regime:>12}  P 1.0000  R 1.0000  F1 1.0000" in out


def test_eval_ext_floor_and_json(gold_span_file, capsys):
    assert entry(["eval-ext", "--predicted", gold_span_file, "--gold", gold_span_file, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out.splitlines()[0])
    assert payload["proportional"]["f1"] == 1.0
    assert entry(["eval-ext", "--predicted", gold_span_file, "--gold", gold_span_file, "--floor", "1.5"]) == 1


# ---------------------------------------------------- gradcheck + stats


def test_gradcheck_passes_and_reports(capsys):
    assert entry(["gradcheck"]) == 0
    out = capsys.readouterr().out
    assert "max relative error" in out
    for name in ("gate", "encode", "decode_step", "nll_loss", "crf", "crf_nll"):
        assert name in out


def test_gradcheck_impossible_threshold_fails(capsys):
    assert entry(["gradcheck", "--threshold", "1e-300"]) == 1


def test_stats_histogram(question_file, capsys):
    assert entry(["stats", "--questions", question_file]) == 0
    out = capsys.readouterr().out
    assert "who" in out and "what percentage" in out
    assert out.strip().splitlines()[-1].split()[-1] == "2"


def test_stats_reads_harvest_records(tmp_path, capsys):
    path = tmp_path / "records.jsonl"
    rows = [{"question": "who won ?"}, {"question": "where is oslo ?"}, {"question": "who lost ?"}]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    assert entry(["stats", "--records", str(path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split() == ["who", "2"]
    assert lines[-1].split() == ["total", "3"]


def test_stats_empty_input_is_usage_error(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert entry(["stats", "--questions", str(empty)]) == 2


# ------------------------------------------------------------ exit codes


def test_missing_files_exit_2(question_file, capsys):
    assert entry(["eval-qg", "--candidates", "/no/such/file", "--references", question_file]) == 2
    assert "not found" in capsys.readouterr().err
    assert entry(["harvest", "--config", "/no/such/config.json", "--data", question_file, "--out", "x"]) == 2


def test_harvest_missing_checkpoint_exits_2(tmp_path, corpus_file, capsys):
    cfg = PipelineConfig("gone.ckpt", "gone2.ckpt", "v.json", "w.json", "c.json")
    path = tmp_path / "pipe.json"
    cfg.to_json(path)
    assert entry(["harvest", "--config", str(path), "--data", corpus_file, "--out", str(tmp_path / "r.jsonl")]) == 2
    assert "not found" in capsys.readouterr().err


def test_unknown_flag_exits_2(capsys):
    assert entry(["eval-qg", "--bogus"]) == 2
    capsys.readouterr()


def test_unknown_subcommand_exits_2(capsys):
    assert entry(["frobnicate"]) == 2
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert entry(["--help"]) == 0
    assert "qaharvest" in capsys.readouterr().out
