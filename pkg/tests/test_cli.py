from pathlib import Path

import pytest

from conftest import DATA
from powerscore.cli import main

DICT = str(DATA / "mini_dict.txt")


@pytest.fixture()
def corpus(tmp_path):
    ref = tmp_path / "ref.tsv"
    ref.write_text("u1\tthe cat sat on anatomy\nu2\tall at water\nu3\tface-to-face\n")
    hyp = tmp_path / "sysA.tsv"
    hyp.write_text("u1\ta cat sat in and that to me\nu2\tor water\nu3\tface to face\n")
    return ref, hyp


def test_score_to_stdout(corpus, capsys):
    ref, hyp = corpus
    assert main(["score", str(ref), str(hyp), "--dict", DICT]) == 0
    out = capsys.readouterr().out
    assert "Scores by system" in out
    assert "sysA" in out


def test_score_writes_files(corpus, tmp_path):
    ref, hyp = corpus
    out_dir = tmp_path / "out"
    assert (
        main(
            ["score", str(ref), str(hyp), "--dict", DICT, "--out", str(out_dir),
             "--dump-alignments"]
        )
        == 0
    )
    assert (out_dir / "summary.txt").exists()
    assert (out_dir / "alignments.tsv").exists()


def test_features_csv_format(corpus, capsys):
    ref, hyp = corpus
    assert main(["features", str(ref), str(hyp), "--dict", DICT]) == 0
    out = capsys.readouterr().out
    header = out.splitlines()[0]
    assert header.startswith("utt_id,sys_id,ref_len,wer,power,WER.S,WER.D,WER.I,WER.SS,")
    assert len(out.splitlines()) == 4


def test_confusions_lists_pairs(corpus, capsys):
    ref, hyp = corpus
    assert main(["confusions", str(ref), str(hyp), "--dict", DICT]) == 0
    out = capsys.readouterr().out
    assert "and that to me" in out
    assert "face to face" in out


def test_confusions_csv_with_top(corpus, capsys):
    ref, hyp = corpus
    assert main(["confusions", str(ref), str(hyp), "--dict", DICT, "--format", "csv", "--top", "2"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "count,reference,hypothesis"
    assert len(out.splitlines()) == 3


def test_normalize_writes_hyp_files(corpus, tmp_path):
    ref, hyp = corpus
    out_dir = tmp_path / "norm"
    assert main(["normalize", str(ref), str(hyp), "--dict", DICT, "--out", str(out_dir)]) == 0
    norm = (out_dir / "sysA.normalized.tsv").read_text()
    assert "u3\tface-to-face" in norm


def test_normalize_requires_out(corpus):
    ref, hyp = corpus
    assert main(["normalize", str(ref), str(hyp), "--dict", DICT]) == 1


def test_no_phonetic_makes_power_equal_wer(corpus, capsys):
    ref, hyp = corpus
    assert main(["features", str(ref), str(hyp), "--dict", DICT, "--no-phonetic"]) == 0
    out = capsys.readouterr().out
    for line in out.splitlines()[1:]:
        cells = line.split(",")
        assert cells[3] == cells[4]  # wer == power


def test_missing_dictionary_file_exits_one(corpus):
    ref, hyp = corpus
    assert main(["score", str(ref), str(hyp), "--dict", "/nonexistent.dict"]) == 1


def test_missing_hyp_file_exits_one(corpus, tmp_path):
    ref, _ = corpus
    assert main(["score", str(ref), str(tmp_path / "none.tsv"), "--dict", DICT]) == 1


def test_usage_error_exits_one():
    assert main(["score"]) == 1


def test_duplicate_ref_id_exits_one(tmp_path):
    ref = tmp_path / "ref.tsv"
    ref.write_text("u1\ta\nu1\tb\n")
    hyp = tmp_path / "h.tsv"
    hyp.write_text("u1\ta\n")
    assert main(["score", str(ref), str(hyp), "--dict", DICT]) == 1


def test_oracle_normalize_flag(corpus, capsys):
    ref, hyp = corpus
    assert main(["confusions", str(ref), str(hyp), "--dict", DICT, "--oracle-normalize"]) == 0
    out = capsys.readouterr().out
    assert "face to face" not in out
    assert "and that to me" in out
