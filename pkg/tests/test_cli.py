import json

import pytest

from apery_words.cli import cli_main


@pytest.fixture(autouse=True)
def _run_in_tmp(tmp_path, monkeypatch):
    # the default cache path is relative; keep it out of the repo
    monkeypatch.chdir(tmp_path)


def test_eval_both(capsys):
    assert cli_main(["eval", "S[2n^1 > 0]", "--method", "both", "--digits", "20",
                     "--cutoff", "5000", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["compiled"].startswith("0.6931471805599453094")
    assert float(out["deviation"]) < 1e-15


def test_eval_compiled_only(capsys):
    assert cli_main(["eval", "S2[2n-1^2 > 2n^1 > 0]", "--method", "compiled", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["compiled"].startswith("0.014864453782")
    assert out["weight_report"]["max_word_weight"] == 2


def test_compile_ir_roundtrips(capsys):
    for ir in ("trig", "words"):
        assert cli_main(["compile", "S[2n^2 > 0]", "--ir", ir]) == 0
        blob = capsys.readouterr().out.strip()
        assert blob == json.dumps(json.loads(blob), sort_keys=True)


def test_verify_subset(tmp_path, capsys):
    fixtures = [
        {
            "id": "t1",
            "series": "S[2n^1 > 0]",
            "closed_form": "log2",
            "anchor": "depth-1 even",
        },
        {
            "id": "t2",
            "series": "S[2n+1^1 >= 0]",
            "closed_form": "pi/2",
            "printed_value": "1.5707963",
            "anchor": "depth-1 odd",
        },
    ]
    path = tmp_path / "fx.json"
    path.write_text(json.dumps(fixtures))
    report_path = tmp_path / "report.json"
    rc = cli_main(["verify", "--fixtures", str(path), "--digits", "30",
                   "--cutoff", "5000", "--json", str(report_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "passed 2/2" in out
    report = json.loads(report_path.read_text())
    assert report["failed"] == 0


def test_verify_fail_exit_code(tmp_path, capsys):
    fixtures = [{"id": "bad", "series": "S[2n^1 > 0]", "printed_value": "0.700000000000"}]
    path = tmp_path / "fx.json"
    path.write_text(json.dumps(fixtures))
    assert cli_main(["verify", "--fixtures", str(path), "--digits", "25", "--cutoff", "5000"]) == 1


def test_constants_output(capsys):
    assert cli_main(["constants", "--digits", "15"]) == 0
    out = capsys.readouterr().out
    assert "zeta2" in out and "3.14159265358979" in out


def test_harmonic_command(capsys):
    rc = cli_main(["harmonic", "--k", "1", "--l", "", "--head", "2n-1^1",
                   "--binom", "2", "--digits", "20", "--cutoff", "5000", "--json"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    # (8 log 2 - 4)/pi
    assert out["compiled"].startswith("0.4918452564")
    assert float(out["deviation"]) < 1e-8


def test_usage_error_status():
    with pytest.raises(SystemExit) as exc:
        cli_main(["eval"])  # missing spec
    assert exc.value.code == 2


def test_bad_spec_status(capsys):
    assert cli_main(["eval", "S[2n^1 >= 0]"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cache_env_override(tmp_path, monkeypatch, capsys):
    cache_file = tmp_path / "env-cache.jsonl"
    monkeypatch.setenv("CMZV_CACHE", str(cache_file))
    assert cli_main(["eval", "S[2n+1^2 >= 0]", "--method", "compiled"]) == 0
    capsys.readouterr()
    assert cache_file.exists() and cache_file.read_text().strip()
