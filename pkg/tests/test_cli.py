import json
import logging
from pathlib import Path

import pytest

from eisgen import cache
from eisgen.cli import (EXIT_FALSE, EXIT_INDETERMINATE, EXIT_OK, EXIT_USAGE, ScanConfig,
                        UsageError, cmd_irregular, cmd_scan, exit_status, main, report_body,
                        run_pair)

GOLDEN = Path(__file__).resolve().parents[1] / "docs" / "golden"


def _pairs(max_p):
    return [(pair.p, pair.k) for pair, _ in cmd_irregular(max_p)]


def test_irregular_examples():
    assert _pairs(40) == [(37, 32)]
    assert _pairs(31) == []
    got = _pairs(160)
    assert len(got) == 9 and got[-2:] == [(157, 62), (157, 110)]
    with pytest.raises(UsageError):
        list(cmd_irregular(3))


def test_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", "--p", "37", "--k", "32", "--json", str(tmp_path / "r.json")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict=true" in out
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["result"]["verdict"] == "true"
    assert main(["verify", "--p", "59", "--k", "44"]) == EXIT_OK


def test_verify_usage_error_shows_residue(capsys):
    assert main(["verify", "--p", "37", "--k", "30"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "B_30 = 2 mod 37" in err
    assert main(["verify", "--p", "36", "--k", "30"]) == EXIT_USAGE
    assert main(["verify", "--p", "37", "--k", "36"]) == EXIT_USAGE


def test_exit_status_contract():
    assert exit_status([]) == EXIT_OK
    assert exit_status(["true", "true"]) == EXIT_OK
    assert exit_status(["true", "indeterminate"]) == EXIT_INDETERMINATE
    assert exit_status(["indeterminate", "false"]) == EXIT_FALSE
    assert len({EXIT_OK, EXIT_FALSE, EXIT_INDETERMINATE, EXIT_USAGE}) == 4


def test_scan_empty(capsys):
    assert main(["scan", "--max-p", "31"]) == EXIT_OK


def test_config_validation():
    with pytest.raises(UsageError):
        ScanConfig(max_p=3)
    with pytest.raises(UsageError):
        ScanConfig(precision=1)
    with pytest.raises(UsageError):
        ScanConfig(jobs=0)


def test_golden_report_matches():
    golden = json.loads((GOLDEN / "report_p37_k32.json").read_text())
    fresh = run_pair(37, 32, ScanConfig(max_p=37))
    assert report_body(json.loads(json.dumps(fresh))) == report_body(golden)


def test_report_round_trip(tmp_path):
    rec = run_pair(37, 32, ScanConfig(max_p=37))
    text = json.dumps(rec, sort_keys=True)
    assert json.loads(text) == json.loads(json.dumps(json.loads(text), sort_keys=True))
    assert json.loads(text)["schema_version"] == 1


def test_cache_round_trip_and_corruption(tmp_path, caplog):
    cfg = ScanConfig(max_p=60, cache_dir=str(tmp_path))
    cold = run_pair(59, 44, cfg)
    assert cold["run"]["cache_hit"] is False
    warm = run_pair(59, 44, cfg)
    assert warm["run"]["cache_hit"] is True
    assert report_body(cold) == report_body(warm)
    path = cache.cache_path(tmp_path, 59, 44, "full", 2, 1)
    doc = json.loads(path.read_text())
    row = doc["T"][1][0].split()
    row[0] = str((int(row[0]) + 1) % 59**2)
    doc["T"][1][0] = " ".join(row)
    path.write_text(json.dumps(doc))
    with caplog.at_level(logging.WARNING):
        again = run_pair(59, 44, cfg)
    assert "corrupt" in caplog.text
    assert again["run"]["cache_hit"] is False
    assert report_body(again) == report_body(cold)
    # the rebuilt file is valid again
    assert cache.load(tmp_path, 59, 44, "full", 2, 1) is not None


def test_cache_env_default(monkeypatch, tmp_path):
    monkeypatch.setenv(cache.CACHE_ENV, str(tmp_path))
    assert main(["verify", "--p", "37", "--k", "32"]) == EXIT_OK
    assert list(tmp_path.glob("hecke_p37_k32_*.json"))


def test_scan_outputs(tmp_path, capsys):
    js, cs = tmp_path / "s.json", tmp_path / "s.csv"
    code = main(["scan", "--max-p", "60", "--jobs", "2", "--json", str(js), "--csv", str(cs)])
    assert code == EXIT_OK
    doc = json.loads(js.read_text())
    assert doc["summary"]["true"] == 2 and doc["summary"]["pairs"] == 2
    lines = cs.read_text().splitlines()
    assert lines[0].startswith("p,k,variant") and len(lines) == 3
    golden = json.loads((GOLDEN / "scan_maxp60.json").read_text())
    assert [report_body(r) for r in doc["records"]] == [report_body(r) for r in golden["records"]]


def test_scan_pairs_and_plus_variant(capsys):
    doc, code = cmd_scan(ScanConfig(pairs=((37, 32),), variant="plus"))
    assert code == EXIT_OK and doc["records"][0]["result"]["d"] == 2


def test_exact_check_flag(capsys):
    assert main(["verify", "--p", "37", "--k", "32", "--exact-check"]) == EXIT_OK
    rec = run_pair(37, 32, ScanConfig(max_p=37, exact_check=True))
    assert rec["exact_check"]["agree"] and rec["exact_check"]["compared"] > 0


def test_irregular_command(tmp_path, capsys):
    assert main(["irregular", "--max-p", "160", "--csv", str(tmp_path / "i.csv")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "9 irregular pairs" in out
