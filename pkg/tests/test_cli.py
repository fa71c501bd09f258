import json
import math

import pytest

from carleman_lab import cli


def test_exponents_table(capsys, tmp_path):
    assert cli.run(["exponents", "--n", "3", "--s", "7", "--t", "9", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    lines = dict(line.split(None, 1) for line in out.splitlines())
    assert float(lines["kappa"]) == pytest.approx(4.0)
    assert float(lines["Pi"]) == pytest.approx(16 / 7)
    assert {"mu", "p", "q", "beta0", "beta1"} <= set(lines)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["mode"] == "VW"


def test_inadmissible_exits_2(capsys):
    assert cli.run(["exponents", "--n", "3", "--s", "3"]) == 2
    assert "s ≤ (3n−2)/2" in capsys.readouterr().err


def test_bad_subcommand_and_flag_values(capsys):
    assert cli.run(["nonsense"]) == 2
    assert cli.run(["exponents", "--n", "three"]) == 2
    assert "cannot parse" in capsys.readouterr().err


def test_vanishing_order_single_harmonic(capsys):
    assert cli.run(["vanishing-order", "--corpus", "harmonic:k=3"]) == 0
    assert "slope 3.00" in capsys.readouterr().out


def test_empty_corpus_exits_2(capsys):
    assert cli.run(["vanishing-order", "--corpus", "harmonic:k_max=-1"]) == 2
    assert "EmptyCorpus" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# regime\nn = 3\ns = 3\nt=inf\n")
    assert cli.run(["exponents", "--config", str(cfg)]) == 2
    assert cli.run(["exponents", "--config", str(cfg), "--s", "7"]) == 0
    c = cli.parse_config(["exponents", "--config", str(cfg), "--s", "7"])
    assert c.s == 7.0 and math.isinf(c.t)
    cfg.write_text("bogus = 1\n")
    assert cli.run(["exponents", "--config", str(cfg)]) == 2


def test_mode_inference():
    assert cli.parse_config(["exponents", "--s", "7"]).regime().mode == "W-only"
    assert cli.parse_config(["exponents", "--t", "7"]).regime().mode == "V-only"
    assert cli.parse_config(["exponents"]).regime().mode == "VW"


def test_constants_round_trip(tmp_path):
    const = tmp_path / "constants.json"
    assert cli.run(["calibrate-constants", "--corpus", "harmonic:k_max=3", "--constants-file", str(const)]) == 0
    data = json.loads(const.read_text())
    assert data["version"] == cli.CONSTANTS_VERSION and len(data["corpus_hash"]) == 64
    assert data["constants"]["vanishing-order"]["C1"] == data["constants"]["vanishing-order"]["C2"]
    assert cli.run(["vanishing-order", "--corpus", "harmonic:k_max=3", "--constants-file", str(const)]) == 0
    data["version"] = 99
    const.write_text(json.dumps(data))
    assert cli.run(["vanishing-order", "--constants-file", str(const)]) == 2


def test_three_ball_and_caccioppoli_reports(tmp_path):
    for sub in ("three-ball", "caccioppoli"):
        out = tmp_path / sub
        assert cli.run([sub, "--corpus", "harmonic:k_max=3", "--out", str(out)]) == 0
        assert any((out / "reports").glob("*.csv"))
        assert json.loads((out / "config.json").read_text())["subcommand"] == sub


def test_verify_carleman_small_run(tmp_path):
    argv = ["verify-carleman", "--corpus", "carleman:size=3", "--tau-min", "2", "--tau-max", "4",
            "--tau-steps", "2", "--out", str(tmp_path)]
    code = cli.run(argv)
    assert code in (0, 1)
    assert (tmp_path / "summary.json").exists()
    assert cli.run(["verify-carleman", "--tau-steps", "1"]) == 2


def test_threads_env(monkeypatch):
    monkeypatch.setenv("CARLEMAN_LAB_THREADS", "3")
    assert cli.threads() == 3
    assert cli.pmap(lambda x: x * x, [1, 2, 3]) == [1, 4, 9]
    monkeypatch.setenv("CARLEMAN_LAB_THREADS", "x")
    assert cli.threads() == 1


def test_number_formatting():
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(True) == "true"
