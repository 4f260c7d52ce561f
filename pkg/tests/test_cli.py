import csv
import io

import pytest

from cvkey import ChannelParams, MismatchParams, ResourceSpec, secret_key_rate
from cvkey.cli import run
from cvkey.resources import squeezing_from_cosh2r

SWEEP_HEADER = "L_km,key_rate_bits,i_ab_bits,chi_be_bits,entangled"


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_rate_matches_library(capsys):
    code = run(["rate", "--resource", "tmsv", "--cosh2r", "50", "--delta", "0.01",
                "--length-km", "15", "--eta", "1", "--beta", "0.95"])
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1
    b = secret_key_rate(ResourceSpec.tmsv(squeezing_from_cosh2r(50)), MismatchParams.direct(0.01),
                        ChannelParams(length_km=15, eta=1, beta=0.95))
    assert float(rows[0]["key_rate_bits"]) > 0
    assert float(rows[0]["key_rate_bits"]) == pytest.approx(b.key_rate, rel=1e-8)
    assert float(rows[0]["raw_rate"]) == pytest.approx(b.raw_rate, rel=1e-8)
    assert rows[0]["key_rate_bits"] == f"{b.key_rate:.8e}"


def test_sweep_distance_header(capsys):
    assert run(["sweep-distance", "--resource", "zpc", "--delta", "0.01", "--tbs", "0.9"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == SWEEP_HEADER
    rows = _rows(out)
    assert len(rows) == 200
    assert all(float(r["key_rate_bits"]) >= 0 for r in rows)


def test_sweep_eta(capsys):
    assert run(["sweep-eta", "--resource", "subtracted", "--start", "0.98", "--stop", "1.0005",
                "--step", "0.005"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [float(r["eta"]) for r in rows] == pytest.approx([0.98, 0.985, 0.99, 0.995, 1.0])


def test_no_key_exit_code(capsys):
    code = run(["max-distance", "--resource", "subtracted", "--k", "1", "--delta", "0.08", "--cosh2r", "50"])
    assert code == 4
    assert "no key at any distance" in capsys.readouterr().err


def test_min_eta_no_key(capsys):
    assert run(["min-eta", "--resource", "tmsv", "--delta", "0.08"]) == 4
    assert "no key even with perfect detectors" in capsys.readouterr().err


def test_max_distance_and_min_eta(capsys):
    assert run(["max-distance", "--resource", "zpc", "--tol", "0.05"]) == 0
    assert 125 <= float(_rows(capsys.readouterr().out)[0]["max_distance_km"]) <= 175
    assert run(["min-eta", "--resource", "zpc"]) == 0
    assert float(_rows(capsys.readouterr().out)[0]["min_eta"]) == pytest.approx(0.984, abs=0.01)


def test_entanglement(capsys):
    assert run(["entanglement", "--resource", "tmsv", "--r", "0.5", "--delta", "0.7"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert float(row["log_negativity_source"]) == 0.0
    assert float(row["delta_threshold"]) == pytest.approx(0.632121, abs=1e-6)


def test_oracle_check(capsys):
    assert run(["oracle-check"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 18 and all(r["ok"] == "1" for r in rows)


def test_oracle_check_truncation_is_numeric_error(capsys):
    assert run(["oracle-check", "--cosh2r", "50"]) == 3


@pytest.mark.parametrize("argv", [
    ["rate", "--bogus"],
    ["nonsense"],
    ["rate", "--r", "0.5", "--cosh2r", "50"],
    ["rate", "--eta", "1.5"],
    ["rate", "--resource", "photon-added"],
    ["rate", "--delta", "-0.1"],
    ["rate", "--delta", "0.1", "--epsilon", "0.5"],
    ["sweep-distance", "--start", "5", "--stop", "1"],
])
def test_config_errors(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[resource]\nkind = "subtracted"\ncosh2r = 50\nt_bs = 0.9\nk = 1\n'
        "[mismatch]\ndelta = 0.02\n"
        "[channel]\nlength_km = 20\neta = 0.995\nbeta = 0.95\n"
    )
    assert run(["rate", "--config", str(cfg)]) == 0
    from_file = _rows(capsys.readouterr().out)[0]
    assert from_file["resource"] == "subtracted"
    assert float(from_file["L_km"]) == 20 and float(from_file["delta"]) == 0.02
    assert run(["rate", "--config", str(cfg), "--length-km", "5", "--r", "0.7"]) == 0
    overridden = _rows(capsys.readouterr().out)[0]
    assert float(overridden["L_km"]) == 5
    b = secret_key_rate(ResourceSpec.subtracted(0.7, 0.9, 1), MismatchParams.direct(0.02),
                        ChannelParams(length_km=5, eta=0.995, beta=0.95))
    assert float(overridden["key_rate_bits"]) == pytest.approx(b.key_rate, rel=1e-8)


def test_every_numeric_flag_has_config_key(tmp_path, capsys):
    cfg = tmp_path / "all.toml"
    cfg.write_text(
        '[resource]\nkind = "zpc-loss"\nr = 1.2\nt_bs = 0.8\nk = 2\np_loss = 0.001\n'
        "[mismatch]\nn_unmatched = 2\nm_matched = 1\nepsilon = 0.5\nalpha = 2.0\nn_bar = 0.4\n"
        "[channel]\nlength_km = 3\nloss_coeff = 0.02\neta = 1.0\nbeta = 0.95\n"
        "[sweep]\nstart = 0\nstop = 2\nstep = 1\n"
        "[solver]\ntol = 0.1\n"
        f'[output]\npath = "{tmp_path / "out.csv"}"\n'
    )
    assert run(["sweep-distance", "--config", str(cfg)]) == 0
    rows = _rows((tmp_path / "out.csv").read_text())
    assert [float(r["L_km"]) for r in rows] == [0.0, 1.0]
    assert run(["rate", "--config", str(cfg), "--output", "-"]) == 0
    assert float(_rows(capsys.readouterr().out)[0]["delta"]) == pytest.approx(0.05)


def test_unknown_config_field(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[channel]\nlenght_km = 3\n")
    assert run(["rate", "--config", str(cfg)]) == 2


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep-distance", "--resource", "subtracted", "--delta", "0.02"]
    assert run(argv + ["-o", str(a)]) == 0
    assert run(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_key_floor_flag(tmp_path, capsys):
    argv = ["max-distance", "--resource", "zpc", "--beta", "0.97"]
    assert run(argv + ["--key-floor", "1e-4"]) == 0
    flag = _rows(capsys.readouterr().out)[0]["max_distance_km"]
    cfg = tmp_path / "floor.toml"
    cfg.write_text("[solver]\nkey_floor = 1e-4\n")
    assert run(argv + ["--config", str(cfg)]) == 0
    assert _rows(capsys.readouterr().out)[0]["max_distance_km"] == flag
    assert float(flag) == pytest.approx(150, abs=5)
