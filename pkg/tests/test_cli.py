import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from sagnac_switch.cli import main, parse_matrix
from sagnac_switch.elements import parse_sequence, sequence_matrix
from sagnac_switch.gates import gate
from sagnac_switch.su2 import pauli, phase_equal

REPO = Path(__file__).resolve().parents[1]
NOISE_TOML = REPO / "configs" / "default_noise.toml"


def extract_train(stdout: str) -> str:
    for line in stdout.splitlines():
        if line.startswith("train: "):
            return line[len("train: "):]
    raise AssertionError(f"no train line in output:\n{stdout}")


def test_parse_matrix():
    m = parse_matrix("0,1;1,0")
    assert np.allclose(m, pauli("x"))
    m = parse_matrix("0.5+0.5i, 0.5-0.5i; 0.5-0.5i, 0.5+0.5i")
    assert abs(m[0, 0] - (0.5 + 0.5j)) < 1e-12


def test_synth_gate_round_trip(capsys):
    assert main(["synth", "--gate", "4"]) == 0
    train = extract_train(capsys.readouterr().out)
    seq = parse_sequence(train)
    target = gate(4)
    for direction in ("forward", "backward"):
        assert phase_equal(sequence_matrix(seq, direction), target, 1e-9)


def test_synth_axis_round_trip(capsys):
    assert main(["synth", "--axis", "x", "--angle", "180"]) == 0
    train = extract_train(capsys.readouterr().out)
    seq = parse_sequence(train)
    assert phase_equal(sequence_matrix(seq, "forward"), pauli("x"), 1e-9)


def test_synth_identity_matrix(capsys):
    assert main(["synth", "--matrix", "1,0;0,1"]) == 0
    out = capsys.readouterr().out
    assert "verification" in out


def test_synth_errors(capsys):
    assert main(["synth", "--matrix", "1,1;0,1"]) == 3      # not unitary
    assert main(["synth", "--matrix", "nonsense"]) == 3     # parse failure
    with pytest.raises(SystemExit) as exc:
        main(["synth"])                                     # no target: usage
    assert exc.value.code == 2


def test_verify_against_target(capsys):
    assert main(["synth", "--gate", "2"]) == 0
    train = extract_train(capsys.readouterr().out)
    assert main(["verify", "--train", train, "--gate", "2"]) == 0
    out = capsys.readouterr().out
    assert "reciprocal (up_to_phase" in out
    assert "yes" in out
    fid_lines = [l for l in out.splitlines() if l.startswith(("fw", "bw"))]
    for line in fid_lines:
        assert float(line.split(":")[1]) > 1 - 1e-9


def test_verify_bad_train(capsys):
    assert main(["verify", "--train", "QWP:xx"]) == 3


def test_verify_non_reciprocal_train(capsys):
    assert main(["verify", "--train", "QWP:45"]) == 0
    assert "no" in capsys.readouterr().out


def test_discriminate_ideal(tmp_path, capsys):
    out = tmp_path / "ideal"
    assert main(["discriminate", "--ideal", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "success.csv")))
    assert len(rows) == 52
    assert all(float(r["p_s"]) == pytest.approx(1.0, abs=1e-9) for r in rows)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mean"] == pytest.approx(1.0, abs=1e-9)
    assert summary["bound_mean"] == 0.904
    assert summary["bound_min"] == 0.841
    assert (out / "config-echo.toml").exists()


def test_discriminate_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["discriminate", "--ideal", "--runs", "0", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_discriminate_noise_requires_seed(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("SWITCH_SEED", raising=False)
    out = tmp_path / "x"
    code = main(["discriminate", "--noise", str(NOISE_TOML), "--out", str(out)])
    assert code == 3


def test_discriminate_missing_noise_file(tmp_path):
    code = main(["discriminate", "--noise", str(tmp_path / "nope.toml"),
                 "--seed", "1", "--out", str(tmp_path / "y")])
    assert code == 3


def test_discriminate_noise_run(tmp_path, capsys):
    out = tmp_path / "noisy"
    assert main(["discriminate", "--noise", str(NOISE_TOML), "--runs", "2",
                 "--seed", "5", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "success.csv")))
    assert len(rows) == 2 * 52
    values = [float(r["p_s"]) for r in rows]
    assert 0.98 <= min(values) <= 1.0
    counts = list(csv.DictReader(open(out / "counts.csv")))
    assert len(counts) == 2 * 52
    pair_rows = list(csv.DictReader(open(out / "pairs.csv")))
    assert len(pair_rows) == 52
    assert list(pair_rows[0]) == ["i", "j", "class", "p_s"]
    summary = json.loads((out / "summary.json").read_text())
    assert 0.98 <= summary["mean"] <= 1.0
    assert summary["seed"] == 5


def test_discriminate_env_seed(tmp_path, monkeypatch, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    monkeypatch.setenv("SWITCH_SEED", "17")
    assert main(["discriminate", "--noise", str(NOISE_TOML), "--runs", "1",
                 "--out", str(out1)]) == 0
    assert main(["discriminate", "--noise", str(NOISE_TOML), "--runs", "1",
                 "--seed", "17", "--out", str(out2)]) == 0
    assert (out1 / "success.csv").read_bytes() == (out2 / "success.csv").read_bytes()


def test_stochastic_commands_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["discriminate", "--noise", str(NOISE_TOML), "--runs", "2",
            "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    for name in ("success.csv", "counts.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()

    t1, t2 = tmp_path / "t1", tmp_path / "t2"
    targs = ["tomo", "--unitaries", "4", "--shots", "500", "--jitter-deg",
             "0.1", "--seed", "2"]
    assert main(targs + ["--out", str(t1)]) == 0
    assert main(targs + ["--out", str(t2)]) == 0
    for name in ("fidelity.csv", "reciprocity.csv", "histogram.csv",
                 "summary.json"):
        assert (t1 / name).read_bytes() == (t2 / name).read_bytes()


def test_witness_command(tmp_path, capsys):
    out = tmp_path / "wit"
    assert main(["witness", "--check-pairs", "20", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "tr[S W_switch] = 1.000000000" in stdout
    assert "0.904" in stdout
    summary = json.loads((out / "summary.json").read_text())
    assert summary["witness_value"] == pytest.approx(1.0, abs=1e-9)
    assert summary["max_probability_residual"] < 1e-9
    assert summary["fixed_order_mean"] == pytest.approx(28 / 52, abs=1e-12)
    assert summary["n_terms"] == 52


def test_tomo_outputs(tmp_path, capsys):
    out = tmp_path / "tomo"
    assert main(["tomo", "--unitaries", "5", "--shots", "0", "--seed", "4",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "fidelity.csv")))
    assert len(rows) == 10  # fw and bw per target
    assert all(float(r["fidelity"]) >= 1 - 1e-9 for r in rows)
    recs = list(csv.DictReader(open(out / "reciprocity.csv")))
    assert all(float(r["reciprocity"]) >= 1 - 1e-9 for r in recs)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mean_fidelity"] >= 1 - 1e-9


def test_tomo_requires_seed(monkeypatch):
    monkeypatch.delenv("SWITCH_SEED", raising=False)
    assert main(["tomo", "--unitaries", "2"]) == 3


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
