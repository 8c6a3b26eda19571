import json
import subprocess
import sys

import pytest

from urdd.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_gen_ur_sym(capsys):
    code, out, _ = run(capsys, "gen", "--family", "ur-sym", "--n", "8")
    assert code == 0
    d = json.loads(out)
    assert d["phases_over_pi"] == ["0/1", "1/2", "3/2", "1/1", "1/1", "3/2", "1/2", "0/1"]
    assert d["n"] == 8 and d["name"] == "UR8"


def test_gen_xy4_csv(capsys):
    code, out, _ = run(capsys, "gen", "--family", "ur", "--n", "4", "--phi2-over-pi", "1/2", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["index,phase_over_pi", "1,0/1", "2,1/2", "3,0/1", "4,1/2"]


def test_gen_negative_sign(capsys):
    code, out, _ = run(capsys, "gen", "--family", "ur-sym", "--n", "6", "--sign", "-")
    assert json.loads(out)["phases_over_pi"] == ["0/1", "4/3", "0/1", "0/1", "4/3", "0/1"]


@pytest.mark.parametrize("argv", [
    ("gen", "--family", "ur", "--n", "5"),
    ("gen", "--family", "ur-sym", "--n", "2"),
    ("gen", "--family", "xy4", "--n", "6"),
    ("gen", "--family", "ur"),
])
def test_gen_invalid(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_gen_baseline(capsys):
    code, out, _ = run(capsys, "gen", "--family", "kdd-xy4")
    assert code == 0 and json.loads(out)["n"] == 20


def test_argparse_usage_error_exits_2():
    proc = subprocess.run([sys.executable, "-m", "urdd", "gen", "--family", "nope"], capture_output=True)
    assert proc.returncode == 2


def test_version():
    proc = subprocess.run([sys.executable, "-m", "urdd", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "schemaVersion 1" in proc.stdout


def sweep_config(**over):
    cfg = {"schemaVersion": 1, "sequence": "UR8", "totalPulses": 16, "tauOverT": 4,
           "grid": {"detuningRange": [-0.2, 0.2], "amplitudeRange": [-0.2, 0.2], "resolution": [2, 2]},
           "stepsPerPulse": 32}
    cfg.update(over)
    return cfg


def test_sweep_smoke(capsys, tmp_path):
    cfg = write_json(tmp_path / "c.json", sweep_config())
    out = tmp_path / "m.csv"
    pgm = tmp_path / "m.pgm"
    code, _, _ = run(capsys, "sweep", "--config", cfg, "--out", str(out), "--heatmap", str(pgm))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "det_over_rabi,amp_error,fidelity" and len(lines) == 5
    assert pgm.read_text().startswith("P2\n2 2\n65535\n")


def test_sweep_deterministic(capsys, tmp_path):
    cfg = write_json(tmp_path / "c.json", sweep_config(grid={"resolution": [9, 7]}))
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert run(capsys, "sweep", "--config", cfg, "--out", str(a))[0] == 0
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b))[0] == 0
    assert run(capsys, "sweep", "--config", cfg, "--out", str(c), "--threads", "3")[0] == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_sweep_explicit_sequence(capsys, tmp_path):
    seq = {"name": "mine", "phases_over_pi": ["0/1", "1/2", "0/1", "1/2"]}
    cfg = write_json(tmp_path / "c.json", sweep_config(sequence=seq, totalPulses=8))
    assert run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path / "o.csv"))[0] == 0


@pytest.mark.parametrize("bad", [
    {"schemaVersion": 2},
    {"bogus": 1},
    {"totalPulses": 15},
    {"grid": {"resolution": [1, 3]}},
    {"sequence": "UR7"},
    {"pulse": {"kind": "sinc"}},
])
def test_sweep_bad_config(capsys, tmp_path, bad):
    cfg = write_json(tmp_path / "c.json", sweep_config(**bad))
    code, _, err = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path / "o.csv"))
    assert code == 2 and err


def test_sweep_malformed_json(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    assert run(capsys, "sweep", "--config", str(p), "--out", str(tmp_path / "o.csv"))[0] == 2
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.json"), "--out", "x.csv")[0] == 2


def test_sweep_unwritable_output(capsys, tmp_path):
    cfg = write_json(tmp_path / "c.json", sweep_config())
    code, _, err = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path / "no" / "dir" / "o.csv"))
    assert code == 3 and err


def test_scaling_defaults(capsys):
    code, out, _ = run(capsys, "scaling")
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    assert [int(r[0]) for r in rows] == [4, 8, 12, 16, 20]
    for r in rows:
        assert float(r[1]) == pytest.approx(int(r[0]) / 2, abs=0.02)
        assert r[3] == "0"


def test_scaling_single_n(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "scaling", "--n-list", "12", "--out", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 2


def test_scaling_node_flagged(capsys):
    # alpha + delta = pi/2 + phi2/2 is a zero of the UR error law
    code, out, _ = run(capsys, "scaling", "--n-list", "8", "--phi2-over-pi", "1/2",
                       "--alpha", repr(3.141592653589793 * 0.75), "--delta", "0")
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert row[1] == "nan" and row[3] == "1"


def test_scaling_bad_range(capsys):
    assert run(capsys, "scaling", "--p-min", "0.999", "--p-max", "0.99")[0] == 2


def ensemble_config(**ens):
    e = {"nQubits": 64, "detuningSigma": 108786.0, "rabiSpread": 0.1, "rabiOffset": 0.0,
         "driveDetuning": 0.0, "T2": 5e-4, "seed": 5}
    e.update(ens)
    return {"schemaVersion": 1, "ensemble": e, "tau": 4e-5}


def test_ensemble_cli(capsys, tmp_path):
    cfg = write_json(tmp_path / "e.json", ensemble_config())
    out = tmp_path / "e.csv"
    code, _, _ = run(capsys, "ensemble", "--config", cfg, "--sequences", "UR10,CPMG,none",
                     "--times", "0.001,0.002", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "storage_time_s,sequence,efficiency_proxy"
    assert len(lines) == 7
    assert [ln.split(",")[1] for ln in lines[1:]] == ["UR10"] * 2 + ["CPMG"] * 2 + ["none"] * 2


def test_ensemble_ideal_column(capsys, tmp_path):
    cfg = ensemble_config(detuningSigma=0.0, rabiSpread=0.0)
    cfg["idealPulses"] = True
    path = write_json(tmp_path / "e.json", cfg)
    out = tmp_path / "e.csv"
    assert run(capsys, "ensemble", "--config", path, "--sequences", "UR8",
               "--times", "0.0004,0.004", "--out", str(out))[0] == 0
    import math
    for ln in out.read_text().splitlines()[1:]:
        t, _, v = ln.split(",")
        assert float(v) == pytest.approx(math.exp(-2 * float(t) / 5e-4), rel=1e-9)


def test_ensemble_seed_changes_values(capsys, tmp_path):
    outs = []
    for seed in (1, 2):
        path = write_json(tmp_path / f"e{seed}.json", ensemble_config(seed=seed))
        out = tmp_path / f"e{seed}.csv"
        assert run(capsys, "ensemble", "--config", path, "--sequences", "XY4",
                   "--times", "0.001", "--out", str(out))[0] == 0
        outs.append(out.read_text())
    assert outs[0] != outs[1]
    assert outs[0].splitlines()[0] == outs[1].splitlines()[0]


def test_ensemble_bad_config(capsys, tmp_path):
    path = write_json(tmp_path / "e.json", ensemble_config(unknownField=3))
    assert run(capsys, "ensemble", "--config", path, "--sequences", "UR4",
               "--times", "0.001", "--out", str(tmp_path / "o.csv"))[0] == 2
    path = write_json(tmp_path / "e2.json", ensemble_config())
    assert run(capsys, "ensemble", "--config", path, "--sequences", "UR20",
               "--times", "1e-5", "--out", str(tmp_path / "o.csv"))[0] == 2
