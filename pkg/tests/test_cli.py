import json
import subprocess
import sys

import numpy as np
import pytest

from gapfill import SignalWindow, io
from gapfill.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_lists_all_flags():
    proc = subprocess.run([sys.executable, "-m", "gapfill.cli", "bench", "--help"],
                          capture_output=True, text=True, check=True)
    for flag in ("--missing", "--n", "--N", "--eps", "--nbar", "--trials", "--seed", "--sigma",
                 "--config", "--out"):
        assert flag in proc.stdout


def test_kernel_constant_case(capsys):
    code, out, _ = run(capsys, "kernel", "--missing", "0", "--n", "4")
    assert code == 0
    assert "kappa=3 " in out and "mask_size=1" in out


def test_kernel_writes_file(capsys, tmp_path):
    path = tmp_path / "k.json"
    code, out, _ = run(capsys, "kernel", "--missing", "0,3", "--n", "15", "--radius", "300",
                       "--out", str(path), "--csv", str(tmp_path / "k.csv"))
    assert code == 0
    d = json.loads(path.read_text())
    assert d["T"] == [0, 3] and len(d["taps"]) == 601
    assert "l1_mass=" in out and "w_norm=" in out
    assert (tmp_path / "k.csv").read_text().startswith("t,h\n")


@pytest.mark.parametrize("argv", [
    ["kernel", "--missing", "0,3", "--n", "1"],
    ["kernel", "--missing", "0,0", "--n", "4"],
    ["kernel", "--missing", "0,30", "--n", "4", "--radius", "5"],
    ["bench", "--missing", "0,3", "--eps", "4"],
    ["bench", "--missing", "0,3", "--sigma", "-1"],
    ["bench", "--missing", "0,3", "--N", "0"],
])
def test_validation_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_ill_conditioned_exit_3(capsys):
    code, _, err = run(capsys, "kernel", "--missing", "0,1,2,3", "--n", "100")
    assert code == 3 and "condition" in err


@pytest.fixture
def files(tmp_path, capsys):
    kpath = tmp_path / "k.json"
    assert main(["kernel", "--missing", "0,3", "--n", "15", "--radius", "40", "--out", str(kpath)]) == 0
    t = np.arange(-50, 61)
    x = np.sinc(0.4 * (t - 2.5))
    spath = tmp_path / "s.csv"
    io.write_signal_csv(SignalWindow.from_values(-50, x, [0, 3]), spath)
    spath7 = tmp_path / "s7.csv"
    io.write_signal_csv(SignalWindow.from_values(-43, x, [7, 10]), spath7)
    capsys.readouterr()
    return kpath, spath, spath7, tmp_path


def test_recover_roundtrip(files, capsys):
    kpath, spath, _, tmp = files
    out = tmp / "r.csv"
    code, text, _ = run(capsys, "recover", "--kernel", str(kpath), "--input", str(spath), "--out", str(out))
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "t,estimate,truth,abs_error" and len(rows) == 3
    assert "abs_error" in text


def test_recover_shift_equals_shifted_input(files, capsys):
    kpath, spath, spath7, tmp = files
    run(capsys, "recover", "--kernel", str(kpath), "--input", str(spath), "--out", str(tmp / "a.csv"))
    run(capsys, "recover", "--kernel", str(kpath), "--input", str(spath7), "--shift", "7",
        "--out", str(tmp / "b.csv"))
    a = [r.split(",")[1:] for r in (tmp / "a.csv").read_text().splitlines()[1:]]
    b = [r.split(",")[1:] for r in (tmp / "b.csv").read_text().splitlines()[1:]]
    assert a == b


def test_recover_mask_mismatch_exit_4(files, capsys):
    kpath, _, spath7, _ = files
    code, _, err = run(capsys, "recover", "--kernel", str(kpath), "--input", str(spath7))
    assert code == 4
    assert "index 0" in err or "index 7" in err


def test_diagnose(files, capsys):
    _, spath, _, tmp = files
    code, out, _ = run(capsys, "diagnose", "--missing", "0,3", "--n", "15", "--input", str(spath))
    assert code == 0 and "zeta=" in out and "psi=" in out
    om = np.linspace(-np.pi, np.pi, 20001)
    spec = tmp / "spec.csv"
    np.savetxt(spec, np.column_stack([om, np.where(np.abs(om) < 2.5, 1.0, 0.0)]),
               delimiter=",", header="omega,magnitude", comments="")
    code, out, _ = run(capsys, "diagnose", "--missing", "0,3", "--n", "15", "--spectrum", str(spec))
    assert code == 0 and "zeta=0 psi=0" in out


def test_bench_deterministic(capsys, tmp_path):
    argv = ["bench", "--missing", "0,15", "--n", "15", "--N", "60", "--trials", "1", "--seed", "1"]
    c1, o1, _ = run(capsys, *argv)
    c2, o2, _ = run(capsys, *argv)
    assert c1 == c2 == 0 and o1 == o2
    assert "mean=" in o1 and "median=" in o1 and "stderr=" in o1


def test_bench_reports_and_traces(capsys, tmp_path):
    prefix = str(tmp_path / "rep")
    code, out, _ = run(capsys, "bench", "--missing", "0,15", "--n", "15", "--N", "60", "--trials", "2",
                       "--sigma", "0.1", "--out", prefix, "--traces", str(tmp_path / "tr"))
    assert code == 0 and "robustness_bound=" in out
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["summary"]["trials"] == 2
    assert (tmp_path / "rep.csv").read_text().count("\n") == 3
    assert (tmp_path / "tr_kernel.csv").exists() and (tmp_path / "tr_signal.csv").exists()


def test_bench_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"missing": [0, 15], "n": 15, "N": 60, "trials": 2, "seed": 4}))
    code, out, _ = run(capsys, "bench", "--config", str(cfg))
    assert code == 0 and "trials=2 seed=4" in out
    cfg.write_text(json.dumps({"missing": [0, 15], "eps_band": 9.0}))
    code, _, err = run(capsys, "bench", "--config", str(cfg))
    assert code == 2


def test_bench_trial_failure_exit_5(capsys, monkeypatch):
    import gapfill.cli as cli

    def boom(*a, **k):
        raise RuntimeError("trial 0 failed")

    monkeypatch.setattr(cli, "run_experiment", boom)
    code, _, err = run(capsys, "bench", "--missing", "0,15", "--N", "60", "--trials", "1")
    assert code == 5 and "trial 0 failed" in err
