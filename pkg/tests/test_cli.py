import subprocess
import sys

from matchsim.cli import main
from matchsim.report import read_csv


def test_sweep_then_plot(tmp_path, capsys):
    csv_path = tmp_path / "runs" / "fig.csv"
    status = main(["sweep", "--n", "5:20:ladder", "--k", "3,6", "--rho", "0.05,1.0",
                   "--trials", "3", "--seed", "7", "--workers", "1", "--out", str(csv_path)])
    assert status == 0
    rows = read_csv(csv_path)
    assert len(rows) == 3 * 2 * 2 * 3
    assert "progress 36/36" in capsys.readouterr().err

    svg_path = tmp_path / "fig.svg"
    assert main(["plot", "--in", str(csv_path), "--series", "k", "--fix", "rho=1.0", "--out", str(svg_path)]) == 0
    assert svg_path.read_text().count("<polyline") == 2


def test_sweep_reproducible(tmp_path):
    args = ["sweep", "--n", "10,20", "--k", "5", "--rho", "3.0", "--trials", "4", "--seed", "3", "--quiet"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--workers", "1", "--out", str(a)]) == 0
    assert main(args + ["--workers", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_config_file(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[sweep]\nn = 5,10\nk = 4\nrho = 1.0\ntrials = 2\nseed = 1\nworkers = 1\n")
    out = tmp_path / "c.csv"
    assert main(["sweep", "--config", str(cfg), "--trials", "3", "--quiet", "--out", str(out)]) == 0
    assert len(read_csv(out)) == 2 * 3


def test_unknown_flag_exits_2(capsys):
    assert main(["sweep", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_plot_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,k,rho,trial,seed,D,ratio\n5,10,1.0,0,1,1,1.5\n")
    assert main(["plot", "--in", str(bad), "--out", str(tmp_path / "x.svg")]) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "line 2" in err and "ratio" in err

    good = tmp_path / "good.csv"
    good.write_text("n,k,rho,trial,seed,D,ratio\n5,10,1.0,0,1,1,0.2\n")
    assert main(["plot", "--in", str(good), "--fix", "rho=3.0", "--out", str(tmp_path / "x.svg")]) == 1
    assert "no series matched" in capsys.readouterr().err
    assert main(["plot", "--in", str(good), "--fix", "k=10", "--series", "k", "--out", str(tmp_path / "x.svg")]) == 2


def test_verify(capsys):
    assert main(["verify", "--oracle-n", "4", "--cases", "50"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 4 and all(line.startswith("PASS") for line in out)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matchsim", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sweep" in proc.stdout and "verify" in proc.stdout
