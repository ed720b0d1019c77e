import json

import pytest

from fcm4drv import academic_units_path
from fcm4drv.cli import main

TINY = """
[concepts]
law
x
y
[edges]
law ++ x
x - y
y + x
[init]
law = singleton(1)
x = uniform(-1, 1, 10)
y = uniform(-1, 1, 10)
[clamps]
law
"""


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.fcm"
    path.write_text(TINY)
    return path


def test_run_writes_outputs(tiny, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["--model", str(tiny), "--k", "20", "--out", str(out), "--activation", "tanh"]) == 0
    assert (out / "trace.csv").exists() and (out / "percentiles.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] is True
    assert set(summary["final_means"]) == {"law", "x", "y"}
    assert summary["final_means"]["law"] == 1.0
    assert "converged after" in capsys.readouterr().out


def test_custom_percentiles(tiny, tmp_path):
    out = tmp_path / "out"
    assert main(["--model", str(tiny), "--percentiles", "0.1,0.9", "--out", str(out)]) == 0
    header = (out / "percentiles.csv").read_text().splitlines()[0]
    assert header == "iteration,concept,mean,q0.1,q0.9"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["--k", "10"],
        ["--model", "MODEL", "--k", "1"],
        ["--model", "MODEL", "--activation", "relu"],
        ["--model", "MODEL", "--percentiles", "0.5,0.2"],
        ["--model", "MODEL", "--max-iters", "0"],
        ["--model", "MODEL", "--m", "-1"],
        ["--model", "does-not-exist.fcm"],
    ],
)
def test_config_errors_exit_1(argv, tiny, tmp_path, capsys):
    argv = [str(tiny) if a == "MODEL" else a for a in argv]
    assert main(argv + ["--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err


def test_parse_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.fcm"
    bad.write_text("[concepts]\na\nb\n[edges]\na 2 b\n")
    assert main(["--model", str(bad), "--out", str(tmp_path)]) == 1
    assert "line 5" in capsys.readouterr().err


def test_runtime_error_exit_2(tiny, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["--model", str(tiny), "--out", str(blocker / "sub")]) == 2
    assert "run failed" in capsys.readouterr().err


def test_bundled_model_protocol(tmp_path):
    out = tmp_path / "out"
    argv = ["--model", str(academic_units_path()), "--activation", "s_exp",
            "--aggregator", "percentile_rank", "--k", "100", "--out", str(out)]
    assert main(argv) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] and summary["iterations"] <= 25


def test_mc_check_subcommand(tiny, capsys):
    assert main(["mc-check", "--model", str(tiny), "--samples", "2000", "--iters", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split("\t")[0] for ln in lines] == ["law", "x", "y"]
    assert all(float(ln.split("\t")[1]) < 0.1 for ln in lines)
