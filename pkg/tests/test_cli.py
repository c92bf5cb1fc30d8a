import io
import json
import subprocess
import sys

import pytest

from bandtoep.cli import run
from bandtoep.oracles import get_fixture
from bandtoep.symbol import symbol_to_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv,header", [
    (["eig", "--fixture", "tridiag-a1", "-n", "8"], "re,im"),
    (["limit-set", "--fixture", "tridiag-a1", "--resolution", "48"], "re,im,defect"),
    (["net", "--fixture", "tridiag-a1", "--grid", "96"], "line,re,im"),
    (["curve", "--fixture", "fourdiag-a1", "-N", "16"], "t,rho,re,im,value"),
    (["class-r", "--fixture", "example5"], "verdict,witness_n,witness_re,witness_im"),
    (["moments", "--fixture", "fourdiag-a1", "-m", "5"], "m,num,den"),
    (["moments", "--fixture", "fourdiag-a1", "-m", "5", "--float"], "m,value"),
    (["hankel", "--fixture", "fourdiag-a1", "-n", "4"], "n,det,det_tilde,mode"),
    (["hankel", "--fixture", "tridiag-a1", "-n", "2", "--mc", "--samples", "2000"], "n,det,mode,std_error"),
    (["jacobi", "--fixture", "tridiag-a1", "-N", "4"], "n,a_n,b_n,mode"),
    (["density", "--fixture", "fourdiag-a1", "-K", "10"], "x,rho,branch"),
    (["mfunc", "--fixture", "tridiag-a1", "--lambda", "3+1i"], "re,im,m_re,m_im"),
    (["hist", "--fixture", "tridiag-a1", "-n", "50", "--bins", "5"], "bin_lo,bin_hi,count"),
    (["fixtures"], "name,r,s,description"),
])
def test_subcommand_csv_header(argv, header):
    code, out, err = call(*argv)
    assert code == 0, err
    lines = out.splitlines()
    assert lines[0] == header and len(lines) > 1


def test_known_values_in_output():
    _, out, _ = call("moments", "--fixture", "fourdiag-a1", "-m", "3")
    assert out.splitlines()[1:] == ["0,1,1", "1,3,1", "2,15,1", "3,84,1"]
    _, out, _ = call("class-r", "--fixture", "break-a1", "--format", "json")
    assert json.loads(out)["verdict"] == "NO"
    _, out, _ = call("jacobi", "--fixture", "tridiag-a1", "-N", "3", "--format", "json")
    assert json.loads(out)["a_sq_exact"] == ["2", "1", "1"]


def test_mfunc_negative_lambda():
    code, out, _ = call("mfunc", "--fixture", "tridiag-a1", "--lambda=-3+0.5i")
    assert code == 0 and out.splitlines()[1].startswith("-3.0,0.5,")


def test_json_format_and_output_file(tmp_path):
    dest = tmp_path / "curve.json"
    code, out, _ = call("curve", "--fixture", "tridiag-a1", "-N", "8", "--format", "json", "-o", str(dest))
    assert code == 0 and out == ""
    doc = json.loads(dest.read_text())
    assert len(doc["t"]) == len(doc["rho"]) and doc["partition"][0] == 0


def test_symbol_sources_agree(tmp_path):
    text = json.dumps(symbol_to_json(get_fixture("example4")))
    path = tmp_path / "s.json"
    path.write_text(text)
    a = call("eig", "--fixture", "example4", "-n", "12")[1]
    b = call("eig", "--symbol", text, "-n", "12")[1]
    c = call("eig", "--symbol-file", str(path), "-n", "12")[1]
    assert a == b == c


def test_output_is_deterministic():
    argv = ["hankel", "--fixture", "fourdiag-a1", "-n", "3", "--mc", "--samples", "5000", "--seed", "7"]
    first, second = call(*argv)[1], call(*argv)[1]
    assert first == second
    assert call(*argv[:-1], "8")[1] != first
    lim = ["limit-set", "--fixture", "example5", "--resolution", "40"]
    assert call(*lim, "--threads", "1")[1] == call(*lim, "--threads", "3")[1]


@pytest.mark.parametrize("argv", [
    ["eig", "--fixture", "no-such-fixture", "-n", "4"],
    ["eig", "--symbol", "{not json", "-n", "4"],
    ["curve", "--fixture", "tridiag-a1", "-N", "4"],
    ["curve", "--fixture", "tridiag-a1", "-N", "9"],
    ["eig", "-n", "4"],
    ["eig", "--fixture", "tridiag-a1", "-n", "0"],
    ["mfunc", "--fixture", "tridiag-a1", "--lambda", "abc"],
    ["eig", "--fixture", "tridiag-a1", "-n", "3", "--threads", "0"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert call(*argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ["curve", "--fixture", "nonreal-cubic"],
    ["jacobi", "--fixture", "nonreal-cubic", "-N", "4"],
    ["mfunc", "--fixture", "tridiag-a1", "--lambda", "0.5"],
])
def test_numerical_errors_exit_1_with_json(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == ""
    doc = json.loads(err)
    assert doc["command"] == argv[0] and doc["message"]


def test_unwritable_paths_exit_2(tmp_path):
    missing = tmp_path / "no" / "such"
    assert call("hist", "--fixture", "tridiag-a1", "-n", "9", "--plot", str(missing / "f.png"))[0] == 2
    assert call("hist", "--fixture", "tridiag-a1", "-n", "9", "-o", str(missing / "f.csv"))[0] == 2


def test_help_states_units(capsys):
    for cmd in ("curve", "density", "hankel"):
        assert run([cmd, "--help"]) == 0
        assert "Units:" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["curve", "--fixture", "example5", "-N", "64"],
    ["density", "--fixture", "example5", "-K", "20"],
    ["hist", "--fixture", "example5", "-n", "60"],
    ["eig", "--fixture", "nonreal-cubic", "-n", "30"],
    ["net", "--fixture", "example5", "--grid", "96"],
    ["limit-set", "--fixture", "example5", "--resolution", "40"],
])
def test_plot_writes_figure(argv, tmp_path):
    dest = tmp_path / "fig.png"
    code, _, err = call(*argv, "--plot", str(dest))
    assert code == 0, err
    assert dest.stat().st_size > 1000


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bandtoep", "moments", "--fixture", "tridiag-a1", "-m", "2"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines() == ["m,num,den", "0,1,1", "1,0,1", "2,2,1"]
