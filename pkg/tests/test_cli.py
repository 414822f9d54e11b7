import io
import json
import subprocess
import sys

import pytest

from mellinmix.cli import main, parse_complex, parse_grid
from mellinmix.distributions import parse_spec


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def result_lines(text):
    return [l for l in text.splitlines() if not l.startswith("#")]


def test_transform_example():
    code, out = run("transform", "--dist", "uniform01", "--z", "0.5+0i")
    assert code == 0 and result_lines(out) == ["2+0i"]
    assert "# dist=uniform01" in out  # configuration echoed first


def test_bounds_cb_example():
    code, out = run("bounds", "cb", "--b", "0.8")
    assert code == 0 and float(result_lines(out)[0]) == pytest.approx(4.8, abs=0.1)


def test_hg_examples():
    code, out = run("hg", "--dist", "discrete:1@1/3,2@2/3")
    assert code == 0 and result_lines(out)[0].startswith("punctured_line(u != 0)")
    code, out = run("hg", "--dist", "discrete:1@0.3333333,2@0.6666667")
    assert code == 0 and result_lines(out)[0].startswith("punctured_line(u != -2.16404e-07)")
    code, out = run("hg", "--poisson-threshold")
    assert float(result_lines(out)[0]) == pytest.approx(1.9, abs=0.05)
    code, out = run("hg", "--dist", "zeta:5")
    assert "conservative bound u < 0.947685" in out


@pytest.mark.parametrize("argv", [
    ("transform", "--dist", "uniform01", "--z", "0.5+0i", "--bogus", "1"),
    ("transform", "--z", "0.5+0i"),
    ("transform", "--dist", "uniform01", "--z", "0.5+xi"),
    ("transform", "--dist", "beta:2", "--z", "0.5+0i"),
    ("nosuchcommand",),
    ("estimate", "--mixing", "discrete:1@1"),
    ("bounds", "thm2", "--model", "beta:2,2*discrete:1@1/3,2@2/3"),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 64


@pytest.mark.parametrize("argv", [
    ("transform", "--dist", "beta:2,2", "--z=-2+0i"),
    ("transform", "--dist", "beta:-1,2", "--z", "0.5+0i"),
    ("bounds", "cb", "--b", "0.5"),
    ("bounds", "min-t", "--u", "1.0"),
    ("estimate", "--model", "beta:2,2*discrete:1@1/3,2@2/3", "--n", "50", "--u", "0"),
    ("bounds", "berry", "--phi", "exp:1", "--psi", "exp:1.5", "--T", "3"),
    ("profile", "--scenario", "two_point_beta", "--vary", "u_star", "--values", "0", "--runs", "1"),
])
def test_domain_errors(argv):
    assert run(*argv)[0] == 65


def test_data_errors(tmp_path):
    assert run("estimate", "--sample", str(tmp_path / "missing.txt"), "--mixing", "discrete:1@1")[0] == 66
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\n-2.0\n")
    assert run("transform", "--sample", str(bad), "--z", "0.5+0i")[0] == 66


def test_spec_round_trip():
    for spec in ("beta:2,2", "gamma:2,2", "exp:1.5", "uniform01", "geom:0.5", "pospoisson:1.2",
                 "zeta:5", "discrete:1@1/3,2@2/3"):
        code, out = run("transform", "--dist", spec, "--z", "0.5+1i")
        assert code == 0
        echoed = [l for l in out.splitlines() if l.startswith("# dist=")][0].split("=", 1)[1]
        assert parse_spec(echoed) == parse_spec(spec)
        assert parse_spec(echoed).canonical() == echoed


def test_seed_reproducibility(tmp_path):
    argv = ("estimate", "--model", "beta:2,2*discrete:1@1/3,2@2/3", "--n", "200", "--T", "200")
    a = run(*argv, "--seed", "5")
    b = run(*argv, "--seed", "5")
    c = run(*argv, "--seed", "6")
    assert a == b and a[1] != c[1]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*argv, "--seed", "5", "--out", str(f1))[0] == 0
    assert run(*argv, "--seed", "5", "--out", str(f2))[0] == 0
    assert f1.read_text() == f2.read_text()
    assert f1.read_text().splitlines()[1] == "x,fhat"


def test_sample_file_workflow(tmp_path):
    s = tmp_path / "x.txt"
    code, _ = run("estimate", "--model", "beta:2,2*discrete:1@1/3,2@2/3", "--n", "300", "--seed", "2",
                  "--save-sample", str(s))
    assert code == 0 and s.is_file()
    code, a = run("estimate", "--sample", str(s), "--mixing", "discrete:1@1/3,2@2/3")
    code2, b = run("estimate", "--model", "beta:2,2*discrete:1@1/3,2@2/3", "--n", "300", "--seed", "2")
    assert code == code2 == 0 and result_lines(a)[-1] == result_lines(b)[-1]
    code, out = run("fourier-estimate", "--sample", str(s), "--mixing", "discrete:1@1/3,2@2/3", "--R", "3.5",
                    "--clip")
    assert code == 0 and "method=fourier" in out
    code, out = run("transform", "--sample", str(s), "--mixing", "discrete:1@1/3,2@2/3", "--z", "0.5+0i")
    assert code == 0


def test_bounds_json(tmp_path):
    code, out = run("bounds", "berry", "--phi", "exp:1", "--psi", "exp:1.5", "--T", "200")
    assert code == 0
    rep = json.loads("\n".join(result_lines(out)))
    assert set(rep["terms"]) == {"term1", "term2"} and rep["x0"] == pytest.approx(0.4027, abs=1e-4)
    path = tmp_path / "thm1.json"
    code, out = run("bounds", "thm1", "--model", "beta:2,2*discrete:1@1/3,2@2/3", "--n", "500",
                    "--T", "500", "--seed", "1", "--out", str(path))
    assert code == 0 and json.loads(path.read_text())["bound_holds"] is True


def test_simulate_profile_tune_outputs(tmp_path):
    code, out = run("simulate", "--scenario", "two_point_beta", "--runs", "2", "--n", "100", "--out",
                    str(tmp_path / "sim"))
    assert code == 0
    assert {p.name for p in (tmp_path / "sim").iterdir()} == {"mse_table.csv", "runs.csv", "summary.json"}
    code2, out2 = run("simulate", "--scenario", "two_point_beta", "--runs", "2", "--n", "100", "--workers", "2")
    assert result_lines(out) [1:] == result_lines(out2)[1:]
    code, out = run("profile", "--scenario", "two_point_gamma", "--vary", "x", "--values", "0.5,1",
                    "--runs", "2", "--size", "200", "--out", str(tmp_path / "prof"))
    assert code == 0 and (tmp_path / "prof" / "profile.csv").is_file()
    code, out = run("tune", "--scenario", "uniform_beta", "--method", "mellin", "--parameter", "T",
                    "--grid", "20,40", "--runs", "2", "--size", "200")
    assert code == 0 and out.splitlines()[-1].startswith("# best T=")


def test_parsers():
    assert parse_complex("0.5+2i") == complex(0.5, 2)
    assert parse_complex("1-3.5i") == complex(1, -3.5)
    assert parse_complex("2") == complex(2, 0)
    assert list(parse_grid("0.1:0.3:3")) == pytest.approx([0.1, 0.2, 0.3])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mellinmix", "bounds", "cb", "--b", "1.0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().splitlines()[-1] == "2.21368"
    assert proc.stdout.startswith("# command=bounds")
