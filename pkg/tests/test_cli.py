"""Command-line interface: config parsing, artifact contracts, exit codes."""

import csv
import io
import json
import math
import os
import xml.dom.minidom

import pytest

from fracstorm import cli
from fracstorm.errors import DomainError

CONFIG_TEXT = """\
# sample configuration
model.alpha = 2.0
model.beta = 0.5        # trailing comment
noise.kind = riesz
noise.gamma = 0.5

grid.nx = 16
grid.nt = 8
grid.t = 0.05
run.seed = 11
"""


def run_main(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --------------------------------------------------------------------------
# config parsing


def test_config_round_trip():
    cfg = cli.parse_config_text(CONFIG_TEXT)
    text = cli.serialize_config(cfg)
    again = cli.parse_config_text(text)
    assert cfg == again
    assert cli.serialize_config(again) == text
    p = cfg.params()
    assert p.alpha == 2.0 and p.beta == 0.5 and p.noise.kind == "riesz"
    assert cfg.grid().n == 16
    assert cfg.seed == 11


def test_config_rejects_unknown_key():
    with pytest.raises(DomainError, match="unknown"):
        cli.parse_config_text("model.omega = 3\n")


def test_config_rejects_duplicate_key():
    with pytest.raises(DomainError, match="duplicate"):
        cli.parse_config_text("model.alpha = 2\nmodel.alpha = 1.5\n")


def test_config_rejects_malformed_line():
    with pytest.raises(DomainError):
        cli.parse_config_text("model.alpha 2.0\n")


def test_config_rejects_bad_value():
    with pytest.raises(DomainError):
        cli.parse_config_text("model.alpha = fast\n")
    with pytest.raises(DomainError):
        cli.parse_config_text("noise.kind = pink\n")


def test_config_enforces_model_invariants_at_parse_time():
    # alpha=1, beta=0.5, d=2 violates the white-noise dimension bound.
    with pytest.raises(DomainError):
        cli.parse_config_text("model.alpha = 1.0\nmodel.d = 2\n")


# --------------------------------------------------------------------------
# CSV / atomic writes


def test_csv_text_contract():
    text = cli.csv_text(["lam", "value"], [[1.0, 2.0 / 3.0]], seed=7,
                        params="alpha=2")
    lines = text.split("\r\n")
    assert text.endswith("\r\n") and "\n" not in text.replace("\r\n", "")
    assert lines[0].startswith("# fracstorm ")
    assert "seed=7" in lines[0] and "alpha=2" in lines[0]
    assert lines[1] == "lam,value"
    assert lines[2] == "1," + format(2.0 / 3.0, ".17g")


def test_csv_text_quotes_special_strings():
    tricky = 'comma, quote " and\nnewline'
    text = cli.csv_text(["name", "n"], [[tricky, 3]], seed=0)
    body = text.split("\r\n", 1)[1]  # drop the comment line
    rows = list(csv.reader(io.StringIO(body)))
    assert rows[0] == ["name", "n"]
    assert rows[1] == [tricky, "3"]


def test_write_atomic_leaves_only_the_target(tmp_path):
    target = tmp_path / "a" / "out.csv"
    cli.write_atomic(str(target), "x\r\n1\r\n")
    assert target.read_bytes() == b"x\r\n1\r\n"  # CRLF preserved on disk
    assert os.listdir(tmp_path / "a") == ["out.csv"]


# --------------------------------------------------------------------------
# exit codes and literal outputs


def test_specfun_ml_literal_row(capsys):
    code, out, _ = run_main(["specfun", "ml", "--beta", "1", "--x", "1"], capsys)
    assert code == 0
    lines = out.split("\r\n")
    assert lines[1] == "beta,x,value"
    assert lines[2] == "1,1,2.7182818284590451"


def test_specfun_rejects_out_of_range_order(capsys):
    code, _, err = run_main(["specfun", "ml", "--beta", "1.5", "--x", "0"], capsys)
    assert code == 2
    assert err.startswith("fracstorm: error:")


def test_specfun_missing_flag_is_domain_error(capsys):
    code, _, err = run_main(["specfun", "ml", "--beta", "1"], capsys)
    assert code == 2 and "specfun ml" in err


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run_main(
        ["simulate", "--config", str(tmp_path / "nope.cfg")], capsys)
    assert code == 2 and "not found" in err


def test_moments_renewal_matches_exponential(tmp_path, capsys):
    out = tmp_path / "renewal.csv"
    code, stdout, _ = run_main(
        ["moments", "renewal", "--rho", "1", "--kappa", "2", "--c1", "1",
         "--T", "3", "--out", str(out)], capsys)
    assert code == 0 and "renewal f(3)" in stdout
    text = out.read_bytes().decode()
    rows = list(csv.reader(io.StringIO(text.split("\r\n", 1)[1])))
    assert rows[0] == ["t", "f"]
    final = float(rows[-1][1])
    # rho=1, kappa=2, c1=1 integrates to exp(2t); f(3) = e^6.
    assert final == pytest.approx(math.exp(6.0), rel=1e-6)


def test_validate_only_group_and_byte_determinism(tmp_path, capsys):
    args = ["validate", "--only", "quadrature", "--seed", "0",
            "--out", str(tmp_path / "r1.txt")]
    code1, out1, _ = run_main(args, capsys)
    assert code1 == 0 and "0 failed" in out1
    args[-1] = str(tmp_path / "r2.txt")
    code2, _, _ = run_main(args, capsys)
    assert code2 == 0
    assert (tmp_path / "r1.txt").read_bytes() == (tmp_path / "r2.txt").read_bytes()


def test_validate_unknown_group(capsys):
    code, _, err = run_main(["validate", "--only", "astrology"], capsys)
    assert code == 2 and "astrology" in err


# --------------------------------------------------------------------------
# simulate / excite artifact smoke


@pytest.fixture
def sim_config_path(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "model.alpha = 2.0\nmodel.beta = 0.5\n"
        "grid.nx = 16\ngrid.nt = 8\ngrid.t = 0.05\n"
        "run.seed = 1\nrun.outdir = %s\n"
        "simulate.replicates = 8\n" % tmp_path
    )
    return path


def test_simulate_artifacts(sim_config_path, tmp_path, capsys):
    code, out, _ = run_main(
        ["simulate", "--config", str(sim_config_path),
         "--set", "run.seed=5", "--out", str(tmp_path / "sim.csv")], capsys)
    assert code == 0 and "simulate:" in out

    body = (tmp_path / "sim.csv").read_bytes().decode().split("\r\n")
    assert body[1] == "x,second_moment,stderr"
    assert len(body) == 2 + 16 + 1  # comment, header, nx rows, trailing ""

    summary = json.loads((tmp_path / "sim.json").read_text())
    assert summary["command"] == "simulate"
    assert summary["seed"] == 5  # --set override beat the config file
    assert summary["grid"] == {"nx": 16, "nt": 8, "T": 0.05}
    assert summary["replicates_requested"] == 8
    assert summary["replicates_used"] + summary["blowups"] == 8
    assert summary["final_time_energy"] > 0
    assert summary["artifacts"]["csv"] == str(tmp_path / "sim.csv")


def test_excite_artifacts_and_verdict(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "model.alpha = 2.0\nmodel.beta = 0.5\n"
        "grid.nx = 24\ngrid.t = 0.1\nrun.seed = 0\n"
        "excite.lam_min = 1e2\nexcite.lam_max = 1e6\nexcite.count = 13\n"
    )
    prefix = tmp_path / "sweep"
    code, out, _ = run_main(
        ["excite", "--config", str(cfg), "--nt", "48",
         "--out-prefix", str(prefix)], capsys)
    assert code == 0 and "slope" in out

    summary = json.loads((prefix.with_suffix(".json")).read_text())
    assert summary["command"] == "excite"
    assert summary["method"] == "volterra"
    assert summary["verdict"] == "PASS ±10%"
    assert abs(summary["relative_deviation"]) <= 0.10
    assert summary["slope"] == pytest.approx(summary["theory"], rel=0.05)
    assert len(summary["lambda"]) == 13 == len(summary["log_value"])

    body = (prefix.with_suffix(".csv")).read_bytes().decode().split("\r\n")
    assert body[1] == "lam,log_value,fitted"
    assert len(body) == 2 + 13 + 1

    svg = (prefix.with_suffix(".svg")).read_text()
    doc = xml.dom.minidom.parseString(svg)
    assert doc.documentElement.tagName == "svg"


# --------------------------------------------------------------------------
# thread resolution


def test_threads_env_fallback(sim_config_path, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FRACSTORM_THREADS", "2")
    code, _, _ = run_main(
        ["simulate", "--config", str(sim_config_path),
         "--out", str(tmp_path / "env.csv")], capsys)
    assert code == 0
    assert json.loads((tmp_path / "env.json").read_text())["threads"] == 2

    # An explicit flag beats the environment.
    code, _, _ = run_main(
        ["simulate", "--config", str(sim_config_path), "--threads", "1",
         "--out", str(tmp_path / "flag.csv")], capsys)
    assert code == 0
    assert json.loads((tmp_path / "flag.json").read_text())["threads"] == 1


def test_threads_env_invalid(sim_config_path, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FRACSTORM_THREADS", "two")
    code, _, err = run_main(
        ["simulate", "--config", str(sim_config_path),
         "--out", str(tmp_path / "bad.csv")], capsys)
    assert code == 2 and "FRACSTORM_THREADS" in err
