import csv
import json

import pytest

from rmatrix_cm import cli


def run(tmp_path, *args):
    code = cli.main([*args, "--out", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text()) if (tmp_path / "report.json").exists() else None
    return code, report


@pytest.mark.parametrize("text,value", [("0.31+0.17i", 0.31 + 0.17j), ("2", 2), ("-i", -1j),
                                        ("1e-3-2.5i", 1e-3 - 2.5j), ("0.3i", 0.3j)])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


@pytest.mark.parametrize("bad", ["", "abc", "1+2k", "1++i"])
def test_parse_complex_rejects(bad):
    with pytest.raises(cli.UsageError):
        cli.parse_complex(bad)


def test_format_roundtrip():
    for z in (0.31 + 0.17j, -1.5 - 2j, 0.3j):
        assert cli.parse_complex(cli.format_complex(z)) == z


def test_verify_bb(tmp_path):
    code, rep = run(tmp_path, "verify", "--family", "bb", "--d", "2", "--n", "3", "--samples", "5")
    assert code == 0 and rep["passed"]
    names = {r["identity"] for r in rep["reports"]}
    assert {"aybe", "eight_vertex_agreement", "dunkl_commutativity_n3", "classical_cybe"} <= names


def test_verify_scalar(tmp_path):
    code, rep = run(tmp_path, "verify", "--family", "scalar", "--d", "1", "--samples", "5")
    assert code == 0 and any(r["identity"] == "aybe" and r["passed"] for r in rep["reports"])


def test_im_tau_floor_is_usage_error(tmp_path):
    assert cli.main(["verify", "--tau", "0.05i", "--out", str(tmp_path)]) == 2


def test_bad_flags_are_usage_errors(tmp_path, capsys):
    assert cli.main(["verify", "--family", "nope"]) == 2
    assert cli.main(["verify", "--n", "1", "--out", str(tmp_path)]) == 2
    assert cli.main(["chain", "--family", "bb", "--d", "3", "--n", "9", "--out", str(tmp_path)]) == 2


def test_failure_exit_code(tmp_path):
    code, rep = run(tmp_path, "verify", "--family", "bb", "--d", "2", "--samples", "3", "--tol", "1e-30")
    assert code == 1 and not rep["passed"]


def test_chain(tmp_path):
    code, rep = run(tmp_path, "chain", "--n", "5", "--d", "2")
    assert code == 0
    assert rep["reports"][0]["max_residual"] < 1e-10
    assert "literal_h2_h3_commutator" in rep["reports"][0]
    spectra = json.loads((tmp_path / "spectra.json").read_text())
    assert [s["dim"] for s in spectra] == [32, 32]
    rows = list(csv.reader(open(tmp_path / "spectra.csv")))
    assert rows[0] == ["operator", "index", "re", "im"] and len(rows) == 65


def test_chain_trivial(tmp_path):
    code, rep = run(tmp_path, "chain", "--n", "2", "--d", "1")
    assert code == 0 and rep["reports"] == []
    assert json.loads((tmp_path / "spectra.json").read_text())[0]["dim"] == 1


def test_chain_deformed(tmp_path):
    code, rep = run(tmp_path, "chain", "--deformed", "--epsilon", "generic", "--n", "3", "--d", "2")
    assert code == 0
    assert rep["reports"][0]["dim"] == 48


def test_chain_deformed_explicit_epsilon(tmp_path):
    code, rep = run(tmp_path, "chain", "--deformed", "--epsilon", "0.23+0.11i,0,0", "--n", "3", "--d", "2")
    assert code == 0 and rep["reports"][0]["dim"] == 24
    assert cli.main(["chain", "--deformed", "--epsilon", "0.1,0.2", "--out", str(tmp_path)]) == 2


def test_lax(tmp_path):
    code, rep = run(tmp_path, "lax", "--n", "3", "--d", "2", "--mu", "0.31+0.17i", "--samples", "5")
    assert code == 0
    assert rep["reports"][0]["max_residual"] < 1e-8
    assert rep["config"]["g"] == cli.format_complex(0.3j)
    header = next(csv.reader(open(tmp_path / "trajectory.csv")))
    assert header[0] == "t" and header[-1] == "laxres"


def test_lax_zero_coupling(tmp_path):
    code, rep = run(tmp_path, "lax", "--g", "0", "--samples", "3")
    assert code == 0 and rep["reports"][0]["max_residual"] == 0.0


def test_lax_quantum(tmp_path):
    code, rep = run(tmp_path, "lax", "--quantum", "--samples", "2")
    assert code == 0
    assert any(r["identity"].startswith("quantum_lax") for r in rep["reports"])


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# chain run\nfamily = bb\nd = 2\nn = 4\ng = 0.7\n")
    code, rep = run(tmp_path, "chain", "--config", str(cfg), "--n", "3")
    assert code == 0 and rep["config"]["n"] == 3 and rep["config"]["d"] == 2
    cfg.write_text("famly = bb\n")
    assert cli.main(["verify", "--config", str(cfg)]) == 2


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["verify", "--samples", "4", "--seed", "5", "--out", str(a)])
    cli.main(["verify", "--samples", "4", "--seed", "5", "--out", str(b)])
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
