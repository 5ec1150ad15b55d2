import json
from dataclasses import replace

import pytest

import coeff_engine
import main
from main import ExitCode


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("CYCLOPHI_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("CYCLOPHI_LOG_DIR", raising=False)
    monkeypatch.setenv("CYCLOPHI_WORKERS", "1")
    return tmp_path


def run(*argv):
    return main.main(["--quiet", *argv])


def test_coeffs_writes_csv(workspace, capsys):
    assert run("coeffs", "15", "--output", "phi15.csv") == ExitCode.OK
    lines = (workspace / "phi15.csv").read_text().splitlines()
    assert lines[0] == "exponent,coefficient"
    assert lines[1:] == ["0,1", "1,-1", "2,0", "3,1", "4,-1", "5,1", "6,0", "7,-1", "8,1"]
    out = capsys.readouterr().out
    assert "degree: 8" in out
    assert "max |coefficient|: 1" in out


def test_coeffs_default_output_goes_to_cache(workspace):
    assert run("coeffs", "105", "--engine", "auto") == ExitCode.OK
    assert (workspace / "cache" / "phi_105.csv").exists()
    assert list((workspace / "cache" / "logs").glob("cyclophi_*.log"))


def test_coeffs_overflow_exit_code(monkeypatch):
    monkeypatch.setattr(coeff_engine, "_INT64_MAX", 10)
    assert run("coeffs", "105", "--overflow", "raise") == ExitCode.OVERFLOW


@pytest.mark.parametrize("argv", [
    ["coeffs"],
    ["coeffs", "0"],
    ["coeffs", "abc"],
    ["verify", "3", "5"],
    ["verify", "3", "5", "9"],
    ["symmetry", "a.csv", "--cutoffs", "1,2", "--trim", "0.5"],
    ["bogus"],
])
def test_usage_errors(argv):
    assert run(*argv) == ExitCode.USAGE


def test_sigma(capsys):
    assert run("sigma", "105", "7") == ExitCode.OK
    out = capsys.readouterr().out
    assert "sigma_7 = -2  (closed form -2)" in out
    assert "MISMATCH" not in out


def test_sigma_closed_form_mismatch_fails(monkeypatch, capsys):
    monkeypatch.setattr(main, "sigma_closed_form", lambda n, k: 99)
    assert run("sigma", "105", "7") == ExitCode.VERIFICATION_FAILED
    assert "MISMATCH" in capsys.readouterr().out


def test_verify(capsys):
    assert run("verify", "3", "5", "7") == ExitCode.OK
    out = capsys.readouterr().out
    assert "n = 3 * 5 * 7 = 105" in out
    assert "VERIFIED" in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    real = main.verify_theorem_main
    monkeypatch.setattr(main, "verify_theorem_main", lambda primes: replace(real(primes), verified=False))
    assert run("verify", "3", "5", "7") == ExitCode.VERIFICATION_FAILED
    assert "FAILED" in capsys.readouterr().out


def test_census_and_resume(workspace, capsys):
    assert run("census", "400", "--output", "b.csv") == ExitCode.OK
    assert run("census", "800", "--output", "b.csv", "--resume") == ExitCode.OK
    assert run("census", "800", "--output", "fresh.csv") == ExitCode.OK
    assert (workspace / "b.csv").read_bytes() == (workspace / "fresh.csv").read_bytes()
    assert "scanned through: 800" in capsys.readouterr().out


def test_census_recheck(capsys):
    assert run("census", "300", "--output", "b.csv", "--recheck-with", "division") == ExitCode.OK
    assert "recheck with division: OK" in capsys.readouterr().out


def test_resume_against_tampered_csv(workspace):
    assert run("census", "300", "--output", "b.csv") == ExitCode.OK
    with open(workspace / "b.csv", "a") as f:
        f.write("299,7\n")
    assert run("census", "600", "--output", "b.csv", "--resume") == ExitCode.MANIFEST_MISMATCH


def test_first_complete_and_incomplete(workspace, capsys):
    assert run("first", "2", "--n-limit", "1000", "--output", "a.csv") == ExitCode.OK
    assert (workspace / "a.csv").read_text().splitlines() == ["ordinal,c,n", "1,-2,105", "2,2,165"]
    assert run("first", "1", "--n-limit", "104", "--output", "none.csv") == ExitCode.INCOMPLETE
    assert "INCOMPLETE" in capsys.readouterr().out
    assert (workspace / "none.csv").read_text() == "ordinal,c,n\n"


def test_plot(workspace):
    run("first", "2", "--n-limit", "1000", "--output", "a.csv")
    assert run("plot", "a.csv", "--kind", "scatter-A") == ExitCode.OK
    assert (workspace / "a.svg").exists()
    assert run("plot", "a.csv", "--kind", "scatter-B") == ExitCode.MALFORMED_INPUT
    assert run("plot", "missing.csv", "--kind", "scatter-A") == ExitCode.IO_ERROR


def test_plot_census_titled_by_scan_bound(workspace):
    assert run("census", "1000", "--output", "b.csv") == ExitCode.OK
    assert run("plot", "b.csv", "--kind", "scatter-B") == ExitCode.OK
    assert "Graph of B_1000" in (workspace / "b.svg").read_text()
    assert run("plot", "b.csv", "--kind", "scatter-B", "--bound", "400",
               "--output", "b400.svg") == ExitCode.OK
    assert "Graph of B_400" in (workspace / "b400.svg").read_text()


def test_symmetry_with_reference(workspace, capsys):
    run("first", "3", "--n-limit", "2000", "--output", "a.csv")
    assert run("symmetry", "a.csv", "--cutoffs", "1,2,3", "--output", "pinned.csv") == ExitCode.OK
    assert "1,2,105,0,1,-,-,-,1" in capsys.readouterr().out

    assert run("symmetry", "a.csv", "--cutoffs", "1,2,3", "--method", "brute",
               "--output", "again.csv", "--reference", "pinned.csv") == ExitCode.OK

    pinned = (workspace / "pinned.csv").read_text().splitlines()
    fields = pinned[2].split(",")
    fields[5] = "0.125"
    pinned[2] = ",".join(fields)
    (workspace / "pinned.csv").write_text("\n".join(pinned) + "\n")
    assert run("symmetry", "a.csv", "--cutoffs", "1,2,3", "--output", "again.csv",
               "--reference", "pinned.csv") == ExitCode.VERIFICATION_FAILED


def test_symmetry_rejects_malformed_input(workspace):
    (workspace / "bad.csv").write_text("n,c\n105,x\n")
    assert run("symmetry", "bad.csv", "--cutoffs", "200") == ExitCode.MALFORMED_INPUT


def test_reproduce_light_figures(workspace, capsys):
    figures = {"figures": [
        {"name": "A_2", "set": "A", "size": 2, "heavy": False},
        {"name": "B_200", "set": "B", "size": 200, "heavy": False},
        {"name": "B_400", "set": "B", "size": 400, "heavy": False},
        {"name": "B_500000", "set": "B", "size": 500000, "heavy": True},
    ]}
    (workspace / "figures.json").write_text(json.dumps(figures))
    assert run("reproduce", "--figures", "figures.json", "--output", "figs", "--n-limit", "1000") == ExitCode.OK
    produced = sorted(p.name for p in (workspace / "figs").iterdir())
    assert produced == ["A_2.svg", "B_200.svg", "B_400.svg", "symmetry_A.csv", "symmetry_B.csv"]


def test_reproduce_reports_incomplete_sets(workspace):
    figures = {"figures": [{"name": "A_5", "set": "A", "size": 5, "heavy": False}]}
    (workspace / "figures.json").write_text(json.dumps(figures))
    assert run("reproduce", "--figures", "figures.json", "--output", "figs",
               "--n-limit", "200") == ExitCode.INCOMPLETE


def test_reproduce_pins_then_compares_symmetry_series(workspace, capsys):
    figures = {"figures": [
        {"name": "A_3", "set": "A", "size": 3, "heavy": False},
        {"name": "B_400", "set": "B", "size": 400, "heavy": False},
        {"name": "B_800", "set": "B", "size": 800, "heavy": False},
    ]}
    (workspace / "figures.json").write_text(json.dumps(figures))
    argv = ["reproduce", "--figures", "figures.json", "--output", "figs",
            "--n-limit", "2000", "--reference-dir", "pinned"]

    assert run(*argv) == ExitCode.OK
    assert "pinned:" in capsys.readouterr().out
    assert (workspace / "pinned" / "symmetry_A.csv").read_bytes() == (workspace / "figs" / "symmetry_A.csv").read_bytes()
    assert (workspace / "pinned" / "symmetry_B.csv").read_bytes() == (workspace / "figs" / "symmetry_B.csv").read_bytes()

    assert run(*argv) == ExitCode.OK
    assert "matches" in capsys.readouterr().out

    pinned = (workspace / "pinned" / "symmetry_B.csv").read_text().splitlines()
    fields = pinned[-1].split(",")
    fields[3] = str(int(fields[3]) + 1)
    pinned[-1] = ",".join(fields)
    (workspace / "pinned" / "symmetry_B.csv").write_text("\n".join(pinned) + "\n")
    assert run(*argv) == ExitCode.VERIFICATION_FAILED
    assert "k=800: count_pos" in capsys.readouterr().out
