import json

import pytest

from cuspdims.cli import EXIT_COMPUTE, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_dim_csv(capsys):
    rc, out, _ = run(capsys, "dim", "--space", "new", "--weight", "2", "--level", "11")
    assert rc == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("# schema=dim/1")
    header, row = lines[1].split(","), lines[2].split(",")
    assert dict(zip(header, row))["total"] == "1"


@pytest.mark.parametrize("space,k,n,total", [("full", 12, 1, 1), ("min", 2, 1, 0),
                                             ("new", 2, 67846 * 2, None)])
def test_dim_json(capsys, space, k, n, total):
    rc, out, _ = run(capsys, "dim", "--space", space, "--weight", str(k), "--level", str(n),
                     "--format", "json")
    d = json.loads(out)
    assert rc == 0 and d["schema_version"] == 1
    if total is not None:
        assert d["total"] == total
    terms = [d[f"{t}_term12"] for t in ("psi", "nu_inf", "nu2", "nu3", "delta2")]
    assert sum(terms) == 12 * d["total"]


def test_usage_errors(capsys):
    assert run(capsys, "dim", "--space", "old", "--level", "3")[0] == EXIT_USAGE
    assert run(capsys, "dim", "--space", "new", "--level", "0")[0] == EXIT_USAGE
    assert run(capsys, "dim", "--space", "new", "--weight", "3", "--level", "5")[0] == EXIT_USAGE
    assert run(capsys, "scan", "--space", "new", "--limit", "0")[0] == EXIT_USAGE
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "scan", "--space", "new", "--limit", "5", "--format", "bin")[0] == EXIT_USAGE


def test_overflow_exit(capsys):
    rc, _, err = run(capsys, "dim", "--space", "full", "--weight", str(2**70),
                     "--level", str(2**64 - 59))
    assert rc == EXIT_COMPUTE and "overflow" in err


def test_scan_csv(capsys):
    rc, out, _ = run(capsys, "scan", "--space", "new", "--weight", "2", "--limit", "11",
                     "--threads", "1")
    lines = out.splitlines()
    assert rc == 0 and lines[0].startswith("# schema=scan/1") and lines[1] == "N,dim"
    assert len(lines) == 13 and lines[-1] == "11,1"


def test_scan_bin_and_io_error(tmp_path, capsys):
    p = tmp_path / "t.bin"
    assert run(capsys, "scan", "--space", "min", "--limit", "100", "--format", "bin",
               "--out", str(p))[0] == 0
    assert p.read_bytes()[:8] == b"CUSPDIM\x00"
    rc, _, _ = run(capsys, "scan", "--space", "min", "--limit", "100",
                   "--out", str(tmp_path / "no" / "such" / "dir.csv"))
    assert rc == EXIT_IO


def test_missing_small(capsys):
    rc, out, _ = run(capsys, "missing", "--space", "new", "--weight", "2", "--target", "1",
                     "--format", "json")
    d = json.loads(out)
    assert rc == 0 and d["missing"] == [] and d["certificate"]["kind"] == "level"
    assert "params" in d["certificate"]


def test_missing_certification_failure(capsys):
    rc, out, err = run(capsys, "missing", "--space", "min", "--target", "67846",
                       "--method", "scan")
    assert rc == EXIT_COMPUTE and out == ""


def test_certify(capsys):
    rc, out, _ = run(capsys, "certify", "--space", "new", "--target", "67846", "--format", "json")
    assert rc == 0 and json.loads(out)["scan_limit"] == 13373314
    rc, out, _ = run(capsys, "certify", "--space", "min", "--target", "10", "--method", "psi",
                     "--format", "json")
    assert rc == 0 and json.loads(out)["kind"] == "psi"


def test_spectrum(capsys):
    rc, out, _ = run(capsys, "spectrum", "--space", "new", "--grid", "0,12,1200")
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert rc == 0
    assert rows[0][:2] == ["0", "1"] and rows[1][:2] == ["12", "2"]
    rc, out, _ = run(capsys, "spectrum", "--space", "new", "--grid", "1200,12000",
                     "--ford-D", "0")
    assert "D_over_x_rho" in out.splitlines()[1]


@pytest.mark.parametrize("suite,args", [
    ("nu_bounds", ["--limit", "20000"]),
    ("eta", ["--grid", "100,10000", "--cutoff", "10**8"]),
    ("oracles", ["--limit", "3000", "--max-weight", "12"]),
    ("delta_values", ["--space", "new", "--limit", "10**5", "--r", "1,2"]),
    ("exceptions", ["--space", "new", "--grid", "1000"]),
    ("squarefull_tail", ["--grid", "100", "--cutoff", "10**8"]),
])
def test_verify_suites(tmp_path, capsys, suite, args):
    out = tmp_path / "r.json"
    rc, stdout, _ = run(capsys, "verify", suite, *args, "--out", str(out))
    assert rc == 0, stdout
    assert "PASS" in stdout
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == 1 and rep["pass"]


def test_verify_failure_exit(tmp_path, capsys):
    rc, stdout, _ = run(capsys, "verify", "squarefull_tail", "--grid", "100", "--cutoff",
                        "10**8", "--constant", "0.01", "--out", str(tmp_path / "r.csv"),
                        "--format", "csv")
    assert rc == EXIT_COMPUTE and "FAIL" in stdout
