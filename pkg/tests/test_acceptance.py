"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from cuspdims.certificates import validate_certificate, certify_scan_bound
from cuspdims.cli import main
from cuspdims.constants import eta_with_error
from cuspdims.dim_formulas import SpaceKind
from cuspdims.distribution import (FordConstants, density_trend, squarefull_tail_report,
                                   verify_eta_bounds, verify_nu_bounds, verify_oracles)
from cuspdims.spectrum import (build_spectrum, compute_components, delta_value_survey,
                               sieve_dimensions)

SPACES = list(SpaceKind)
# bound on sum_{N > x squarefull} 1/psi(N) * sqrt(x) / log x, fixed before the run
SQUAREFULL_RATIO_CONSTANT = 4.0


@pytest.fixture(scope="module")
def comps_1e6():
    return {sp: compute_components(sp, 10**6) for sp in SPACES}


def _missing(capsys, threads):
    t0 = time.perf_counter()
    rc = main(["missing", "--space", "new", "--weight", "2", "--target", "67846",
               "--format", "json", "--threads", str(threads)])
    dt = time.perf_counter() - t0
    return rc, json.loads(capsys.readouterr().out), dt


def test_ac1_gap_reproduction(capsys, criterion):
    rc, d, dt1 = _missing(capsys, 1)
    cert = certify_scan_bound("new", 2, 67846)
    ok1 = (rc == 0 and 67846 in d["missing"] and d["certificate"]["kind"] == "level"
           and d["certificate"]["scan_limit"] <= 2 * 10**7
           and d["certificate"]["scan_limit"] == cert.scan_limit
           and validate_certificate(cert) and dt1 <= 300)
    rc8, d8, dt8 = _missing(capsys, 8)
    ok8 = rc8 == 0 and d8["missing"] == d["missing"] and dt8 <= 60
    criterion("AC1 gap 67846", ok1 and ok8,
              f"X={d['certificate']['scan_limit']} missing={d['missing']} "
              f"t1={dt1:.1f}s t8={dt8:.1f}s")
    assert ok1 and ok8


def test_ac2_integrality(criterion):
    t0 = time.perf_counter()
    fails = 0
    for sp in SPACES:
        c = compute_components(sp, 10**5)
        for k in range(2, 25, 2):
            t = c.twelve_d(k)
            fails += int(np.count_nonzero(t % 12)) + int(np.count_nonzero(t < 0))
            sieve_dimensions(sp, k, 10**5)  # asserts internally as well
    dt = time.perf_counter() - t0
    ok = fails == 0 and dt <= 60
    criterion("AC2 integrality/non-negativity", ok, f"failures={fails} t={dt:.1f}s")
    assert ok


def test_ac3_monotonicity(criterion):
    comps = {sp: compute_components(sp, 10**5) for sp in SPACES}
    fails = 0
    for k in range(2, 25, 2):
        f, n, m = (comps[sp].twelve_d(k) for sp in SPACES)
        fails += int(np.count_nonzero((f < n) | (n < m)))
    criterion("AC3 full >= new >= min", fails == 0, f"failures={fails}")
    assert fails == 0


def test_ac4_oracles(comps_1e6, criterion):
    rep = verify_oracles(10**4, 12, squarefree_limit=10**6, comps=comps_1e6)
    nfail = len(rep.failures)
    criterion("AC4 divisor decomposition + squarefree new == min", rep.passed,
              f"checks={len(rep.rows)} failures={nfail}")
    assert rep.passed


def test_ac5_nu_bounds(comps_1e6, criterion):
    t0 = time.perf_counter()
    rep = verify_nu_bounds(10**6)
    dt = time.perf_counter() - t0
    ok = rep.passed and dt <= 120
    criterion("AC5 cusp/elliptic bounds to 1e6", ok,
              f"violations={sum(r['violations'] for r in rep.rows)} t={dt:.1f}s")
    assert ok


def test_ac6_eta(criterion):
    eta, err = eta_with_error()
    rep = verify_eta_bounds([10**2, 10**4, 10**6, 10**8])
    ok = rep.passed and err < 1e-10 and f"{eta:.5f}" == "2.17325"
    criterion("AC6 squarefull count and tail", ok,
              f"eta={eta:.10f} counts={[r['count'] for r in rep.rows]}")
    assert ok


def test_ac7_squarefull_tail(criterion):
    rep = squarefull_tail_report([10**2, 10**3, 10**4, 10**5], SQUAREFULL_RATIO_CONSTANT)
    worst = {sp.value: max(r["ratio_upper"] for r in rep.rows if r["space"] == sp.value)
             for sp in SPACES}
    criterion("AC7 squarefull reciprocal tail", rep.passed,
              f"constant={SQUAREFULL_RATIO_CONSTANT} max_ratio={worst}")
    assert rep.passed


def test_ac8_values_survey(comps_1e6, criterion):
    cps = [10**4, 10**5, 10**6]
    bad = []
    for k in (2, 4, 12):
        for sp in SPACES:
            for r in (1, 2, 3, 4):
                for s in ((1, 4, 8) if sp is SpaceKind.FULL else (None,)):
                    rep = delta_value_survey(sp, k, r, s, 10**6, comps=comps_1e6[sp],
                                             checkpoints=cps)
                    counts = dict(rep["checkpoints"])
                    if any(c > rep["bound"] for c in counts.values()):
                        bad.append((sp.value, k, r, s, "bound"))
                    if r <= 3 and counts[10**5] != counts[10**6]:
                        bad.append((sp.value, k, r, s, "growth"))
    criterion("AC8 distinct discrepancy values", not bad, f"problems={bad}")
    assert not bad


def test_ac9_density_trend(criterion):
    grid = [12 * 10**3, 12 * 10**4, 12 * 10**5, 12 * 10**6]
    details, ok = [], True
    for sp in ("new", "min"):
        vs = build_spectrum(sp, 2, 10**6)
        rep = density_trend(vs, grid, FordConstants(D=0.0))
        dens = [r["density"] for r in rep.rows]
        ok &= all(a > b for a, b in zip(dens, dens[1:]))
        ok &= all("D_over_x_rho" in r for r in rep.rows)
        details.append(f"{sp}:{[round(v, 6) for v in dens]}")
    criterion("AC9 density decreasing", ok, " ".join(details))
    assert ok


def test_ac10_determinism(tmp_path, capsys, criterion):
    outs = []
    for i, threads in enumerate((1, 1, 8)):
        p = tmp_path / f"scan{i}.csv"
        assert main(["scan", "--space", "new", "--weight", "2", "--limit", str(2 * 10**6),
                     "--threads", str(threads), "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    criterion("AC10 byte-identical scan CSV", ok, f"bytes={len(outs[0])}")
    assert ok
