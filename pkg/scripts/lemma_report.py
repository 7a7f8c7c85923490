"""Run every verification suite at its default size and write JSON reports."""

import argparse
import json
from pathlib import Path

from cuspdims.distribution import (squarefull_tail_report, verify_eta_bounds, verify_nu_bounds,
                                   verify_oracles)
from cuspdims.spectrum import delta_value_survey, exceptional_census


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--limit", type=int, default=10**6)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    reports = {
        "nu_bounds": verify_nu_bounds(args.limit).as_dict(),
        "eta": verify_eta_bounds([10**2, 10**4, 10**6, 10**8]).as_dict(),
        "squarefull_tail": squarefull_tail_report([10**2, 10**3, 10**4, 10**5], 4.0).as_dict(),
        "oracles": verify_oracles(10**4, 12, squarefree_limit=args.limit).as_dict(),
        "delta_values": [delta_value_survey(sp, 2, r, s, args.limit)
                         for sp in ("full", "new", "min") for r in (1, 2, 3, 4)
                         for s in ((1, 4, 8) if sp == "full" else (None,))],
        "exceptions": [exceptional_census(sp, 2, x)
                       for sp in ("full", "new", "min") for x in (10**4, 10**5, 10**6)],
    }
    for name, rep in reports.items():
        (args.out / f"{name}.json").write_text(json.dumps(rep, indent=2, default=str))
        status = rep["pass"] if isinstance(rep, dict) else all(r.get("pass", True) for r in rep)
        print(f"{name:16s} {'PASS' if status else 'FAIL'}")


if __name__ == "__main__":
    main()
