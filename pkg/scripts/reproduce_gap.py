"""Certify that 67846 is not the dimension of any weight-2 newspace on Gamma_0(N)."""

import argparse
import time

from cuspdims.certificates import certify_scan_bound, validate_certificate
from cuspdims.spectrum import load_or_build_table, missing_values


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--target", type=int, default=67846)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    cert = certify_scan_bound("new", 2, args.target)
    validate_certificate(cert)
    print(f"every N > {cert.scan_limit} has dim S_2^new(N) > {args.target}")
    table = load_or_build_table("new", 2, cert.scan_limit, workers=args.threads)
    miss = missing_values("new", 2, args.target, cert, table)
    print(f"missing dimensions <= {args.target}: {miss}")
    print(f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
