"""Command-line interface: ``cuspdims {dim,scan,missing,certify,spectrum,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import distribution as dist
from .arith_core import SieveBudgetError, factorize
from .certificates import CertificationError, certify_psi_bound, certify_scan_bound, \
    validate_certificate, validate_psi_certificate
from .dim_formulas import DimensionOverflowError, SpaceKind, dimension
from .spectrum import (UncertifiedRangeError, build_spectrum, delta_value_survey,
                       exceptional_census, sieve_dimensions, write_table)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3
SUITES = ("nu_bounds", "eta", "squarefull_tail", "delta_values", "exceptions", "oracles")

log = logging.getLogger("cuspdims")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    space: Optional[SpaceKind] = None
    weight: int = 2
    level: Optional[int] = None
    limit: Optional[int] = None
    target: Optional[int] = None
    grid: list = field(default_factory=list)
    fmt: str = "csv"
    out: Optional[str] = None
    threads: int = 1
    method: str = "auto"
    suite: Optional[str] = None
    max_weight: int = 12
    ford_C: float = 0.8178146
    ford_D: Optional[float] = None
    r: list = field(default_factory=list)
    s: list = field(default_factory=list)
    cutoff: int = 10**12
    constant: float = 4.0

    def validate(self) -> "RunConfig":
        if self.weight < 2 or self.weight % 2:
            raise UsageError("--weight must be an even integer >= 2")
        if self.command == "dim" and (self.level is None or self.level < 1):
            raise UsageError("--level must be a positive integer")
        if self.command == "scan":
            if self.limit is None or self.limit < 1:
                raise UsageError("--limit must be a positive integer")
            if self.fmt == "bin" and not self.out:
                raise UsageError("binary output needs --out")
        if self.command in ("missing", "certify") and (self.target is None or self.target < 0):
            raise UsageError("--target must be a non-negative integer")
        if self.command == "spectrum" and (not self.grid or min(self.grid) < 0):
            raise UsageError("--grid needs non-negative values")
        if self.fmt == "bin" and self.command != "scan":
            raise UsageError("--format bin is only available for scan")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.ford_C <= 0:
            raise UsageError("--ford-C must be positive")
        return self


def _num(s: str):
    """Parse 10000, 1e6 or 10**6 into an int when integral."""
    s = s.strip()
    if "**" in s:
        b, e = s.split("**")
        return int(b) ** int(e)
    try:
        return int(s)
    except ValueError:
        v = float(s)
        return int(v) if v.is_integer() else v


def _grid(s: str) -> list:
    return [_num(t) for t in s.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cuspdims", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, space_required=True):
        sp.add_argument("--space", type=str.lower, choices=[s.value for s in SpaceKind],
                        required=space_required, default=None if space_required else "new")
        sp.add_argument("--weight", "-k", type=int, default=2)
        sp.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        sp.add_argument("--out", "-o")

    d = sub.add_parser("dim", help="dimension at one level, with its breakdown")
    common(d)
    d.add_argument("--level", "-N", type=_num, required=True)

    s = sub.add_parser("scan", help="dimension table for 1 <= N <= limit")
    common(s)
    s.set_defaults(fmt="csv")
    s.add_argument("--limit", type=_num, required=True)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    for a in s._actions:
        if a.dest == "fmt":
            a.choices = ["csv", "json", "bin"]

    m = sub.add_parser("missing", help="certified list of dimensions <= target never attained")
    common(m)
    m.add_argument("--target", type=_num, required=True)
    m.add_argument("--method", choices=["auto", "scan", "psi"], default="auto")
    m.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    c = sub.add_parser("certify", help="print a tail certificate")
    common(c)
    c.add_argument("--target", type=_num, required=True)
    c.add_argument("--method", choices=["scan", "psi"], default="scan")

    sp = sub.add_parser("spectrum", help="distinct-dimension counts on a grid")
    common(sp)
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--method", choices=["auto", "scan", "psi"], default="auto")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--ford-C", dest="ford_C", type=float, default=0.8178146)
    sp.add_argument("--ford-D", dest="ford_D", type=float, default=None)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--space", type=str.lower, choices=[s.value for s in SpaceKind])
    v.add_argument("--weight", "-k", type=int, default=2)
    v.add_argument("--limit", type=_num)
    v.add_argument("--grid", type=_grid)
    v.add_argument("--max-weight", dest="max_weight", type=int, default=12)
    v.add_argument("--r", type=_grid, default=[1, 2, 3, 4])
    v.add_argument("--s", type=_grid, default=[1, 4, 8])
    v.add_argument("--cutoff", type=_num, default=10**12)
    v.add_argument("--constant", type=float, default=4.0,
                   help="claimed bound on the squarefull tail ratio")
    v.add_argument("--format", dest="fmt", choices=["csv", "json"], default="json")
    v.add_argument("--out", "-o")
    return p


def config_from_args(ns) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if kw.get("space") is not None:
        kw["space"] = SpaceKind.parse(kw["space"])
    for key in ("grid", "r", "s"):
        if kw.get(key) is None:
            kw.pop(key, None)
    return RunConfig(**kw).validate()


# --- output -------------------------------------------------------------------


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(schema: str, meta: dict, header: list, rows) -> str:
    buf = io.StringIO()
    tags = " ".join(f"{k}={v}" for k, v in meta.items())
    buf.write(f"# schema={schema}/{SCHEMA_VERSION} {tags}".rstrip() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(schema: str, payload: dict) -> str:
    return json.dumps({"schema": schema, "schema_version": SCHEMA_VERSION, **payload},
                      indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, SpaceKind):
        return o.value
    raise TypeError(type(o))


# --- commands -----------------------------------------------------------------


def cmd_dim(cfg: RunConfig) -> int:
    b = dimension(cfg.space, cfg.weight, factorize(cfg.level))
    d = b.as_dict()
    if cfg.fmt == "json":
        _emit(_json("dim", d), cfg.out)
    else:
        _emit(_csv("dim", {}, list(d), [list(d.values())]), cfg.out)
    return EXIT_OK


def _scan_csv(table) -> str:
    head = (f"# schema=scan/{SCHEMA_VERSION} space={table.space} k={table.k} "
            f"limit={table.limit}\nN,dim\n")
    parts = [head]
    step = 1 << 18
    for lo in range(0, table.limit, step):
        vals = table.dims[lo:lo + step]
        ns = np.arange(lo + 1, lo + 1 + vals.size)
        parts.append("".join(f"{n},{v}\n" for n, v in zip(ns.tolist(), vals.tolist())))
    return "".join(parts)


def cmd_scan(cfg: RunConfig) -> int:
    table = sieve_dimensions(cfg.space, cfg.weight, cfg.limit, workers=cfg.threads)
    if cfg.fmt == "bin":
        write_table(table, cfg.out)
    elif cfg.fmt == "json":
        _emit(_json("scan", {"space": table.space, "k": table.k, "limit": table.limit,
                             "dims": table.dims}), cfg.out)
    else:
        _emit(_scan_csv(table), cfg.out)
    return EXIT_OK


def cmd_missing(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    vs = build_spectrum(cfg.space, cfg.weight, cfg.target, method=cfg.method,
                        workers=cfg.threads)
    cert = vs.certificate
    missing = [int(d) for d in vs.missing() if d <= cfg.target]
    if not vs.verify_witnesses():
        raise CertificationError("a stored witness failed to re-verify")
    meta = {"space": vs.space.value, "k": vs.k, "target": cfg.target,
            "method": cert.kind, "bound": vs.limit,
            "attained": int(np.count_nonzero(vs.counts)),
            "levels_with_dim_le_target": int(vs.counts.sum())}
    log.info("missing: %.2fs", time.perf_counter() - t0)
    if cfg.fmt == "json":
        _emit(_json("missing", {**meta, "missing": missing, "certificate": cert.as_dict()}),
              cfg.out)
    else:
        _emit(_csv("missing", meta, ["d"], [[d] for d in missing]), cfg.out)
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.method == "psi":
        cert = certify_psi_bound(cfg.space, cfg.weight, cfg.target)
        validate_psi_certificate(cert)
    else:
        cert = certify_scan_bound(cfg.space, cfg.weight, cfg.target)
        validate_certificate(cert)
    d = cert.as_dict()
    if cfg.fmt == "json":
        _emit(_json("certificate", d), cfg.out)
    else:
        flat = {k: v for k, v in d.items() if not isinstance(v, (dict, list))}
        _emit(_csv("certificate", {}, list(flat), [list(flat.values())]), cfg.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    top = max(cfg.grid)
    target = math.floor((cfg.weight - 1) * top / 12)
    vs = build_spectrum(cfg.space, cfg.weight, target, method=cfg.method, workers=cfg.threads)
    ford = dist.FordConstants(cfg.ford_C, cfg.ford_D) if cfg.ford_D is not None else None
    rep = dist.density_trend(vs, cfg.grid, ford)
    meta = {"space": vs.space.value, "k": vs.k, "certified_to": vs.max_certified}
    if cfg.fmt == "json":
        _emit(_json("spectrum", {**meta, **rep.as_dict()}), cfg.out)
    else:
        cols = ["x", "D", "density"] + (["D_over_x_rho", "shape_only"] if ford else [])
        _emit(_csv("spectrum", meta, cols, [[r.get(c, "") for c in cols] for r in rep.rows]),
              cfg.out)
    return EXIT_OK


def _run_suite(cfg: RunConfig) -> dist.DistReport:
    s = cfg.suite
    if s == "nu_bounds":
        return dist.verify_nu_bounds(cfg.limit or 10**6)
    if s == "eta":
        return dist.verify_eta_bounds(cfg.grid or [10**2, 10**4, 10**6, 10**8], cfg.cutoff)
    if s == "squarefull_tail":
        return dist.squarefull_tail_report(cfg.grid or [10**2, 10**3, 10**4, 10**5],
                                           cfg.constant, cfg.cutoff)
    if s == "oracles":
        lim = cfg.limit or 10**4
        return dist.verify_oracles(lim, cfg.max_weight, squarefree_limit=lim)
    if s == "delta_values":
        rep = dist.DistReport("delta_values")
        spaces = [cfg.space] if cfg.space else list(SpaceKind)
        lim = cfg.limit or 10**6
        cps = [c for c in (10**4, 10**5, 10**6) if c < lim] + [lim]
        for sp in spaces:
            for r in cfg.r:
                for s_ in (cfg.s if sp is SpaceKind.FULL else [None]):
                    row = delta_value_survey(sp, cfg.weight, r, s_, lim, checkpoints=cps)
                    row.pop("values12")
                    rep.rows.append(row)
        return rep
    if s == "exceptions":
        rep = dist.DistReport("exceptions")
        spaces = [cfg.space] if cfg.space else list(SpaceKind)
        for sp in spaces:
            for x in cfg.grid or [10**4, 10**5, 10**6]:
                row = exceptional_census(sp, cfg.weight, x)
                row.pop("certificate", None)
                rep.rows.append(row)
        return rep
    raise UsageError(f"unknown suite {s}")


def cmd_verify(cfg: RunConfig) -> int:
    rep = _run_suite(cfg)
    if cfg.fmt == "json":
        text = _json(f"verify/{cfg.suite}", rep.as_dict())
    else:
        cols = sorted({k for r in rep.rows for k in r})
        text = _csv(f"verify/{cfg.suite}", {}, cols,
                    [[json.dumps(r.get(c), default=_jsonable) if isinstance(r.get(c), list)
                      else r.get(c, "") for c in cols] for r in rep.rows])
    _emit(text, cfg.out)
    nfail = len(rep.failures)
    status = "PASS" if nfail == 0 else "FAIL"
    print(f"verify {cfg.suite}: {status} ({len(rep.rows)} checks, {nfail} failures)",
          file=sys.stderr if not cfg.out else sys.stdout)
    return EXIT_OK if nfail == 0 else EXIT_COMPUTE


COMMANDS = {"dim": cmd_dim, "scan": cmd_scan, "missing": cmd_missing,
            "certify": cmd_certify, "spectrum": cmd_spectrum, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"cuspdims: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionOverflowError as exc:
        print(f"cuspdims: overflow: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (CertificationError, UncertifiedRangeError, AssertionError, ArithmeticError,
            SieveBudgetError) as exc:
        print(f"cuspdims: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"cuspdims: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cuspdims: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
