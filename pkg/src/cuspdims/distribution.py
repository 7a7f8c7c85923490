"""Value-distribution statistics and numerical checks of the supporting
inequalities (cusp/elliptic bounds, squarefull counts and tails)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from .arith_core import enumerate_squarefull, squarefree_flags
from .constants import eta_with_error, primes_upto
from .dim_formulas import SpaceKind, local_factor, twelfths_coefficients
from .spectrum import (Components, ValueSpectrum, compute_components, count_distinct,
                       psi_enumeration)

WEIGHTS = tuple(range(2, 25, 2))


@dataclass
class DistReport:
    name: str
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.get("pass", True) for r in self.rows)

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.rows if not r.get("pass", True)]

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "meta": self.meta, "rows": self.rows}


# --- reference shape --------------------------------------------------------


@dataclass(frozen=True)
class FordConstants:
    C: float = 0.8178146
    D: Optional[float] = None

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")


class DomainError(ValueError):
    pass


def rho_shape_only(x: float) -> bool:
    """True where the four-fold logarithm is <= 0 and its term is dropped."""
    return math.log(math.log(math.log(x))) <= 1


def rho_reference(x: float, c: FordConstants) -> float:
    if not x >= 16:
        raise DomainError("rho is evaluated for x >= 16 only")
    if c.D is None:
        raise DomainError("Ford's D must be configured explicitly")
    l1 = math.log(x)
    l2 = math.log(l1)
    l3 = math.log(l2)
    expo = c.C * math.log(l2 / l3) ** 2 + c.D * l3
    if l3 > 1:
        expo += (c.D + 0.5 - 2 * c.C) * math.log(l3)
    return math.exp(expo) / l1


# --- distinct psi values ------------------------------------------------------


def v_psi_exact(space, x: int) -> int:
    """#{psi(N) : N >= 1, psi(N) <= x}.

    The enumerator visits every N with psi(N) <= x (see
    ``_kernels.dfs_levels``), so no separate level bound is needed.
    """
    space = SpaceKind.parse(space)
    x = int(x)
    if x < 1:
        return 0
    res = psi_enumeration(space, 2, x, psi_seen_cap=x)
    return int(res["psi_seen"][1:].sum())


# --- cusp and elliptic bounds ---------------------------------------------------


def _int64_safe(comps: Components) -> bool:
    return int(comps.psi.max()) < 3_000_000_000


def verify_nu_bounds(limit: int, spaces=tuple(SpaceKind), weights=WEIGHTS,
                     comps: Optional[dict] = None, max_violations: int = 20) -> DistReport:
    """0 <= nu_inf, nu_inf^2 N <= psi^2 and |12 c2 nu2 + 12 c3 nu3| <= 7 * 2^omega."""
    rep = DistReport("nu_bounds", meta={"limit": limit, "weights": list(weights)})
    n = np.arange(1, limit + 1, dtype=np.int64)
    for sp in spaces:
        sp = SpaceKind.parse(sp)
        c = comps[sp] if comps and sp in comps else compute_components(sp, limit)
        if not _int64_safe(c):
            raise OverflowError("limit too large for exact 64-bit squared comparisons")
        psi, nu = c.psi[:limit], c.nu_inf[:limit]
        bad = np.flatnonzero((nu < 0) | (nu * nu * n > psi * psi)) + 1
        rep.rows.append({"space": sp.value, "check": "cusp", "violations": int(bad.size),
                         "examples": bad[:max_violations].tolist(), "pass": bad.size == 0})
        two_om = np.left_shift(np.int64(1), c.omega[:limit])
        for k in weights:
            _, C2, C3, _ = twelfths_coefficients(sp, k)
            ell = np.abs(C2 * c.nu2[:limit] + C3 * c.nu3[:limit])
            bad = np.flatnonzero(ell > 7 * two_om) + 1
            rep.rows.append({"space": sp.value, "check": "elliptic", "k": k,
                             "violations": int(bad.size),
                             "examples": bad[:max_violations].tolist(), "pass": bad.size == 0})
    return rep


# --- squarefull numbers ---------------------------------------------------------


def _reciprocal_tail_bound(cutoff: int) -> float:
    """Upper bound for the sum of 1/N over squarefull N > cutoff.

    Writes N = a^2 b^3 with b squarefree; for each b the a-sum beyond
    m = isqrt(cutoff // b^3) is < 1/m, and b^3 > cutoff contributes at most
    zeta(2) / (2 B^2) with B = floor(cutoff^(1/3)).
    """
    B = int(round(cutoff ** (1 / 3)))
    while B**3 > cutoff:
        B -= 1
    while (B + 1) ** 3 <= cutoff:
        B += 1
    sqf = squarefree_flags(B)
    total = math.fsum(1.0 / (b**3 * math.isqrt(cutoff // b**3))
                      for b in range(1, B + 1) if sqf[b])
    total += (math.pi**2 / 6) / (2 * B * B)
    return total * (1 + 1e-12)


def verify_eta_bounds(grid: Sequence[int], cutoff: int = 10**12) -> DistReport:
    """#{N <= x squarefull} <= eta sqrt(x) and sum_{N > x} 1/N <= 2 eta / sqrt(x)."""
    grid = sorted(int(x) for x in grid)
    if cutoff < 100 * grid[-1]:
        raise ValueError("cutoff must be at least 100 * max(grid)")
    eta, err = eta_with_error()
    eta_lo = eta - err
    sqf = enumerate_squarefull(cutoff)
    recip = 1.0 / sqf.astype(np.float64)
    trunc = _reciprocal_tail_bound(cutoff)
    rep = DistReport("eta", meta={"eta": eta, "eta_error": err, "cutoff": cutoff,
                                  "truncation_bound": trunc})
    for x in grid:
        cnt = int(np.searchsorted(sqf, x, side="right"))
        # cnt <= eta sqrt(x)  <=>  cnt^2 <= eta^2 x, checked with eta's lower end
        count_ok = cnt * cnt <= eta_lo * eta_lo * x
        tail = math.fsum(recip[cnt:][::-1])
        bound = 2 * eta_lo / math.sqrt(x)
        rep.rows.append({"x": x, "count": cnt, "count_bound": eta * math.sqrt(x),
                         "tail": tail, "tail_upper": tail + trunc, "tail_bound": bound,
                         "pass": bool(count_ok and tail + trunc <= bound)})
    return rep


def _local_lower_coeff(space: SpaceKind, p: int) -> float:
    """c with psi(p^e) >= c p^e for every e >= 2."""
    if space is SpaceKind.FULL:
        return 1.0
    if space is SpaceKind.NEW:
        return (1 - 1 / p) ** 2
    return (1 - 1 / p) ** 2 / 2


def _rankin_bound(space: SpaceKind, cutoff: int, sigma: float, prime_limit: int) -> float:
    """cutoff^-sigma * prod_p (1 + sum_{e>=2} p^(e sigma) / psi(p^e)), an upper
    bound for sum_{N > cutoff squarefull} 1/psi(N) when 0 < sigma < 1/2."""
    tau = 1 - sigma
    log_k = 0.0
    for p in primes_upto(prime_limit):
        s = 0.0
        e = 2
        while True:
            s += p ** (e * sigma) / local_factor(space, "psi", p, e)
            if p**e > 10**30:
                break
            e += 1
        s += p ** (-(e + 1) * tau) / (1 - p**-tau) / _local_lower_coeff(space, p)
        log_k += math.log1p(s)
    P = prime_limit
    c_tail = _local_lower_coeff(space, P)
    # sum over p > P of p^(-2 tau) / (c (1 - p^-tau)) <= ... integral over n > P
    log_k += P ** (1 - 2 * tau) / (2 * tau - 1) / (c_tail * (1 - P**-tau))
    return math.exp(log_k - sigma * math.log(cutoff)) * (1 + 1e-9)


def squarefull_truncation_bound(space, cutoff: int, prime_limit: int = 2000) -> dict:
    space = SpaceKind.parse(space)
    best = None
    for i in range(1, 50):
        sigma = i / 100
        b = _rankin_bound(space, cutoff, sigma, prime_limit)
        if best is None or b < best[0]:
            best = (b, sigma)
    return {"bound": best[0], "sigma": best[1]}


def squarefull_reciprocal_tail(space, x: int, cutoff: int = 10**12) -> dict:
    """sum_{N squarefull, x < N} 1/psi(N): exact part to cutoff plus a truncation bound."""
    space = SpaceKind.parse(space)
    if cutoff < 100 * x:
        raise ValueError("cutoff must be at least 100 * x for a meaningful truncation bound")
    store = int(2.2 * math.sqrt(cutoff) + 1000)  # squarefull count <= eta sqrt(cutoff)
    res = psi_enumeration(space, 2, -1, n_cap=cutoff, min_exp=2, store=store)
    n, psi = res["n"], res["psi"]
    sel = n > x
    vals = 1.0 / psi[sel].astype(np.float64)
    total = math.fsum(np.sort(vals)[::-1])
    trunc = squarefull_truncation_bound(space, cutoff)
    scale = math.sqrt(x) / math.log(x)
    return {"space": space.value, "x": x, "cutoff": cutoff, "sum": total,
            "truncation_bound": trunc["bound"], "rankin_sigma": trunc["sigma"],
            "ratio": total * scale, "ratio_upper": (total + trunc["bound"]) * scale}


def squarefull_tail_report(grid: Sequence[int], constant: float, cutoff: int = 10**12,
                           spaces=tuple(SpaceKind)) -> DistReport:
    rep = DistReport("squarefull_tail", meta={"constant": constant, "cutoff": cutoff})
    for sp in spaces:
        for x in grid:
            r = squarefull_reciprocal_tail(sp, x, cutoff)
            r["pass"] = r["ratio_upper"] <= constant
            rep.rows.append(r)
    return rep


# --- density of attained dimensions -----------------------------------------------


def density_trend(vs: ValueSpectrum, grid: Sequence[float],
                  ford: Optional[FordConstants] = None) -> DistReport:
    """D(x) * 12 / ((k-1) x) on the grid, expected to decrease."""
    rep = DistReport("density", meta={"space": vs.space.value, "k": vs.k})
    prev = None
    for x in grid:
        D = count_distinct(vs, x)
        dens = D * 12 / ((vs.k - 1) * x) if x > 0 else float("nan")
        row = {"x": x, "D": D, "density": dens,
               "pass": prev is None or dens < prev}
        if ford is not None and ford.D is not None and x >= 16:
            row["D_over_x_rho"] = D / (x * rho_reference(x, ford))
            row["shape_only"] = rho_shape_only(x)
        rep.rows.append(row)
        if x > 0:
            prev = dens
    return rep


# --- cross-checks between the three spaces ------------------------------------------


def verify_oracles(limit: int, max_weight: int = 12, squarefree_limit: Optional[int] = None,
                   comps: Optional[dict] = None) -> DistReport:
    """Divisor decomposition of the full space into newspaces, integrality,
    full >= new >= min, and new == min on squarefree levels."""
    rep = DistReport("oracles", meta={"limit": limit, "max_weight": max_weight})
    if comps is None:
        comps = {sp: compute_components(sp, max(limit, squarefree_limit or 0))
                 for sp in SpaceKind}
    # sigma_0 by direct divisor counting
    sigma0 = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        sigma0[d::d] += 1
    for k in range(2, max_weight + 1, 2):
        tw = {sp: comps[sp].twelve_d(k)[:limit] for sp in SpaceKind}
        integral = all(bool(np.all(t % 12 == 0)) and bool(np.all(t >= 0)) for t in tw.values())
        d = {sp: t // 12 for sp, t in tw.items()}
        recon = np.zeros(limit + 1, dtype=np.int64)
        dn = d[SpaceKind.NEW]
        for m in range(1, limit + 1):
            if dn[m - 1]:
                recon[m::m] += dn[m - 1] * sigma0[1:limit // m + 1]
        bad = np.flatnonzero(recon[1:] != d[SpaceKind.FULL]) + 1
        mono = np.flatnonzero((d[SpaceKind.FULL] < d[SpaceKind.NEW])
                              | (d[SpaceKind.NEW] < d[SpaceKind.MIN])) + 1
        rep.rows.append({"k": k, "check": "integrality", "pass": integral})
        rep.rows.append({"k": k, "check": "divisor_decomposition", "violations": int(bad.size),
                         "examples": bad[:20].tolist(), "pass": bad.size == 0})
        rep.rows.append({"k": k, "check": "monotone", "violations": int(mono.size),
                         "examples": mono[:20].tolist(), "pass": mono.size == 0})
    if squarefree_limit:
        flags = squarefree_flags(squarefree_limit)[1:].astype(bool)
        for k in range(2, max_weight + 1, 2):
            a = comps[SpaceKind.NEW].twelve_d(k)[:squarefree_limit]
            b = comps[SpaceKind.MIN].twelve_d(k)[:squarefree_limit]
            bad = np.flatnonzero(flags & (a != b)) + 1
            rep.rows.append({"k": k, "check": "squarefree_new_eq_min",
                             "limit": squarefree_limit, "violations": int(bad.size),
                             "examples": bad[:20].tolist(), "pass": bad.size == 0})
    return rep


def rho_mp(x, C, D, dps: int = 40):
    """High-precision evaluation of the reference shape, for regression pins."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        l1 = mpmath.log(x)
        l2 = mpmath.log(l1)
        l3 = mpmath.log(l2)
        expo = C * mpmath.log(l2 / l3) ** 2 + D * l3
        if l3 > 1:
            expo += (D + mpmath.mpf(1) / 2 - 2 * C) * mpmath.log(l3)
        return mpmath.exp(expo) / l1
