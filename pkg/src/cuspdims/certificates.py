"""Tail certificates: proofs that no level outside a finite search region
has dimension at most a target T.

Two kinds are produced.

``TailCertificate`` (level kind): for every N > X, d(N) > T.  It chains

    d >= psi * ((k-1)/12 - 1/(2 sqrt N)) - 7/12 * 2^omega(N) -/+ delta2

(using 0 <= nu_inf <= psi/sqrt N and |c2 nu2 + c3 nu3| <= 7/12 2^omega)
with explicit lower bounds for psi:

    full  psi >= N
    new   psi >= A * phi(N),  A = prod_p (1 - 1/(p(p-1)))
    min   psi >= phi(N)^2 / (2^omega N)

phi(N) > N / (e^gamma loglog N + 3/loglog N)   and
omega(N) <= 1.3841 log N / loglog N.

The envelope is checked on consecutive intervals [a, b] of a geometric
grid, using on each interval the end of each monotone factor that makes
the bound smaller; beyond the top of the grid a log-derivative argument
closes the tail.

``PsiCertificate`` (new/min only): every N with d(N) <= T either has
psi(N) <= psi_bound or is a square M^2 with M <= square_cutoff.  It is
purely integer/rational.  It uses nu_inf = 0 off squares and
omega(N) <= max{j : prod_{i<=j} (p_i - 1) <= psi(N)}, valid because
psi(p^e) >= p - 1 for every prime power.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .constants import (EULER_GAMMA, ROBIN_OMEGA_C, ROSSER_SCHOENFELD_C,
                        artin_lower_bound, primes_upto)
from .dim_formulas import SpaceKind, check_weight, delta2

E_GAMMA = math.exp(EULER_GAMMA)
LN2 = math.log(2.0)


class CertificationError(RuntimeError):
    """No certificate could be produced, or a certificate failed validation."""


@dataclass(frozen=True)
class EnvelopeParams:
    grid_start: float = 16.0
    grid_ratio: float = 1.001
    grid_top: float = 1e100
    slack: float = 0.01
    artin_prime_limit: int = 10**4
    rs_constant: float = ROSSER_SCHOENFELD_C
    robin_constant: float = ROBIN_OMEGA_C


@dataclass(frozen=True)
class TailCertificate:
    space: SpaceKind
    k: int
    target: int
    scan_limit: int
    params: EnvelopeParams
    verdict: dict = field(compare=False)
    kind: str = "level"

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "space": self.space.value, "k": self.k,
             "target": self.target, "scan_limit": self.scan_limit,
             "params": asdict(self.params)}
        d["verdict"] = dict(self.verdict)
        return d


def _h(u, rs):
    return E_GAMMA * u + rs / u


def _psi_lower(space: SpaceKind, n_lo, n_hi, prm: EnvelopeParams, artin: float):
    """Lower bound for psi on [n_lo, n_hi] (arrays or floats)."""
    if space is SpaceKind.FULL:
        return n_lo
    phi_lo = n_lo / _h(np.log(np.log(n_lo)), prm.rs_constant)
    if space is SpaceKind.NEW:
        return artin * phi_lo
    w_hi = prm.robin_constant * np.log(n_hi) / np.log(np.log(n_hi))
    return phi_lo * phi_lo / (n_hi * np.exp2(w_hi))


def _interval_margins(space, k, target, prm: EnvelopeParams, artin: float):
    n_int = int(math.ceil(math.log(prm.grid_top / prm.grid_start) / math.log(prm.grid_ratio)))
    edges = prm.grid_start * np.exp(np.arange(n_int + 1) * math.log(prm.grid_ratio))
    a, b = edges[:-1], edges[1:]
    coef = (k - 1) / 12.0 - 0.5 / np.sqrt(a)
    main = _psi_lower(space, a, b, prm, artin) * coef
    w_hi = prm.robin_constant * np.log(b) / np.log(np.log(b))
    loss = 7.0 / 12.0 * np.exp2(w_hi)
    d2 = 0 if space is SpaceKind.FULL else delta2(k)
    ok = (coef > 0) & (main * (1 - prm.slack) > target + loss + d2)
    return a, b, ok, main, loss


def _monotonicity_checks(space, a, prm: EnvelopeParams, artin: float) -> bool:
    # every factor used at an interval end must move the right way along the grid
    u = np.log(np.log(a))
    phi_lo = a / _h(u, prm.rs_constant)
    w = prm.robin_constant * np.log(a) / u
    return bool(np.all(np.diff(phi_lo) > 0) and np.all(np.diff(w) > 0)
                and a[0] > math.e ** math.e)


def _tail_lemma(space, k, target, prm: EnvelopeParams, artin: float) -> dict:
    """Log-derivative argument for N >= grid_top.

    With L = log N and u = log L (u >= u0):
      d/dL log(N/h(u)) >= 1 - 1/(u L)       since h'/h <= 1/u
      d/dL [omega bound * log 2] <= 1.3841 log 2 / u
    If the main term grows faster than the 2^omega loss and, at the grid
    top, main >= 2 * loss and main >= 2 * (T + delta2 + 1), the bound
    d > T persists for all larger N.
    """
    n0 = prm.grid_top
    L0 = math.log(n0)
    u0 = math.log(L0)
    beta = prm.robin_constant * LN2 / u0
    g = 1.0 - 1.0 / (u0 * L0)
    if space is SpaceKind.FULL:
        alpha = 1.0
    elif space is SpaceKind.NEW:
        alpha = g
    else:
        alpha = 2 * g - 1 - beta
    coef = (k - 1) / 12.0 - 0.5 / math.sqrt(n0)
    main = float(_psi_lower(space, n0, n0, prm, artin)) * coef
    loss = 7.0 / 12.0 * 2.0 ** (prm.robin_constant * L0 / u0)
    need = 2.0 * (target + delta2(k) + 1)
    ok = (u0 >= 1 and coef > 0 and alpha > beta
          and main * (1 - prm.slack) >= 2 * loss
          and main * (1 - prm.slack) >= need)
    return {"L0": L0, "alpha": alpha, "beta": beta, "main": main, "loss": loss,
            "need": need, "ok": bool(ok)}


def certify_scan_bound(space, k: int, target: int,
                       params: EnvelopeParams | None = None) -> TailCertificate:
    """Smallest grid-aligned X such that every N > X has d_k(N) > target."""
    space = SpaceKind.parse(space)
    check_weight(k)
    if target < 0:
        raise ValueError("target must be >= 0")
    prm = params or EnvelopeParams()
    artin = artin_lower_bound(prm.artin_prime_limit)
    a, b, ok, main, loss = _interval_margins(space, k, target, prm, artin)
    if not _monotonicity_checks(space, a, prm, artin):
        raise CertificationError("envelope factors are not monotone on the grid")
    tail = _tail_lemma(space, k, target, prm, artin)
    if not tail["ok"]:
        raise CertificationError(
            f"envelope does not exceed {target} by the top of the grid ({prm.grid_top:g})")
    bad = np.flatnonzero(~ok)
    if bad.size:
        X = int(math.ceil(b[bad[-1]]))
        first_good = bad[-1] + 1
    else:
        X = int(math.ceil(prm.grid_start))
        first_good = 0
    d2 = 0 if space is SpaceKind.FULL else delta2(k)
    verdict = {
        "intervals_checked": int(a.size - first_good),
        "min_ratio": float(np.min(main[first_good:] * (1 - prm.slack)
                                  / (target + loss[first_good:] + d2))),
        "artin_lower_bound": artin if space is SpaceKind.NEW else None,
        "tail": tail,
    }
    return TailCertificate(space, k, target, X, prm, verdict)


def validate_certificate(cert: TailCertificate) -> bool:
    """Re-derive every inequality of a level certificate; raise if any fails."""
    prm = cert.params
    artin = artin_lower_bound(prm.artin_prime_limit)
    a, b, ok, _, _ = _interval_margins(cert.space, cert.k, cert.target, prm, artin)
    if not _monotonicity_checks(cert.space, a, prm, artin):
        raise CertificationError("monotonicity check failed")
    covered = b > cert.scan_limit
    # intervals straddling X still have to pass: the bound is needed on (X, b]
    if not np.all(ok[covered]):
        raise CertificationError(
            f"envelope fails above the claimed scan limit {cert.scan_limit}")
    if cert.scan_limit < prm.grid_start:
        raise CertificationError("scan limit below the start of the grid")
    if not _tail_lemma(cert.space, cert.k, cert.target, prm, artin)["ok"]:
        raise CertificationError("tail lemma failed")
    return True


def envelope_point(cert_or_space, k: int | None = None, n: int | None = None,
                   params: EnvelopeParams | None = None) -> float:
    """The certified lower bound for d_k(N) at a single level (for audits)."""
    if isinstance(cert_or_space, TailCertificate):
        space, k, prm = cert_or_space.space, cert_or_space.k, cert_or_space.params
    else:
        space, prm = SpaceKind.parse(cert_or_space), params or EnvelopeParams()
    artin = artin_lower_bound(prm.artin_prime_limit)
    x = float(n)
    main = float(_psi_lower(space, x, x, prm, artin)) * ((k - 1) / 12.0 - 0.5 / math.sqrt(x))
    w = prm.robin_constant * math.log(x) / math.log(math.log(x))
    d2 = 0 if space is SpaceKind.FULL else delta2(k)
    return main - 7.0 / 12.0 * 2.0**w - d2


# --- psi-bounded certificates -------------------------------------------


@dataclass(frozen=True)
class PsiCertificate:
    space: SpaceKind
    k: int
    target: int
    psi_bound_nonsquare: int
    square_cutoff: int
    psi_bound_square: int
    omega_steps: tuple[int, ...]
    kind: str = "psi"

    @property
    def psi_bound(self) -> int:
        return max(self.psi_bound_nonsquare, self.psi_bound_square)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "space": self.space.value, "k": self.k,
                "target": self.target, "psi_bound": self.psi_bound,
                "psi_bound_nonsquare": self.psi_bound_nonsquare,
                "psi_bound_square": self.psi_bound_square,
                "square_cutoff": self.square_cutoff,
                "omega_steps": list(self.omega_steps)}


def _omega_steps(limit: int) -> list[int]:
    """P_0 = 1, P_j = prod of (p - 1) over the first j primes, up to the first P_j > limit."""
    steps = [1]
    bound = 100
    while True:
        for p in primes_upto(bound)[len(steps) - 1:]:
            steps.append(steps[-1] * (p - 1))
            if steps[-1] > limit:
                return steps
        bound *= 2


def _largest_failing_psi(coef: Fraction, rhs0: int, steps: list[int]) -> int:
    """Largest psi with coef*psi <= rhs0 + 7*2^omega_max(psi), else 0."""
    worst = 0
    for j in range(len(steps) - 1):
        rhs = rhs0 + 7 * 2**j
        cap = math.floor(Fraction(rhs) / coef)
        if cap >= steps[j]:
            worst = max(worst, min(cap, steps[j + 1] - 1))
    return worst


def certify_psi_bound(space, k: int, target: int, square_cutoff: int | None = None) -> PsiCertificate:
    space = SpaceKind.parse(space)
    check_weight(k)
    if space is SpaceKind.FULL:
        raise CertificationError("psi certificates need nu_inf = 0 off squares (new/min only)")
    if target < 0:
        raise ValueError("target must be >= 0")
    M0 = square_cutoff if square_cutoff is not None else -(-600 // (k - 1))
    rhs0 = 12 * target + 12 * delta2(k)
    coef_ns = Fraction(k - 1)
    coef_sq = Fraction(k - 1) - Fraction(6, M0 + 1)
    if coef_sq <= 0:
        raise CertificationError("square cutoff too small for a positive main term")
    # steps must run past every psi that could still fail
    steps = _omega_steps(int(Fraction(rhs0 + 7) / coef_sq) + 1)
    while Fraction(rhs0 + 7 * 2 ** (len(steps) - 1)) / coef_sq >= steps[-1]:
        steps = _omega_steps(steps[-1] * 2)
    ns = _largest_failing_psi(coef_ns, rhs0, steps)
    sq = _largest_failing_psi(coef_sq, rhs0, steps)
    return PsiCertificate(space, k, target, ns, M0, sq, tuple(steps))


def validate_psi_certificate(cert: PsiCertificate) -> bool:
    fresh = certify_psi_bound(cert.space, cert.k, cert.target, cert.square_cutoff)
    if (fresh.psi_bound_nonsquare, fresh.psi_bound_square) != \
            (cert.psi_bound_nonsquare, cert.psi_bound_square):
        raise CertificationError("psi bounds do not re-derive")
    steps = list(cert.omega_steps)
    ps = primes_upto(1000)
    if len(steps) > len(ps):
        raise CertificationError("omega step table implausibly long")
    for j in range(1, len(steps)):
        if steps[j] != steps[j - 1] * (ps[j - 1] - 1):
            raise CertificationError("omega step table is wrong")
    return True
