"""Dimension tables over level ranges, attained-dimension spectra and
certified missing dimensions."""

from __future__ import annotations

import logging
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .arith_core import SpfSieve, build_spf_sieve, factorize, is_square
from .certificates import (CertificationError, PsiCertificate, TailCertificate,
                           certify_psi_bound, certify_scan_bound,
                           validate_certificate, validate_psi_certificate)
from .constants import eta_upper, primes_upto
from .dim_formulas import (DimensionOverflowError, SpaceKind, check_weight,
                           dimension, twelfths_coefficients)

log = logging.getLogger(__name__)

CHUNK = 1 << 20
CACHE_MAGIC = b"CUSPDIM\x00"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIBxxxIQ")
CACHE_ENV = "CUSPDIMS_CACHE_DIR"


class UncertifiedRangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DimensionTable:
    space: SpaceKind
    k: int
    limit: int
    dims: np.ndarray = field(repr=False)  # dims[N - 1] = d_k(N)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(n)
        return int(self.dims[n - 1])

    def __eq__(self, other):
        return (isinstance(other, DimensionTable) and self.space is other.space
                and self.k == other.k and self.limit == other.limit
                and np.array_equal(self.dims, other.dims))


def _chunks(lo: int, hi: int, size: int = CHUNK):
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def _check_batch_overflow(k: int, limit: int) -> None:
    # psi <= psi_full <= sigma(N) <= N (1 + log N)
    if (k - 1) * limit * (1 + math.log(max(limit, 2))) >= 2**62:
        raise DimensionOverflowError(f"batch scan k={k}, limit={limit} exceeds 64-bit intermediates")


def sieve_dimensions(space, k: int, limit: int, sieve: Optional[SpfSieve] = None,
                     workers: int = 1) -> DimensionTable:
    space = SpaceKind.parse(space)
    check_weight(k)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if sieve is None:
        sieve = build_spf_sieve(max(limit, 2))
    if limit > sieve.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {sieve.limit}")
    _check_batch_overflow(k, limit)
    K, C2, C3, D = twelfths_coefficients(space, k)
    out = np.empty(limit, dtype=np.int64)

    def run(span):
        lo, hi = span
        bad = _kernels.dims_range(sieve.spf, lo, hi, space.code, K, C2, C3, D, out[lo - 1:hi - 1])
        if bad:
            raise AssertionError(f"integrality/non-negativity failed at N={bad} ({space}, k={k})")

    spans = _chunks(1, limit + 1)
    if workers <= 1:
        for s in spans:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, spans))
    out.setflags(write=False)
    return DimensionTable(space, k, limit, out)


@dataclass(frozen=True, eq=False)
class Components:
    """Per-level multiplicative data for 1 <= N <= limit (index N - 1)."""

    space: SpaceKind
    limit: int
    psi: np.ndarray
    nu_inf: np.ndarray
    nu2: np.ndarray
    nu3: np.ndarray
    mu: np.ndarray
    omega: np.ndarray
    hpart: np.ndarray

    @property
    def mu_slot(self) -> np.ndarray:
        return np.ones_like(self.mu) if self.space is SpaceKind.FULL else self.mu

    def twelve_d(self, k: int) -> np.ndarray:
        K, C2, C3, D = twelfths_coefficients(self.space, k)
        return K * self.psi - 6 * self.nu_inf + C2 * self.nu2 + C3 * self.nu3 + D * self.mu_slot

    def discrepancy12(self, k: int) -> np.ndarray:
        K, C2, C3, D = twelfths_coefficients(self.space, k)
        return -6 * self.nu_inf + C2 * self.nu2 + C3 * self.nu3 + D * self.mu_slot


def compute_components(space, limit: int, sieve: Optional[SpfSieve] = None,
                       workers: int = 1) -> Components:
    space = SpaceKind.parse(space)
    if sieve is None:
        sieve = build_spf_sieve(max(limit, 2))
    if limit > sieve.limit:
        raise ValueError("limit exceeds sieve")
    arrs = [np.empty(limit, dtype=np.int64) for _ in range(7)]

    def run(span):
        lo, hi = span
        _kernels.components_range(sieve.spf, lo, hi, space.code,
                                  *(a[lo - 1:hi - 1] for a in arrs))

    spans = _chunks(1, limit + 1)
    if workers <= 1:
        for s in spans:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, spans))
    return Components(space, limit, *arrs)


# --- binary cache ---------------------------------------------------------


def write_table(table: DimensionTable, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.space.code, table.k, table.limit))
        fh.write(np.ascontiguousarray(table.dims, dtype="<i8").tobytes())
    os.replace(tmp, path)


class CacheFormatError(ValueError):
    pass


def read_table(path) -> DimensionTable:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CacheFormatError("truncated header")
        magic, version, code, k, limit = _HEADER.unpack(head)
        if magic != CACHE_MAGIC:
            raise CacheFormatError("bad magic")
        if version != CACHE_VERSION:
            raise CacheFormatError(f"cache version {version}, expected {CACHE_VERSION}")
        data = np.frombuffer(fh.read(), dtype="<i8")
    if data.size != limit:
        raise CacheFormatError("truncated payload")
    space = [s for s in SpaceKind if s.code == code][0]
    return DimensionTable(space, k, limit, data.astype(np.int64))


def cache_path(space, k: int, limit: int, cache_dir=None) -> Optional[Path]:
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        return None
    return Path(cache_dir) / f"dims-{SpaceKind.parse(space)}-k{k}-{limit}.v{CACHE_VERSION}.bin"


def load_or_build_table(space, k: int, limit: int, cache_dir=None, workers: int = 1,
                        sieve: Optional[SpfSieve] = None) -> DimensionTable:
    path = cache_path(space, k, limit, cache_dir)
    if path is not None and path.exists():
        try:
            t = read_table(path)
            if t.space is SpaceKind.parse(space) and t.k == k and t.limit == limit:
                return t
        except CacheFormatError as exc:
            log.warning("ignoring cache %s: %s", path, exc)
    t = sieve_dimensions(space, k, limit, sieve, workers)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_table(t, path)
    return t


# --- spectra -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ValueSpectrum:
    """Attained dimensions d <= max_certified, with multiplicity and smallest witness level.

    Complete over all N in N: the attached certificate shows no other
    level has dimension <= max_certified.
    """

    space: SpaceKind
    k: int
    limit: int  # largest level scanned (level route) or psi bound (psi route)
    counts: np.ndarray = field(repr=False)
    witness: np.ndarray = field(repr=False)
    max_certified: int
    certificate: object = field(repr=False)

    def attained(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def missing(self) -> np.ndarray:
        return np.flatnonzero(self.counts == 0)

    def ceiling(self, x) -> int:
        return math.floor(Fraction(self.k - 1) * Fraction(x) / 12)

    def verify_witnesses(self, values: Optional[Sequence[int]] = None) -> bool:
        vals = self.attained() if values is None else values
        for d in vals:
            n = int(self.witness[d])
            if n < 1 or dimension(self.space, self.k, factorize(n)).total != d:
                return False
        return True


def count_distinct(vs: ValueSpectrum, x) -> int:
    if x < 0:
        raise ValueError("x must be non-negative")
    c = vs.ceiling(x)
    if c > vs.max_certified:
        raise UncertifiedRangeError(
            f"D({x}) needs dimensions up to {c}; spectrum certified to {vs.max_certified}")
    return int(np.count_nonzero(vs.counts[:c + 1]))


def spectrum_from_table(table: DimensionTable, cert: TailCertificate) -> ValueSpectrum:
    if cert.space is not table.space or cert.k != table.k:
        raise CertificationError("certificate does not match table")
    validate_certificate(cert)
    if cert.scan_limit > table.limit:
        raise CertificationError(
            f"certificate needs levels up to {cert.scan_limit}, table has {table.limit}")
    T = cert.target
    dims = table.dims
    sel = dims <= T
    counts = np.bincount(dims[sel], minlength=T + 1).astype(np.int64)
    witness = np.zeros(T + 1, dtype=np.int64)
    levels = np.flatnonzero(sel) + 1
    vals = dims[sel]
    # first occurrence = smallest level, since levels ascend
    uniq, first = np.unique(vals, return_index=True)
    witness[uniq] = levels[first]
    return ValueSpectrum(table.space, table.k, table.limit, counts, witness, T, cert)


def psi_enumeration(space, k: int, psi_cap: int, d_cap: int = -1, psi_seen_cap: int = -1,
                    census: Optional[tuple[int, int, int]] = None, store: int = 0,
                    min_exp: int = 1, n_cap: int = -1):
    """Run the exhaustive level enumerator; see ``_kernels.dfs_levels``."""
    space = SpaceKind.parse(space)
    K, C2, C3, D = twelfths_coefficients(space, k)
    if psi_cap >= 0 and (K * psi_cap) >= 2**62:
        raise DimensionOverflowError("psi bound too large for 64-bit enumeration")
    if psi_cap < 0 and n_cap < 0:
        raise ValueError("at least one of psi_cap, n_cap must be set")
    # psi(p) >= p - 1, so primes beyond psi_cap + 1 never fit
    caps = [psi_cap + 2] if psi_cap >= 0 else []
    if n_cap >= 0:
        caps.append(math.isqrt(n_cap) + 1 if min_exp >= 2 else n_cap)
    top_prime = min(caps)
    primes = build_spf_sieve(max(top_prime, 2)).primes
    counts = np.zeros(max(d_cap, -1) + 1, dtype=np.int64)
    witness = np.zeros_like(counts)
    seen = np.zeros(max(psi_seen_cap, -1) + 1, dtype=np.uint8)
    out_n = np.zeros(store, dtype=np.int64)
    out_psi = np.zeros(store, dtype=np.int64)
    cps, cd, com = census if census is not None else (-1, -1, -1)
    visited, stored, ccount, err = _kernels.dfs_levels(
        space.code, primes, psi_cap, n_cap, min_exp, K, C2, C3, D, d_cap,
        counts, witness, seen, out_n, out_psi, cps, cd, com)
    if err > 0:
        raise AssertionError(f"integrality failed at N={err} ({space}, k={k})")
    if err < 0:
        raise RuntimeError("enumeration buffers overflowed")
    return {"visited": visited, "counts": counts, "witness": witness, "psi_seen": seen,
            "n": out_n[:stored], "psi": out_psi[:stored], "census": ccount}


def _small_squares(cert: PsiCertificate, psi_cap: int):
    """Squares M^2 with M <= cutoff the enumerator did not reach (psi > psi_cap)."""
    out = []
    for m in range(1, cert.square_cutoff + 1):
        b = dimension(cert.space, cert.k, factorize(m * m))
        if b.psi > psi_cap:
            out.append((m * m, b))
    return out


def spectrum_by_psi(space, k: int, target: int) -> ValueSpectrum:
    cert = certify_psi_bound(space, k, target)
    validate_psi_certificate(cert)
    res = psi_enumeration(space, k, cert.psi_bound, d_cap=target)
    counts, witness = res["counts"], res["witness"]
    for n, b in _small_squares(cert, cert.psi_bound):
        if b.total <= target:
            counts[b.total] += 1
            if witness[b.total] == 0 or n < witness[b.total]:
                witness[b.total] = n
    return ValueSpectrum(SpaceKind.parse(space), k, cert.psi_bound, counts, witness, target, cert)


def build_spectrum(space, k: int, target: int, method: str = "auto", workers: int = 1,
                   max_scan: int = 5 * 10**7, cache_dir=None) -> ValueSpectrum:
    """Certified spectrum up to ``target`` by level scan or psi enumeration."""
    space = SpaceKind.parse(space)
    if method not in ("auto", "scan", "psi"):
        raise ValueError(f"unknown method {method!r}")
    if method == "psi":
        return spectrum_by_psi(space, k, target)
    cert = certify_scan_bound(space, k, target)
    if method == "auto" and cert.scan_limit > max_scan and space is not SpaceKind.FULL:
        return spectrum_by_psi(space, k, target)
    if cert.scan_limit > max_scan:
        raise CertificationError(
            f"scan bound {cert.scan_limit} exceeds the scan budget {max_scan}; try method='psi'")
    table = load_or_build_table(space, k, cert.scan_limit, cache_dir, workers)
    return spectrum_from_table(table, cert)


def missing_values(space, k: int, target: int, cert: TailCertificate,
                   table: DimensionTable) -> list[int]:
    """Every d <= target attained by no level at all."""
    space = SpaceKind.parse(space)
    if cert.space is not space or cert.k != k or cert.target < target:
        raise CertificationError("certificate does not cover this query")
    vs = spectrum_from_table(table, cert)
    return [int(d) for d in vs.missing() if d <= target]


# --- lemma surveys ---------------------------------------------------------


def _decade_checkpoints(limit: int) -> list[int]:
    cps = [10**j for j in range(1, 20) if 10**j < limit]
    return cps + [limit]


def delta_value_survey(space, k: int, r: int, s: Optional[int] = None,
                       scan_limit: int = 10**6, comps: Optional[Components] = None,
                       checkpoints: Optional[Sequence[int]] = None) -> dict:
    """Distinct values of d - (k-1)/12 psi over the constrained levels N <= scan_limit."""
    space = SpaceKind.parse(space)
    check_weight(k)
    if comps is None or comps.limit < scan_limit or comps.space is not space:
        comps = compute_components(space, scan_limit)
    n = np.arange(1, scan_limit + 1)
    om = comps.omega[:scan_limit]
    if space is SpaceKind.FULL:
        if s is None:
            raise ValueError("the full-space survey needs s")
        mask = (om < r) & (comps.hpart[:scan_limit] <= s)
        bound = eta_upper() * math.sqrt(s) * r * (r + 1) ** 2
    else:
        roots = np.sqrt(n).astype(np.int64)
        # correct float sqrt in both directions before testing squareness
        roots -= roots * roots > n
        roots += (roots + 1) * (roots + 1) <= n
        mask = (om < r) & (roots * roots != n)
        bound = 3 * (2 * r + 1) ** 2
    disc = comps.discrepancy12(k)[:scan_limit][mask]
    levels = n[mask]
    uniq, first = np.unique(disc, return_index=True)
    first_levels = np.sort(levels[first])
    cps = list(checkpoints) if checkpoints is not None else _decade_checkpoints(scan_limit)
    trend = [(c, int(np.searchsorted(first_levels, c, side="right"))) for c in cps]
    count = int(uniq.size)
    return {"space": space.value, "k": k, "r": r, "s": s, "scan_limit": scan_limit,
            "distinct_delta_count": count, "bound": bound, "pass": count <= bound,
            "checkpoints": trend, "values12": [int(v) for v in uniq]}


def exceptional_census(space, k: int, x: float, workers: int = 1) -> dict:
    """Count N with min(psi, 12 d/(k-1)) <= x and (omega(N) > 3 loglog x or N square)."""
    space = SpaceKind.parse(space)
    check_weight(k)
    if x <= math.e:
        raise ValueError("x must exceed e so that loglog x > 0")
    thr = 3 * math.log(math.log(x))
    omega_min = math.floor(thr) + 1  # omega > thr
    psi_thr = math.floor(x)
    d_thr = math.floor(Fraction(k - 1) * Fraction(x) / 12)
    if space is SpaceKind.FULL:
        # psi_full >= N, so both conditions force N <= max(x, X(d_thr))
        cert = certify_scan_bound(space, k, d_thr)
        limit = max(psi_thr, cert.scan_limit)
        comps = compute_components(space, limit, workers=workers)
        n = np.arange(1, limit + 1)
        r = np.sqrt(n).astype(np.int64)
        r -= r * r > n
        r += (r + 1) * (r + 1) <= n
        sq = r * r == n
        twelve_d = comps.twelve_d(k)
        hit = (comps.psi <= psi_thr) | (twelve_d <= 12 * d_thr)
        count = int(np.count_nonzero(hit & ((comps.omega >= omega_min) | sq)))
        coverage = {"scan_limit": limit, "certificate": cert.as_dict()}
    else:
        cert = certify_psi_bound(space, k, d_thr)
        cap = max(psi_thr, cert.psi_bound)
        res = psi_enumeration(space, k, cap, census=(psi_thr, d_thr, omega_min))
        count = res["census"]
        for n_sq, b in _small_squares(cert, cap):
            if b.total <= d_thr:
                count += 1  # squares always qualify
        coverage = {"psi_bound": cap, "certificate": cert.as_dict()}
    return {"space": space.value, "k": k, "x": x, "omega_threshold": thr, "count": count,
            "ratio": count * math.log(x) / x, **coverage}
