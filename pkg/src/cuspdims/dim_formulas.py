"""Exact dimensions of S_k(Gamma_0(N)), its new subspace and its twist-minimal subspace.

Every formula has the shape

    dim = (k-1)/12 psi(N) - 1/2 nu_inf(N) + c2(k) nu2(N) + c3(k) nu3(N) + delta2(k) * m(N)

with psi, nu_inf, nu2, nu3 multiplicative and m(N) = 1 (full) or mu(N)
(new, min).  All arithmetic is done in integer twelfths.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .arith_core import Factorization, eval_multiplicative, mobius

INTERMEDIATE_BITS = 127
COMPONENTS = ("psi", "nu_inf", "nu2", "nu3")


class SpaceKind(enum.Enum):
    FULL = "full"
    NEW = "new"
    MIN = "min"

    @property
    def code(self) -> int:
        return {"full": 0, "new": 1, "min": 2}[self.value]

    @classmethod
    def parse(cls, s) -> "SpaceKind":
        if isinstance(s, cls):
            return s
        return cls(str(s).lower())

    def __str__(self):
        return self.value


class DimensionOverflowError(OverflowError):
    pass


def check_weight(k: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool):
        raise TypeError("weight must be an int")
    if k < 2 or k % 2:
        raise ValueError(f"weight must be an even integer >= 2, got {k}")
    return k


@dataclass(frozen=True)
class TwelfthInt:
    """The rational num12/12."""

    num12: int

    def __add__(self, other):
        if isinstance(other, TwelfthInt):
            return TwelfthInt(self.num12 + other.num12)
        if isinstance(other, int):
            return TwelfthInt(self.num12 + 12 * other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return TwelfthInt(-self.num12)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return TwelfthInt(self.num12 * other)
        return NotImplemented

    __rmul__ = __mul__

    def to_int(self) -> int:
        if self.num12 % 12:
            raise ValueError(f"{self.num12}/12 is not an integer")
        return self.num12 // 12

    def __str__(self):
        return f"{self.num12}/12"


# (-4/m) for odd m, by m mod 4; (-3/m) by m mod 3
_KRONECKER_M4 = {1: 1, 3: -1}
_KRONECKER_M3 = {0: 0, 1: 1, 2: -1}


def coeff_c2(k: int) -> TwelfthInt:
    check_weight(k)
    return TwelfthInt(-3 * _KRONECKER_M4[(k - 1) % 4])


def coeff_c3(k: int) -> TwelfthInt:
    check_weight(k)
    return TwelfthInt(-4 * _KRONECKER_M3[(k - 1) % 3])


def delta2(k: int) -> int:
    check_weight(k)
    return 1 if k == 2 else 0


def _mu_prime_power(p: int, e: int) -> int:
    if e == 0:
        return 1
    return -1 if e == 1 else 0


def _full(component: str, p: int, e: int) -> int:
    pe = p**e
    if component == "psi":
        return pe + p ** (e - 1)
    if component == "nu_inf":
        if e % 2:
            return 2 * p ** ((e - 1) // 2)
        return p ** (e // 2) + p ** (e // 2 - 1)
    if component == "nu2":
        if pe == 2:
            return 1
        return 2 if p % 4 == 1 else 0
    if pe == 3:
        return 1
    return 2 if p % 3 == 1 else 0


def _new(component: str, p: int, e: int) -> int:
    pe = p**e
    if component == "psi":
        if e == 1:
            return p - 1
        if e == 2:
            return p * p - p - 1
        return p ** (e - 3) * (p - 1) ** 2 * (p + 1)
    if component == "nu_inf":
        if e == 2:
            return p - 2
        if e % 2 == 0:
            return p ** (e // 2 - 2) * (p - 1) ** 2
        return 0
    if component == "nu2":
        if p % 4 == 3 and e == 1:
            return -2
        if (p % 4 == 3 and e == 2) or pe == 8:
            return 1
        if (p % 4 == 1 and e == 2) or pe in (2, 4):
            return -1
        return 0
    if p % 3 == 2 and e == 1:
        return -2
    if (p % 3 == 2 and e == 2) or pe == 27:
        return 1
    if (p % 3 == 1 and e == 2) or pe in (3, 9):
        return -1
    return 0


def _min(component: str, p: int, e: int) -> int:
    pe = p**e
    if component == "psi":
        g = 2 if (p % 2 and e % 2 == 0) else 1  # gcd(2, p-1, e)
        assert (p - 1) % g == 0
        prefactor = (p - 1) // g
        if e == 1:
            return prefactor
        if e == 2:
            return prefactor * (p - 1)
        return prefactor * p ** (e - 3) * (p * p - 1)
    if component == "nu_inf":
        if p == 2 and e % 2 == 0 and e > 2:
            return 2 ** (e // 2 - 2)
        return 0
    if component == "nu2":
        if p % 4 == 3:
            return -2 * _mu_prime_power(p, e - 1)
        if pe in (2, 4):
            return -1
        return 1 if pe == 8 else 0
    if p % 3 == 2 and pe != 4:
        return -2 * _mu_prime_power(p, e - 1)
    if pe in (3, 9):
        return -1
    return 1 if pe in (4, 27) else 0


_TABLES = {SpaceKind.FULL: _full, SpaceKind.NEW: _new, SpaceKind.MIN: _min}


def local_factor(space, component: str, p: int, e: int) -> int:
    """Value of psi / nu_inf / nu2 / nu3 on the prime power p**e > 1."""
    if component not in COMPONENTS:
        raise ValueError(f"unknown component {component!r}")
    if e < 1:
        raise ValueError("local factors are defined for p**e > 1 only")
    return _TABLES[SpaceKind.parse(space)](component, p, e)


def eval_component(space, component: str, f: Factorization) -> int:
    space = SpaceKind.parse(space)
    return eval_multiplicative(f, lambda p, e: local_factor(space, component, p, e))


@dataclass(frozen=True)
class DimensionBreakdown:
    space: SpaceKind
    k: int
    n: int
    psi: int
    nu_inf: int
    nu2: int
    nu3: int
    mu_term: int
    total: int

    def terms12(self) -> tuple[int, int, int, int, int]:
        """The five summands scaled by 12, in formula order."""
        return (
            (self.k - 1) * self.psi,
            -6 * self.nu_inf,
            coeff_c2(self.k).num12 * self.nu2,
            coeff_c3(self.k).num12 * self.nu3,
            12 * delta2(self.k) * self.mu_term,
        )

    def as_dict(self) -> dict:
        t = self.terms12()
        return {
            "space": self.space.value, "k": self.k, "N": self.n,
            "psi": self.psi, "nu_inf": self.nu_inf, "nu2": self.nu2,
            "nu3": self.nu3, "mu_term": self.mu_term,
            "psi_term12": t[0], "nu_inf_term12": t[1], "nu2_term12": t[2],
            "nu3_term12": t[3], "delta2_term12": t[4], "total": self.total,
        }


def dimension(space, k: int, f: Factorization) -> DimensionBreakdown:
    space = SpaceKind.parse(space)
    check_weight(k)
    psi = eval_component(space, "psi", f)
    if (k - 1) * psi >= 2**INTERMEDIATE_BITS:
        raise DimensionOverflowError(
            f"(k-1)*psi(N) exceeds 2**{INTERMEDIATE_BITS} for k={k}, N={f.n}")
    nu_inf = eval_component(space, "nu_inf", f)
    nu2 = eval_component(space, "nu2", f)
    nu3 = eval_component(space, "nu3", f)
    mu_term = 1 if space is SpaceKind.FULL else mobius(f)
    acc = (TwelfthInt((k - 1) * psi) + TwelfthInt(-6 * nu_inf)
           + coeff_c2(k) * nu2 + coeff_c3(k) * nu3 + delta2(k) * mu_term)
    if acc.num12 % 12:
        raise AssertionError(
            f"12 does not divide {acc.num12} for {space} k={k} N={f.n}: transcription bug")
    total = acc.num12 // 12
    if total < 0:
        raise AssertionError(f"negative dimension {total} for {space} k={k} N={f.n}")
    return DimensionBreakdown(space, k, f.n, psi, nu_inf, nu2, nu3, mu_term, total)


def discrepancy12(space, k: int, f: Factorization) -> int:
    """12*d - (k-1)*psi(N), i.e. twelve times d minus its main term."""
    b = dimension(space, k, f)
    return 12 * b.total - (k - 1) * b.psi


def twelfths_coefficients(space, k: int) -> tuple[int, int, int, int]:
    """(k-1, 12*c2, 12*c3, 12*delta2) as used by the compiled scans."""
    check_weight(k)
    return k - 1, coeff_c2(k).num12, coeff_c3(k).num12, 12 * delta2(k)


def min_local_psi(space, p: int) -> int:
    """Smallest psi(p**e) over e >= 1; psi(p**e) is non-decreasing in e."""
    space = SpaceKind.parse(space)
    return p + 1 if space is SpaceKind.FULL else p - 1
