"""Exact dimensions of spaces of cusp forms on Gamma_0(N) and the
distribution of the values they take."""

from .arith_core import Factorization, build_spf_sieve, factorize
from .certificates import (CertificationError, certify_psi_bound, certify_scan_bound,
                           validate_certificate, validate_psi_certificate)
from .dim_formulas import DimensionBreakdown, SpaceKind, dimension, local_factor

__all__ = [
    "CertificationError", "DimensionBreakdown", "Factorization", "SpaceKind",
    "build_spf_sieve", "certify_psi_bound", "certify_scan_bound", "dimension",
    "factorize", "local_factor", "validate_certificate", "validate_psi_certificate",
]
