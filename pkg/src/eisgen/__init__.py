"""Eisenstein ideals of weight-2 Hecke algebras of prime level, mod p^2.

Checks, for irregular pairs (p, k), whether U_p - 1 generates the
Eisenstein ideal of the Hecke algebra of level p and nebentypus
omega^(k-2), together with the supporting arithmetic: Howell forms over
Z/p^B, Bernoulli numbers mod p^B, modular symbols, and eigenspace
decompositions of Z_p[Delta]-modules.
"""

__version__ = "0.1.0"

from .arith import DomainError, PrecisionError, ResidueRing  # noqa: E402
from .bernoulli import IrregularPair, irregular_pairs  # noqa: E402
from .eisenstein import VerifyOptions, verify_pair  # noqa: E402

__all__ = ["DomainError", "PrecisionError", "ResidueRing", "IrregularPair",
           "irregular_pairs", "VerifyOptions", "verify_pair", "__version__"]
