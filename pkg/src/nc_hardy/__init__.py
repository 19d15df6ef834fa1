"""Finite-dimensional models of noncommutative Hardy spaces.

The algebra ``M`` is a block-diagonal matrix algebra with a weighted diagonal
trace; ``H-infinity`` is its block-upper-triangular part.  The package
implements conjugation, Riesz projection, spectral quantities such as
``mu_t`` and ``lambda_s``, the constants ``K_2k`` and a harness that samples
random algebras to check the inequalities these objects satisfy.
"""

__version__ = "0.1.0"

from .algebra import TracialAlgebra
from .conjugation import analytic_completion, conjugate, regularize, riesz_projection
from .constants import k2k_constant, k2k_polynomial, lp_operator_norm
from .errors import (
    DimensionMismatchError,
    IllConditionedGramError,
    NotAnalyticError,
    NotPositiveError,
    NotSelfAdjointError,
    SingularOperatorError,
    SpectrumTooCloseToZeroError,
)
from .harness import TrialConfig, VerificationReport
from .spectral import lambda_dist, lp_norm, mu, weak_l1_quasinorm
from .szego import factor_exp, jensen_search, prop3_witness, szego_infimum, szego_infimum_right
from .verify import SUITES, run_suite

__all__ = [
    "SUITES",
    "DimensionMismatchError",
    "IllConditionedGramError",
    "NotAnalyticError",
    "NotPositiveError",
    "NotSelfAdjointError",
    "SingularOperatorError",
    "SpectrumTooCloseToZeroError",
    "TracialAlgebra",
    "TrialConfig",
    "VerificationReport",
    "analytic_completion",
    "conjugate",
    "factor_exp",
    "jensen_search",
    "k2k_constant",
    "k2k_polynomial",
    "lambda_dist",
    "lp_norm",
    "lp_operator_norm",
    "mu",
    "prop3_witness",
    "regularize",
    "riesz_projection",
    "run_suite",
    "szego_infimum",
    "szego_infimum_right",
    "weak_l1_quasinorm",
]
