"""
fraclange: explicit solutions of :math:`D^\\beta(D^\\alpha u) + D^\\beta(Au) = f`
by Mittag-Leffler eigenfunction expansion, with independent grid oracles.
"""

from __future__ import annotations

from .exceptions import (
    ConvergenceError,
    DomainError,
    FracLangeError,
    GammaOverflowError,
    ModeIndexError,
    PoleError,
    TruncationWarning,
    VerificationError,
)
from .fracops import (
    GridFunction,
    TimeGrid,
    caputo_l1,
    compose_check,
    graded_exponent,
    rl_integral,
    rl_integral_matrix,
)
from .scalar import (
    Forcing,
    ForcingTerm,
    FractionalOrders,
    ScalarProblem,
    dalpha_closed_form,
    monomial_convolution,
    picard_solve,
    quadrature_convolve,
    residual,
    solve_closed_form,
)
from .special import MLQuery, MLResult, Regime, gamma, mittag_leffler, ml, ml_reference
from .spectral import (
    ModeSpec,
    OperatorSpec,
    SolutionField,
    SpectralProblem,
    assemble,
    check_regularity,
    choose_truncation,
    estimate_report,
    lemma6_check,
    residual_report,
    sobolev_norm,
    solve_mode,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "FracLangeError",
    "Forcing",
    "ForcingTerm",
    "FractionalOrders",
    "GammaOverflowError",
    "GridFunction",
    "MLQuery",
    "MLResult",
    "ModeIndexError",
    "ModeSpec",
    "OperatorSpec",
    "PoleError",
    "Regime",
    "ScalarProblem",
    "SolutionField",
    "SpectralProblem",
    "TimeGrid",
    "TruncationWarning",
    "VerificationError",
    "assemble",
    "caputo_l1",
    "check_regularity",
    "choose_truncation",
    "compose_check",
    "dalpha_closed_form",
    "estimate_report",
    "gamma",
    "graded_exponent",
    "lemma6_check",
    "mittag_leffler",
    "ml",
    "ml_reference",
    "monomial_convolution",
    "picard_solve",
    "quadrature_convolve",
    "residual",
    "residual_report",
    "rl_integral",
    "rl_integral_matrix",
    "sobolev_norm",
    "solve_closed_form",
    "solve_mode",
]
