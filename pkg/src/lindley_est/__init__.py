"""Estimators of the Lindley PDF and CDF.

The compiled fitting kernel is used when available; ``BACKEND`` names the one
selected at import.
"""
__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .distribution import (
    Sample, cdf, cdf_dtheta, log_survival, pdf, quantile, sample, substream,
    sum_pdf, sum_weights, survival,
)
from .errors import (
    BracketError, ConvergenceError, DomainError, EvaluationError, NumericalError,
)
from .estimators import (
    EstimatorKind, PlottingPositions, ThetaEstimate, ade, cvme, estimate, g_of_t,
    lse, mle, pce, wlse,
)
from .function_estimators import (
    UmvueContext, estimate_curve, plugin_cdf, plugin_pdf, umvue_cdf, umvue_pdf,
)
from .optimize import Bracket, find_root, minimize_scalar
from .risk import RiskQuery, RiskResult, deriv_g, mle_risk, risk, umvue_risk
from .simulation import MseReport, SimConfig, rank_methods, run_simulation
from .special import gamma_pdf, log_gamma, reg_inc_beta

__all__ = [
    "BACKEND", "Bracket", "BracketError", "ConvergenceError", "DomainError",
    "EstimatorKind", "EvaluationError", "MseReport", "NumericalError",
    "PlottingPositions", "RiskQuery", "RiskResult", "Sample", "SimConfig",
    "ThetaEstimate", "UmvueContext", "ade", "cdf", "cdf_dtheta", "cvme",
    "deriv_g", "estimate", "estimate_curve", "find_root", "g_of_t", "gamma_pdf",
    "log_gamma", "log_survival", "lse", "minimize_scalar", "mle", "mle_risk",
    "pce", "pdf", "plugin_cdf", "plugin_pdf", "quantile", "rank_methods",
    "reg_inc_beta", "risk", "run_simulation", "sample", "substream", "sum_pdf",
    "sum_weights", "survival", "umvue_cdf", "umvue_pdf", "umvue_risk", "wlse",
]
