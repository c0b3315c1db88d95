"""Copula-based semiparametric transformed linear models for dependently
censored survival data: estimation, goodness of fit and simulation."""

from ._kernels import BACKEND
from .copulas import CopulaFamily, CopulaModel, bivariate_normal_cdf, r_from_tau, tau_from_r
from .core import Dataset, ModelParams, Observation, StepTransform
from .errors import (
    DegenerateTransformError,
    DepcensError,
    EstimationError,
    InputError,
    InvalidStateError,
    ParseError,
)
from .estimator import BootstrapResult, FitConfig, FitResult, bootstrap_se, fit, maximize_theta, update_jumps
from .gof import GofResult, StepCdf, bootstrap_gof, cramer_von_mises, kaplan_meier, model_cdf_v
from .likelihood import ModelSpec
from .marginals import Family, MarginalModel, lambda_hazard, normal, scaled_t

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BootstrapResult",
    "CopulaFamily",
    "CopulaModel",
    "Dataset",
    "DegenerateTransformError",
    "DepcensError",
    "EstimationError",
    "Family",
    "FitConfig",
    "FitResult",
    "GofResult",
    "InputError",
    "InvalidStateError",
    "MarginalModel",
    "ModelParams",
    "ModelSpec",
    "Observation",
    "ParseError",
    "StepCdf",
    "StepTransform",
    "bivariate_normal_cdf",
    "bootstrap_gof",
    "bootstrap_se",
    "cramer_von_mises",
    "fit",
    "kaplan_meier",
    "lambda_hazard",
    "maximize_theta",
    "model_cdf_v",
    "normal",
    "r_from_tau",
    "scaled_t",
    "tau_from_r",
    "update_jumps",
    "__version__",
]
