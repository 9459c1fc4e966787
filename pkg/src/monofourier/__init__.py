"""Fourier thresholding estimation of monotone functions on the Boolean hypercube."""

__version__ = "0.1.0"

from .core import (FourierSpectrum, TruthTable, character, hypercontractivity_check, lp_norm,
                   noise_operator, wht_forward, wht_inverse)
from .estimator import Dataset, EstimatorConfig, EstimatorOutput, fit, schedule
from .harness import NoiseModel, constant_baseline_risk, exact_risk, generate_dataset, mc_risk
from .influence import (concentration_report, discrete_derivative, influence_from_spectrum,
                        influence_profile, is_monotone)
from .kernels import BACKEND
from .zoo import AdditiveJunta, Dictator, Majority, MiddleLayer, Table, Tribes

__all__ = [
    "AdditiveJunta", "BACKEND", "Dataset", "Dictator", "EstimatorConfig", "EstimatorOutput",
    "FourierSpectrum", "Majority", "MiddleLayer", "NoiseModel", "Table", "Tribes", "TruthTable",
    "character", "concentration_report", "constant_baseline_risk", "discrete_derivative",
    "exact_risk", "fit", "generate_dataset", "hypercontractivity_check", "influence_from_spectrum",
    "influence_profile", "is_monotone", "lp_norm", "mc_risk", "noise_operator", "schedule",
    "wht_forward", "wht_inverse",
]
