"""CMA-ES with active covariance update and adaptive diagonal decoding."""
from .errors import (ConfigurationError, DDCMAError, DegeneracyError, EvaluationError,
                     NumericalError, ProtocolError)
from .params import StrategyParams, default_params
from .problems import ProblemSpec, make_instance
from .strategy import DDCMA, OptimizerConfig, Status, TerminationCriteria, fmin
from .weights import WeightProfile, build_weights

__version__ = "0.1.0"

__all__ = [
    "DDCMA", "OptimizerConfig", "Status", "TerminationCriteria", "fmin",
    "StrategyParams", "default_params", "WeightProfile", "build_weights",
    "ProblemSpec", "make_instance",
    "DDCMAError", "ConfigurationError", "ProtocolError", "EvaluationError",
    "NumericalError", "DegeneracyError",
]
