"""Multi-scale follow-the-perturbed-leader and parameter-free online learning.

Experts (or sub-algorithms) whose losses live on different ranges c_i are
combined so that the regret to expert i scales with c_i instead of max_j c_j.
"""

from . import kernels
from .core import (
    AbsoluteLoss,
    LinearLoss,
    LogisticLoss,
    LossVector,
    RegretLedger,
    ScaleLiftWarning,
    ScaleProfile,
    SimplexWeights,
    center_loss,
    cumulative_regret,
)
from .errors import (
    ConfigurationError,
    DimensionError,
    MultiScaleError,
    ScaleViolation,
    SizingError,
    SolverError,
)
from .ftpl import GAUSSIAN, RADEMACHER, FtplState, compute_bound
from .meta import MetaState, SubAlgorithmHandle, learning_round, oco_round, register
from .saddle import SaddleProblem, solve, solve_exact_small

__version__ = "0.1.0"

__all__ = [
    "GAUSSIAN",
    "RADEMACHER",
    "AbsoluteLoss",
    "ConfigurationError",
    "DimensionError",
    "FtplState",
    "LinearLoss",
    "LogisticLoss",
    "LossVector",
    "MetaState",
    "MultiScaleError",
    "RegretLedger",
    "SaddleProblem",
    "ScaleLiftWarning",
    "ScaleProfile",
    "ScaleViolation",
    "SimplexWeights",
    "SizingError",
    "SolverError",
    "SubAlgorithmHandle",
    "center_loss",
    "compute_bound",
    "cumulative_regret",
    "kernels",
    "learning_round",
    "oco_round",
    "register",
    "solve",
    "solve_exact_small",
]
