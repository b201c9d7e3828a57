"""Experiment harness: streams, experiments, reports and verification suites."""

from .experiment import ExperimentConfig, build_spec, run_experiment, run_seed, sweep
from .hedge import hedge_expected_loss
from .report import ReportRow, emit_report
from .streams import (
    expert_losses,
    gen_linear_gradients,
    gen_linear_stream,
    gen_matrix_stream,
    gen_pca_stream,
    gen_supervised_stream,
)
from .verify import (
    MaximalInequalitySpec,
    VerificationReport,
    sign_sum_process,
    verify_lemma_n2,
    verify_maximal_inequality,
    verify_perturbation_theorem,
)

__all__ = [
    "ExperimentConfig",
    "MaximalInequalitySpec",
    "ReportRow",
    "VerificationReport",
    "build_spec",
    "emit_report",
    "expert_losses",
    "gen_linear_gradients",
    "gen_linear_stream",
    "gen_matrix_stream",
    "gen_pca_stream",
    "gen_supervised_stream",
    "hedge_expected_loss",
    "run_experiment",
    "run_seed",
    "sign_sum_process",
    "sweep",
    "verify_lemma_n2",
    "verify_maximal_inequality",
    "verify_perturbation_theorem",
]
