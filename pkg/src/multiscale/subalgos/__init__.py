"""Sub-algorithms run underneath the multi-scale combiner."""

from .kernel import (
    Kernel,
    KernelOGD,
    LinearKernel,
    PolynomialKernel,
    RBFKernel,
    kernel_ogd_step,
    make_kernel,
)
from .matrix import MatrixEG, MatrixMW, capped_spectraplex_project, matrix_eg_step, mmw_step
from .mirror import LinearPredictor, MirrorDescent, lp_norm, md_regret_certificate, md_step

__all__ = [
    "Kernel",
    "KernelOGD",
    "LinearKernel",
    "LinearPredictor",
    "MatrixEG",
    "MatrixMW",
    "MirrorDescent",
    "PolynomialKernel",
    "RBFKernel",
    "capped_spectraplex_project",
    "kernel_ogd_step",
    "lp_norm",
    "make_kernel",
    "matrix_eg_step",
    "md_regret_certificate",
    "md_step",
    "mmw_step",
]
