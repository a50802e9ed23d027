"""Majorization-minimization solvers for nonconvex-penalized smooth losses."""

from .cccp import (
    CccpConfig,
    ConvexRemainder,
    DcProblem,
    cccp_descent_check,
    cccp_step,
    dc_decompose,
    dc_problem_from_penalty,
    run_cccp,
)
from .data_io import (
    LibsvmFormatError,
    SyntheticSpec,
    read_libsvm,
    read_trace_csv,
    synth_generate,
    write_libsvm,
    write_trace,
)
from .diagnostics import (
    RateFit,
    ResidualReport,
    finite_length,
    kkt_residual,
    rate_fit,
    subgradient_residual,
)
from .losses import (
    Dataset,
    LeastSquaresLoss,
    LogisticLoss,
    gram_max_eigenvalue,
    least_squares_strong_convexity,
    make_loss,
)
from .mm import (
    IterateTrace,
    MmConfig,
    ProblemInstance,
    linearized_penalty_value,
    quad_surrogate_value,
    reweighted_l1_weights,
    run_mm,
    step_a,
    step_b,
)
from .penalties import (
    CappedL1Penalty,
    LogEpsilonPenalty,
    LogPenalty,
    McpPenalty,
    Penalty,
    ScadPenalty,
    SubgradientInterval,
    UnsupportedPenaltyError,
    make_penalty,
)

__version__ = "0.1.0"

__all__ = [
    "CappedL1Penalty",
    "CccpConfig",
    "ConvexRemainder",
    "Dataset",
    "DcProblem",
    "IterateTrace",
    "LeastSquaresLoss",
    "LibsvmFormatError",
    "LogEpsilonPenalty",
    "LogPenalty",
    "LogisticLoss",
    "McpPenalty",
    "MmConfig",
    "Penalty",
    "ProblemInstance",
    "RateFit",
    "ResidualReport",
    "ScadPenalty",
    "SubgradientInterval",
    "SyntheticSpec",
    "UnsupportedPenaltyError",
    "cccp_descent_check",
    "cccp_step",
    "dc_decompose",
    "dc_problem_from_penalty",
    "finite_length",
    "gram_max_eigenvalue",
    "kkt_residual",
    "least_squares_strong_convexity",
    "linearized_penalty_value",
    "make_loss",
    "make_penalty",
    "quad_surrogate_value",
    "rate_fit",
    "read_libsvm",
    "read_trace_csv",
    "reweighted_l1_weights",
    "run_cccp",
    "run_mm",
    "step_a",
    "step_b",
    "subgradient_residual",
    "synth_generate",
    "write_libsvm",
    "write_trace",
]
