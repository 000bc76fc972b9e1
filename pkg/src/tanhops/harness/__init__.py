"""Experiment runners, slope fitting and CSV reporting."""

from tanhops.harness.config import (
    CascadeStudyConfig,
    CompileStudyConfig,
    ConvergenceStudyConfig,
    DensityCheckConfig,
    FractionalStudyConfig,
    StabilityStudyConfig,
)
from tanhops.harness.report import emit_csv, render_csv
from tanhops.harness.studies import (
    ConvergenceRecord,
    fit_loglog_slope,
    run_cascade_study,
    run_compile_study,
    run_convergence_study,
    run_density_check,
    run_fractional_study,
    run_stability_study,
)

__all__ = [
    "CascadeStudyConfig",
    "CompileStudyConfig",
    "ConvergenceRecord",
    "ConvergenceStudyConfig",
    "DensityCheckConfig",
    "FractionalStudyConfig",
    "StabilityStudyConfig",
    "emit_csv",
    "fit_loglog_slope",
    "render_csv",
    "run_cascade_study",
    "run_compile_study",
    "run_convergence_study",
    "run_density_check",
    "run_fractional_study",
    "run_stability_study",
]
