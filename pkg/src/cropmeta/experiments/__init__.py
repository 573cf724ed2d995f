"""Experiment orchestration: splits, transfer grid, pseudo-real pipeline, reports."""

from cropmeta.experiments.splits import loocv_splits_by_year
from cropmeta.experiments.transfer import (
    DATA_DRIVEN,
    METAMODEL,
    TransferExperimentConfig,
    TransferResult,
    TransferRow,
    run_transfer_experiment,
)
from cropmeta.experiments.pseudoreal import (
    CROP_MODEL,
    DEFAULT_PSEUDO_LOCATION,
    DEFAULT_PSEUDO_N,
    DEFAULT_PSEUDO_SOIL_CODE,
    DEFAULT_PSEUDO_YEARS,
    LINEAR_REGRESSION,
    PSEUDO_DRY_MATTER_FRACTION,
    PSEUDO_MINERALIZATION_FACTOR,
    PSEUDO_NOISE_SIGMA,
    PSEUDO_RUE_FACTOR,
    PseudoRealResult,
    PseudoRealRow,
    PseudoSet,
    build_pseudo_observations,
    perturbed_sim_params,
    run_pseudo_real_experiment,
)
from cropmeta.experiments.reports import (
    svg_scatter,
    write_pseudo_real_csv,
    write_pseudo_real_json,
    write_transfer_csv,
    write_transfer_json,
)

__all__ = [
    "loocv_splits_by_year", "DATA_DRIVEN", "METAMODEL",
    "TransferExperimentConfig", "TransferResult", "TransferRow",
    "run_transfer_experiment", "CROP_MODEL", "DEFAULT_PSEUDO_LOCATION",
    "DEFAULT_PSEUDO_N", "DEFAULT_PSEUDO_SOIL_CODE", "DEFAULT_PSEUDO_YEARS",
    "LINEAR_REGRESSION", "PSEUDO_DRY_MATTER_FRACTION",
    "PSEUDO_MINERALIZATION_FACTOR", "PSEUDO_NOISE_SIGMA", "PSEUDO_RUE_FACTOR",
    "PseudoRealResult", "PseudoRealRow", "PseudoSet",
    "build_pseudo_observations", "perturbed_sim_params",
    "run_pseudo_real_experiment", "svg_scatter", "write_pseudo_real_csv",
    "write_pseudo_real_json", "write_transfer_csv", "write_transfer_json",
]
