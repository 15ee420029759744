"""Simulation and statistical validation of the Ginibre determinantal point process."""

from .kernels import (
    BasisSubset,
    SpectrumProfile,
    conditioned_kernel,
    ginibre_kernel,
    radial_intensity,
    spectrum_profile,
    truncated_kernel,
)
from .pipelines import (
    ConditionedSampler,
    GinibreDiskSampler,
    sample_conditioned_truncated,
    sample_ginibre_on_disk,
    sample_matrix_batch,
)
from .records import RejectionDiagnostics, SampleSet
from .validation import ValidationReport, run_validation_suite

__version__ = "0.1.0"

__all__ = [
    "BasisSubset",
    "SpectrumProfile",
    "SampleSet",
    "RejectionDiagnostics",
    "ValidationReport",
    "ConditionedSampler",
    "GinibreDiskSampler",
    "conditioned_kernel",
    "ginibre_kernel",
    "radial_intensity",
    "spectrum_profile",
    "truncated_kernel",
    "sample_conditioned_truncated",
    "sample_ginibre_on_disk",
    "sample_matrix_batch",
    "run_validation_suite",
]
