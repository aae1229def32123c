"""Deterministic prioritisation toolchain for STPA-derived safety requirements.

Scores requirements from SME factor assessments via Simple Additive
Weighting, stabilises the ranking with a seeded Monte-Carlo simulation,
composes requirement scores with UCA priorities on a dynamically scaled
5x5 matrix, and deduplicates requirements with full traceability.
"""

from .dataset import DatasetFile, load_dataset, save_dataset
from .engine import (
    RankShiftEntry,
    SawScore,
    SensitivityResult,
    SimulationOutcome,
    desirability,
    rank_once,
    rank_shift,
    sample_triangular,
    saw,
    sensitivity_oat,
    simulate,
    triangular_from_uniform,
)
from .errors import StpaPrioError
from .filtering import FilteredRow, PrioritisedRow, filter_requirements, normalise_text
from .matrix import (
    COLOUR_RAMP,
    AxisBounds,
    PriorityAssignment,
    PriorityMatrix,
    RequirementPriority,
    assign_priority,
    build_matrix,
    scale_to_grid,
)
from .model import (
    AnalysisConfig,
    FactorAssessment,
    MitigationType,
    Phase,
    RequirementRecord,
    UCARecord,
    parse_req_id,
)
from .pipeline import PrioritisationResult, prioritise
from .report import emit_report, emit_results
from .render import emit_matrix, emit_rank_shift
from .uca_priority import (
    EJ_INVERSION_CEILING,
    UCABand,
    UCAPriorityResult,
    band_ucas,
    invert_ej,
    prefilter_p1_p2,
    score_ucas,
    uca_priority_score,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AxisBounds",
    "COLOUR_RAMP",
    "DatasetFile",
    "EJ_INVERSION_CEILING",
    "FactorAssessment",
    "FilteredRow",
    "MitigationType",
    "Phase",
    "PrioritisationResult",
    "PrioritisedRow",
    "PriorityAssignment",
    "PriorityMatrix",
    "RankShiftEntry",
    "RequirementPriority",
    "RequirementRecord",
    "SawScore",
    "SensitivityResult",
    "SimulationOutcome",
    "StpaPrioError",
    "UCABand",
    "UCAPriorityResult",
    "UCARecord",
    "assign_priority",
    "band_ucas",
    "build_matrix",
    "desirability",
    "emit_matrix",
    "emit_rank_shift",
    "emit_report",
    "emit_results",
    "filter_requirements",
    "invert_ej",
    "load_dataset",
    "normalise_text",
    "parse_req_id",
    "prefilter_p1_p2",
    "prioritise",
    "rank_once",
    "rank_shift",
    "sample_triangular",
    "save_dataset",
    "saw",
    "scale_to_grid",
    "score_ucas",
    "sensitivity_oat",
    "simulate",
    "triangular_from_uniform",
    "uca_priority_score",
]
