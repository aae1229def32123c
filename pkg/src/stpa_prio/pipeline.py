"""End-to-end orchestration: dataset in, prioritised artifacts out.

The stages compose as: UCA scoring and banding, the P1/P2 pre-filter
(optional), Monte-Carlo requirement scoring, matrix placement, and
duplicate filtering. The CLI and tests both drive this module.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dataset import DatasetFile
from .engine import SimulationOutcome, rank_shift, simulate
from .errors import TooFewRequirements
from .filtering import FilteredRow, PrioritisedRow, filter_requirements
from .matrix import (
    AxisBounds,
    PriorityAssignment,
    PriorityMatrix,
    assign_priority,
    build_matrix,
)
from .model import AnalysisConfig
from .uca_priority import UCAPriorityResult, band_ucas, prefilter_p1_p2, score_ucas


@dataclass(frozen=True)
class PrioritisationResult:
    """Everything the full pipeline produces for one dataset/config pair."""

    uca_results: tuple[UCAPriorityResult, ...]
    retained_ucas: tuple[UCAPriorityResult, ...]
    outcomes: tuple[SimulationOutcome, ...]
    assignments: tuple[PriorityAssignment, ...]
    matrix: PriorityMatrix
    rows: tuple[FilteredRow, ...]

    def assignment_for(self, req_id: str) -> PriorityAssignment:
        for a in self.assignments:
            if a.req_id == req_id:
                return a
        raise KeyError(req_id)


def rank_ucas(dataset: DatasetFile) -> list[UCAPriorityResult]:
    """Score and band every UCA in the dataset."""
    return band_ucas(score_ucas(dataset.ucas))


def retained_requirements(dataset: DatasetFile, config: AnalysisConfig):
    """UCA results plus the requirement subset that survives the pre-filter."""
    banded = rank_ucas(dataset)
    retained = prefilter_p1_p2(banded, enabled=config.prefilter_bands)
    retained_ids = {u.uca_id for u in retained}
    requirements = [r for r in dataset.requirements if r.uca_id in retained_ids]
    return banded, retained, requirements


def run_simulation(dataset: DatasetFile, config: AnalysisConfig):
    """Simulate the retained requirement set; returns (requirements, outcomes)."""
    _, _, requirements = retained_requirements(dataset, config)
    if len(requirements) < 2:
        raise TooFewRequirements(
            f"only {len(requirements)} requirement(s) remain after the band pre-filter; "
            "need at least 2 (use the all-bands option for small datasets)"
        )
    return requirements, simulate(requirements, config)


def prioritise(dataset: DatasetFile, config: AnalysisConfig) -> PrioritisationResult:
    """Run the full pipeline and return all intermediate and final products."""
    banded, retained, requirements = retained_requirements(dataset, config)
    if len(requirements) < 2:
        raise TooFewRequirements(
            f"only {len(requirements)} requirement(s) remain after the band pre-filter; "
            "need at least 2 (use the all-bands option for small datasets)"
        )
    outcomes = simulate(requirements, config)

    uca_by_id = {u.uca_id: u for u in banded}
    uca_by_req = {r.req_id: uca_by_id[r.uca_id] for r in requirements}
    bounds = AxisBounds.from_data(outcomes, uca_by_req)
    assignments = tuple(
        assign_priority(o, uca_by_req[o.req_id], bounds) for o in outcomes
    )
    matrix = build_matrix(assignments)

    uca_records = dataset.uca_index()
    assignment_by_req = {a.req_id: a for a in assignments}
    prioritised_rows = [
        PrioritisedRow(
            req_id=r.req_id,
            uca_id=r.uca_id,
            uca_description=uca_records[r.uca_id].description,
            causal_factors=r.causal_factors,
            description=r.description,
            priority=assignment_by_req[r.req_id].priority,
        )
        for r in requirements
    ]
    rows = tuple(filter_requirements(prioritised_rows))

    return PrioritisationResult(
        uca_results=tuple(banded),
        retained_ucas=tuple(retained),
        outcomes=tuple(outcomes),
        assignments=assignments,
        matrix=matrix,
        rows=rows,
    )


def dual_run_shift(dataset: DatasetFile, config: AnalysisConfig, seed_b: int):
    """Two independent simulations of the same requirement set, compared."""
    requirements, outcomes_a = run_simulation(dataset, config)
    config_b = _with_seed(config, seed_b)
    outcomes_b = simulate(requirements, config_b)
    return rank_shift(outcomes_a, outcomes_b)


def _with_seed(config: AnalysisConfig, seed: int) -> AnalysisConfig:
    return replace(config, seed=seed)


def resolve_config(overrides: dict, **cli_values) -> AnalysisConfig:
    """Build an AnalysisConfig: defaults < dataset overrides < explicit CLI values."""
    merged = dict(overrides)
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value
    return AnalysisConfig(**merged)
