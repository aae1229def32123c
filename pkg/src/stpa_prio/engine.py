"""SAW scoring and the Monte-Carlo rank-stability simulation.

The four factor assessments are mapped onto [0, 1] desirabilities
(1 = most priority-raising), weighted, and summed into a SAW value.
The simulation re-draws the factors N times, re-ranks every iteration,
and condenses the rank ensemble into per-requirement statistics:

* mean rank (central tendency),
* rank sigma (population standard deviation, divide by N),
* requirement score = mean rank + sigma (lower = better),
* 95% CI upper bound = mean + z * sigma / sqrt(N).

All randomness is drawn up front from the configured seed, so the
element consumed for (iteration, requirement, factor) is fixed and the
outcome is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import EmptyInput, InvalidPerturbation, MismatchedSets, TooFewRequirements
from .model import AnalysisConfig, FactorAssessment, RequirementRecord

# Factor order used for desirability tuples, weights, and draw tensors.
FACTORS = ("type", "likelihood", "time", "cost")

# A final-rank shift of this many places between independent runs flags
# the requirement for data refinement.
RANK_SHIFT_FLAG_THRESHOLD = 5


@dataclass(frozen=True)
class SawScore:
    """Weighted-sum score of one assessment; higher value = higher priority."""

    req_id: str
    desirabilities: tuple[float, float, float, float]
    value: float


@dataclass(frozen=True, eq=False)
class SimulationOutcome:
    """Per-requirement rank statistics over all simulation iterations."""

    req_id: str
    ranks: np.ndarray
    mean_rank: float
    rank_sigma: float
    requirement_score: float
    ci_upper: float


@dataclass(frozen=True)
class SensitivityResult:
    """Rank movement when one factor is forced to a triangular bound.

    Ranks are fractional when ties occur.
    """

    req_id: str
    factor: str
    rank_at_mode: float
    rank_at_lower: float
    rank_at_upper: float

    @property
    def max_shift(self) -> float:
        return max(
            abs(self.rank_at_mode - self.rank_at_lower),
            abs(self.rank_at_mode - self.rank_at_upper),
        )


@dataclass(frozen=True)
class RankShiftEntry:
    """Final-rank comparison of one requirement across two runs."""

    req_id: str
    rank_a: int
    rank_b: int
    shift: int

    @property
    def flagged(self) -> bool:
        return self.shift >= RANK_SHIFT_FLAG_THRESHOLD


def desirability(assessment: FactorAssessment) -> tuple[float, float, float, float]:
    """Map an assessment to (type, likelihood, time, cost) desirabilities.

    Minor time, low cost, type A, and an uncovered regulatory gap each
    map to 1.0; the opposite extremes map to 0.0.
    """
    return (
        (assessment.mitigation_type.value - 1) / 4,
        float(assessment.covered_gap),
        (3 - assessment.time) / 2,
        (3 - assessment.cost) / 2,
    )


def saw(assessment: FactorAssessment, config: AnalysisConfig, req_id: str = "") -> SawScore:
    """Simple Additive Weighting score of one assessment."""
    d = desirability(assessment)
    value = sum(w * x for w, x in zip(config.weights, d))
    return SawScore(req_id=req_id, desirabilities=d, value=value)


def rank_once(scores: Sequence) -> np.ndarray:
    """Fractional ranks of SAW values, descending: the best value gets rank 1.

    Exact ties receive the average of the positions they span, so the
    ranks always sum to n(n+1)/2 exactly.
    """
    if len(scores) == 0:
        raise EmptyInput("cannot rank an empty score list")
    if isinstance(scores[0], SawScore):
        values = np.array([s.value for s in scores], dtype=float)
    else:
        values = np.asarray(scores, dtype=float)
    return rankdata(-values, method="average")


def triangular_from_uniform(u, a, c, b):
    """Inverse-CDF transform of uniform draws into Tri(a, c, b) samples.

    Accepts scalars or arrays (broadcast together). The degenerate
    triangle a = b returns a exactly, so point assessments survive
    triangular sampling unchanged.
    """
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    span = b - a
    safe_span = np.where(span > 0, span, 1.0)
    fc = (c - a) / safe_span
    with np.errstate(invalid="ignore"):
        left = a + np.sqrt(u * safe_span * (c - a))
        right = b - np.sqrt((1.0 - u) * safe_span * (b - c))
    out = np.where(u < fc, left, right)
    out = np.where(span > 0, out, a)
    if out.ndim == 0:
        return float(out)
    return out


def sample_triangular(a: float, c: float, b: float, size: int, seed: int) -> np.ndarray:
    """Draw ``size`` samples from Tri(a, c, b) with a fixed seed."""
    u = np.random.default_rng(seed).random(size)
    return np.atleast_1d(triangular_from_uniform(u, a, c, b))


def outcome_from_ranks(req_id: str, ranks, ci_z: float = 1.96) -> SimulationOutcome:
    """Condense one requirement's per-iteration ranks into its statistics."""
    arr = np.asarray(ranks, dtype=float)
    n = arr.size
    mean = float(arr.mean())
    sigma = math.sqrt(float(np.mean((arr - mean) ** 2)))
    return SimulationOutcome(
        req_id=req_id,
        ranks=arr,
        mean_rank=mean,
        rank_sigma=sigma,
        requirement_score=mean + sigma,
        ci_upper=mean + ci_z * sigma / math.sqrt(n),
    )


def simulate(
    requirements: Sequence[RequirementRecord], config: AnalysisConfig
) -> list[SimulationOutcome]:
    """Run the N-iteration Monte-Carlo rank-stability simulation.

    Per iteration the factor desirabilities are re-drawn according to
    ``config.sampling_mode``:

    * ``uniform-pct``: each modal desirability is multiplied by an
      independent uniform draw in [1-p, 1+p] and clamped to [0, 1];
    * ``triangular``: each ordinal factor is drawn from its Tri(a, c, b)
      triple and mapped to a desirability;
    * ``combined``: triangular draw first, then the +/-p noise.

    SAW values are recomputed, ranked with average-tie ranks, and the
    rank ensemble is condensed per requirement.
    """
    n = len(requirements)
    if n < 2:
        raise TooFewRequirements(f"simulation needs at least 2 requirements, got {n}")
    p = config.perturbation
    if not 0 <= p < 1:
        raise InvalidPerturbation(f"perturbation must satisfy 0 <= p < 1, got {p}")

    iterations = config.iterations
    weights = np.asarray(config.weights, dtype=float)
    modal = np.array([desirability(r.assessment) for r in requirements])

    rng = np.random.default_rng(config.seed)
    draws = rng.random((iterations, n, len(FACTORS)))
    noise_draws = None
    if config.sampling_mode == "combined":
        noise_draws = rng.random((iterations, n, len(FACTORS)))

    tri_params = None
    if config.sampling_mode in ("triangular", "combined"):
        tri_params = _triangle_arrays(requirements)

    ranks = np.empty((iterations, n), dtype=float)

    def run_chunk(start: int, stop: int) -> None:
        chunk = slice(start, stop)
        if config.sampling_mode == "uniform-pct":
            noise = 1.0 - p + 2.0 * p * draws[chunk]
            desir = np.clip(modal[None, :, :] * noise, 0.0, 1.0)
        else:
            a, c, b = tri_params
            ordinals = triangular_from_uniform(draws[chunk], a, c, b)
            desir = np.clip(_ordinal_to_desirability(ordinals), 0.0, 1.0)
            if config.sampling_mode == "combined":
                noise = 1.0 - p + 2.0 * p * noise_draws[chunk]
                desir = np.clip(desir * noise, 0.0, 1.0)
        values = (desir * weights).sum(axis=-1)
        ranks[chunk] = rankdata(-values, method="average", axis=1)

    bounds = np.linspace(0, iterations, config.workers + 1).astype(int)
    spans = [(bounds[i], bounds[i + 1]) for i in range(config.workers) if bounds[i] < bounds[i + 1]]
    if len(spans) <= 1:
        run_chunk(0, iterations)
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            for future in [pool.submit(run_chunk, lo, hi) for lo, hi in spans]:
                future.result()

    return [
        outcome_from_ranks(req.req_id, ranks[:, j], config.ci_z)
        for j, req in enumerate(requirements)
    ]


def _triangle_arrays(requirements: Sequence[RequirementRecord]):
    """Stack per-requirement (a, c, b) triples into (n, 4) arrays."""
    a = np.empty((len(requirements), len(FACTORS)))
    c = np.empty_like(a)
    b = np.empty_like(a)
    for j, req in enumerate(requirements):
        for f, factor in enumerate(FACTORS):
            a[j, f], c[j, f], b[j, f] = req.assessment.triangle(factor)
    return a, c, b


def _ordinal_to_desirability(ordinals: np.ndarray) -> np.ndarray:
    """Apply the per-factor affine maps to ordinal-scale values.

    Factor axis order follows FACTORS: type (t-1)/4, likelihood identity,
    time (3-t)/2, cost (3-c)/2.
    """
    out = np.empty_like(ordinals)
    out[..., 0] = (ordinals[..., 0] - 1.0) / 4.0
    out[..., 1] = ordinals[..., 1]
    out[..., 2] = (3.0 - ordinals[..., 2]) / 2.0
    out[..., 3] = (3.0 - ordinals[..., 3]) / 2.0
    return out


def sensitivity_oat(
    requirements: Sequence[RequirementRecord], config: AnalysisConfig
) -> list[SensitivityResult]:
    """One-at-a-time sensitivity: force each factor to its bounds in turn.

    All factors sit at their modal values; then, for every requirement
    and factor, the factor is moved to its lower and upper triangular
    bound, the full ranking is recomputed, and the requirement's rank
    movement recorded. A large max_shift reveals a high-influence factor.
    """
    if not requirements:
        return []
    weights = np.asarray(config.weights, dtype=float)
    modal = np.array([desirability(r.assessment) for r in requirements])
    base_values = (modal * weights).sum(axis=-1)
    base_ranks = rank_once(base_values) if len(requirements) > 1 else np.ones(1)

    results = []
    for j, req in enumerate(requirements):
        for f, factor in enumerate(FACTORS):
            a, _, b = req.assessment.triangle(factor)
            rank_bounds = []
            for bound in (a, b):
                values = base_values.copy()
                delta = _scalar_desirability(factor, bound) - modal[j, f]
                values[j] = base_values[j] + weights[f] * delta
                ranks = rank_once(values) if len(requirements) > 1 else np.ones(1)
                rank_bounds.append(float(ranks[j]))
            results.append(
                SensitivityResult(
                    req_id=req.req_id,
                    factor=factor,
                    rank_at_mode=float(base_ranks[j]),
                    rank_at_lower=rank_bounds[0],
                    rank_at_upper=rank_bounds[1],
                )
            )
    return results


def _scalar_desirability(factor: str, ordinal: float) -> float:
    if factor == "type":
        return (ordinal - 1.0) / 4.0
    if factor == "likelihood":
        return float(ordinal)
    return (3.0 - ordinal) / 2.0


def final_ranking(outcomes: Sequence[SimulationOutcome]) -> dict[str, int]:
    """Final priority order: requirement score ascending, ties by req_id."""
    ordered = sorted(outcomes, key=lambda o: (o.requirement_score, o.req_id))
    return {o.req_id: position for position, o in enumerate(ordered, start=1)}


def rank_shift(
    run_a: Sequence[SimulationOutcome], run_b: Sequence[SimulationOutcome]
) -> list[RankShiftEntry]:
    """Compare final ranks between two independent simulation runs."""
    ids_a = {o.req_id for o in run_a}
    ids_b = {o.req_id for o in run_b}
    if ids_a != ids_b:
        missing = sorted(ids_a ^ ids_b)
        raise MismatchedSets(f"runs cover different requirement sets: {missing}")
    ranks_a = final_ranking(run_a)
    ranks_b = final_ranking(run_b)
    entries = [
        RankShiftEntry(
            req_id=req_id,
            rank_a=ranks_a[req_id],
            rank_b=ranks_b[req_id],
            shift=abs(ranks_a[req_id] - ranks_b[req_id]),
        )
        for req_id in ids_a
    ]
    entries.sort(key=lambda e: (e.rank_a, e.req_id))
    return entries
