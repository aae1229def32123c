"""UCA priority scoring, quintile banding, and the P1/P2 pre-filter.

A UCA's priority score is its severity-impact factor multiplied by the
inverted expert-judgement score. Lower EJ means more critical, and the
inversion clamps at the ceiling (EJ >= 100 scores zero). Scores are then
split into five quantile bands, UCA_P1 holding the highest scores, and
only P1/P2 UCAs proceed to requirement analysis unless the pre-filter is
disabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .errors import EmptyInput, NegativeEJ, NonPositiveSIF
from .model import UCARecord

# EJ scores at or above this ceiling invert to zero weight.
EJ_INVERSION_CEILING = 100.0


class UCABand(Enum):
    """Quintile band of a UCA priority score; P1 is most critical."""

    UCA_P1 = 1
    UCA_P2 = 2
    UCA_P3 = 3
    UCA_P4 = 4
    UCA_P5 = 5


@dataclass(frozen=True)
class UCAPriorityResult:
    uca_id: str
    sif: float
    ej: float
    inverted_ej: float
    priority_score: float
    band: UCABand | None = None


def invert_ej(ej: float) -> float:
    """Invert an expert-judgement score into a [0, 1] criticality weight.

    Returns max(0, 1 - ej/ceiling): EJ 0 keeps full weight, EJ at or
    beyond the ceiling contributes nothing. Monotone non-increasing.
    """
    if ej < 0:
        raise NegativeEJ(f"ej must be non-negative, got {ej}")
    return max(0.0, 1.0 - ej / EJ_INVERSION_CEILING)


def uca_priority_score(sif: float, ej: float) -> float:
    """Priority score of a UCA: sif * inverted EJ."""
    if sif <= 0:
        raise NonPositiveSIF(f"sif must be positive, got {sif}")
    return sif * invert_ej(ej)


def score_ucas(ucas: Iterable[UCARecord]) -> list[UCAPriorityResult]:
    """Score every UCA; bands are not assigned yet."""
    results = []
    for uca in ucas:
        inv = invert_ej(uca.ej)
        results.append(
            UCAPriorityResult(
                uca_id=uca.uca_id,
                sif=uca.sif,
                ej=uca.ej,
                inverted_ej=inv,
                priority_score=uca_priority_score(uca.sif, uca.ej),
            )
        )
    return results


def band_ucas(scores: Sequence[UCAPriorityResult]) -> list[UCAPriorityResult]:
    """Assign quintile bands UCA_P1..UCA_P5 by descending priority score.

    Band cut-points are the 20/40/60/80th nearest-rank percentiles of the
    distinct score values, so equal scores always share a band and a
    degenerate distribution (one distinct value) collapses into UCA_P1.
    Input order is preserved.
    """
    if not scores:
        raise EmptyInput("cannot band an empty score list")
    cuts = _quantile_cuts([r.priority_score for r in scores])
    return [replace(r, band=_band_for(r.priority_score, cuts)) for r in scores]


def _quantile_cuts(values: Sequence[float]) -> tuple[float, float, float, float]:
    """Nearest-rank 80/60/40/20th percentile cut values over distinct scores."""
    distinct = sorted(set(values))
    m = len(distinct)

    def cut(q: float) -> float:
        return distinct[math.ceil(q * m) - 1]

    return cut(0.8), cut(0.6), cut(0.4), cut(0.2)


def _band_for(score: float, cuts: tuple[float, float, float, float]) -> UCABand:
    t80, t60, t40, t20 = cuts
    if score >= t80:
        return UCABand.UCA_P1
    if score >= t60:
        return UCABand.UCA_P2
    if score >= t40:
        return UCABand.UCA_P3
    if score >= t20:
        return UCABand.UCA_P4
    return UCABand.UCA_P5


def prefilter_p1_p2(
    ucas: Sequence[UCAPriorityResult], enabled: bool = True
) -> list[UCAPriorityResult]:
    """Keep only UCAs banded P1 or P2, preserving order.

    With ``enabled=False`` all bands pass through (the "analyse all
    bands" configuration).
    """
    if not enabled:
        return list(ucas)
    return [u for u in ucas if u.band in (UCABand.UCA_P1, UCABand.UCA_P2)]
