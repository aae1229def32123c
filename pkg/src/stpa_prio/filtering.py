"""Deduplication of requirements that share identical mitigation text.

Duplicates arise because the same mitigation can be derived from
different causal factors and UCAs. Rows are grouped by normalised
description (exact match after normalisation, never fuzzy similarity,
so distinct obligations are never silently merged). Each group collapses
into one row that unions the causal factors and UCA links, keeps every
merged requirement ID for traceability, and resolves conflicting
priorities to the most critical label while surfacing the conflict.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import EmptyDescription, MissingPriority
from .matrix import COLOUR_RAMP, RequirementPriority

_WHITESPACE_RE = re.compile(r"\s+")
_TERMINAL_PUNCT = ".!?;:,…"


@dataclass(frozen=True)
class PrioritisedRow:
    """One requirement after prioritisation, ready for filtering."""

    req_id: str
    uca_id: str
    uca_description: str
    causal_factors: tuple[str, ...]
    description: str
    priority: RequirementPriority | None


@dataclass(frozen=True)
class FilteredRow:
    """A deduplicated report row; one per distinct normalised description."""

    canonical_req_id: str
    merged_req_ids: tuple[str, ...]
    uca_descriptions: tuple[str, ...]
    causal_factors: tuple[str, ...]
    description: str
    priority: RequirementPriority
    conflict_note: tuple[RequirementPriority, ...] | None = None

    @property
    def colour(self) -> str:
        return COLOUR_RAMP[self.priority.level]


def normalise_text(description: str) -> str:
    """Deduplication key: case-folded, whitespace-collapsed, terminal punctuation stripped."""
    if not description or not description.strip():
        raise EmptyDescription("requirement description is empty")
    collapsed = _WHITESPACE_RE.sub(" ", description.strip()).casefold()
    return collapsed.rstrip(_TERMINAL_PUNCT + " ")


def filter_requirements(
    rows: Sequence[Union[PrioritisedRow, FilteredRow]],
) -> list[FilteredRow]:
    """Merge rows with identical normalised descriptions.

    Output rows are ordered by descending criticality, then canonical
    requirement ID. Filtering an already-filtered list is the identity,
    and the merged IDs across all output rows are exactly the input IDs.
    """
    groups: dict[str, list[Union[PrioritisedRow, FilteredRow]]] = {}
    for row in rows:
        if row.priority is None:
            row_id = getattr(row, "req_id", None) or getattr(row, "canonical_req_id", "?")
            raise MissingPriority(f"row {row_id} has no priority label")
        groups.setdefault(normalise_text(row.description), []).append(row)

    merged_rows = [_merge_group(members) for members in groups.values()]
    merged_rows.sort(key=lambda r: (r.priority.value, r.canonical_req_id))
    return merged_rows


def _merge_group(members: Sequence[Union[PrioritisedRow, FilteredRow]]) -> FilteredRow:
    merged_ids: list[str] = []
    uca_descriptions: list[str] = []
    causal_factors: list[str] = []
    labels: set[RequirementPriority] = set()
    descriptions: dict[str, str] = {}

    for member in members:
        labels.add(member.priority)
        if isinstance(member, FilteredRow):
            merged_ids.extend(member.merged_req_ids)
            for rid in member.merged_req_ids:
                descriptions[rid] = member.description
            new_descs = member.uca_descriptions
            if member.conflict_note:
                labels.update(member.conflict_note)
        else:
            merged_ids.append(member.req_id)
            descriptions[member.req_id] = member.description
            new_descs = (member.uca_description,) if member.uca_description else ()
        for desc in new_descs:
            if desc not in uca_descriptions:
                uca_descriptions.append(desc)
        for factor in member.causal_factors:
            if factor not in causal_factors:
                causal_factors.append(factor)

    canonical = min(merged_ids)
    distinct = sorted(labels, key=lambda p: p.value)
    return FilteredRow(
        canonical_req_id=canonical,
        merged_req_ids=tuple(merged_ids),
        uca_descriptions=tuple(uca_descriptions),
        causal_factors=tuple(causal_factors),
        description=descriptions[canonical],
        priority=distinct[0],
        conflict_note=tuple(distinct) if len(distinct) > 1 else None,
    )
