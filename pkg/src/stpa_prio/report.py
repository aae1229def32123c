"""Report emitters: the colour-coded filtered table and machine-readable results.

The filtered report is a delimited table with an explicit Colour column
rather than a binary workbook: bit-exact, diffable, and sufficient for a
spreadsheet import to colour the cells. The structured-records export
carries the same fields plus the merged requirement IDs and the
per-requirement score details for machine consumers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from .engine import SimulationOutcome
from .errors import EmptyInput, IoError
from .filtering import FilteredRow
from .matrix import PriorityAssignment

REPORT_HEADER = ("Req ID", "UCA Description", "Causal Factor(s)", "Req Description",
                 "Priority", "Colour")


def emit_report(rows: Sequence[FilteredRow], path: str | Path) -> Path:
    """Write the filtered requirement report as a UTF-8 CSV table."""
    if not rows:
        raise EmptyInput("cannot emit an empty report")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_HEADER)
            for row in rows:
                writer.writerow([
                    row.canonical_req_id,
                    "; ".join(row.uca_descriptions),
                    "; ".join(row.causal_factors),
                    row.description,
                    row.priority.label,
                    row.colour,
                ])
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from exc
    return path


def emit_results(
    rows: Sequence[FilteredRow],
    assignments: Sequence[PriorityAssignment],
    outcomes: Sequence[SimulationOutcome],
    path: str | Path,
) -> Path:
    """Write the structured-records results file (JSON)."""
    if not rows:
        raise EmptyInput("cannot emit empty results")
    by_req_assignment = {a.req_id: a for a in assignments}
    by_req_outcome = {o.req_id: o for o in outcomes}

    payload = []
    for row in rows:
        members = []
        for req_id in row.merged_req_ids:
            a = by_req_assignment[req_id]
            o = by_req_outcome[req_id]
            members.append({
                "req_id": req_id,
                "p_uca": a.p_uca,
                "mean_rank": o.mean_rank,
                "rank_sigma": o.rank_sigma,
                "requirement_score": o.requirement_score,
                "ci_upper": o.ci_upper,
                "p_requirement": a.p_requirement,
                "x_cell": a.x_cell,
                "y_cell": a.y_cell,
                "level": a.level,
                "priority": a.label,
            })
        payload.append({
            "req_id": row.canonical_req_id,
            "merged_req_ids": list(row.merged_req_ids),
            "uca_descriptions": list(row.uca_descriptions),
            "causal_factors": list(row.causal_factors),
            "description": row.description,
            "priority": row.priority.label,
            "colour": row.colour,
            "priority_conflict": [p.label for p in row.conflict_note] if row.conflict_note else None,
            "members": members,
        })

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps({"rows": payload}, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise IoError(f"cannot write results to {path}: {exc}") from exc
    return path
