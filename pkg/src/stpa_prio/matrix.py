"""Composition of requirement scores with UCA priorities on a 5x5 grid.

Both axes rescale dynamically to the dataset: the y axis divides each
UCA priority score by the dataset maximum, the x axis min-max normalises
the requirement score and inverts it so that the dark-red corner hosts
requirements that are both highly ranked (low RS) and tied to critical
UCAs. Cell criticality is the floored mean of the two scaled axes, which
produces the anti-diagonal green-to-dark-red gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .engine import SimulationOutcome
from .errors import EmptyInput, NonPositiveMax, OutOfRange
from .uca_priority import UCAPriorityResult

# Level 0 (green, low impact) to level 4 (dark red, highest impact).
COLOUR_RAMP = ("00FF00", "FFFF00", "FFA400", "FF5100", "C30000")

GRID_SIZE = 5


class RequirementPriority(Enum):
    """Final requirement priority label; ReqP1 is most critical."""

    REQ_P1 = 1
    REQ_P2 = 2
    REQ_P3 = 3
    REQ_P4 = 4
    REQ_P5 = 5

    @property
    def label(self) -> str:
        return f"ReqP{self.value}"

    @property
    def level(self) -> int:
        return 5 - self.value

    @classmethod
    def from_level(cls, level: int) -> "RequirementPriority":
        return cls(5 - level)

    @classmethod
    def from_label(cls, label: str) -> "RequirementPriority":
        for member in cls:
            if member.label == label:
                return member
        raise ValueError(f"unknown priority label {label!r}")


@dataclass(frozen=True)
class AxisBounds:
    """Dataset extents the grid scales against."""

    p_uca_max: float
    rs_min: float
    rs_max: float

    @classmethod
    def from_data(
        cls,
        outcomes: Sequence[SimulationOutcome],
        ucas_by_req: dict[str, UCAPriorityResult],
    ) -> "AxisBounds":
        if not outcomes:
            raise EmptyInput("cannot derive axis bounds from an empty outcome list")
        scores = [o.requirement_score for o in outcomes]
        return cls(
            p_uca_max=max(ucas_by_req[o.req_id].priority_score for o in outcomes),
            rs_min=min(scores),
            rs_max=max(scores),
        )


@dataclass(frozen=True)
class PriorityAssignment:
    """Grid placement and final label of one requirement."""

    req_id: str
    p_uca: float
    rs: float
    p_requirement: float
    x_cell: int
    y_cell: int
    level: int
    priority: RequirementPriority

    @property
    def label(self) -> str:
        return self.priority.label

    @property
    def colour(self) -> str:
        return COLOUR_RAMP[self.level]


@dataclass(frozen=True)
class PriorityMatrix:
    """5x5 grid of requirement IDs; cells[y][x], y=4 is most critical."""

    cells: tuple[tuple[tuple[str, ...], ...], ...]
    axis_max: tuple[float, float]
    colour_ramp: tuple[str, ...] = COLOUR_RAMP

    @staticmethod
    def cell_level(x: int, y: int) -> int:
        return (x + y) // 2

    def cell_colour(self, x: int, y: int) -> str:
        return self.colour_ramp[self.cell_level(x, y)]

    def total_ids(self) -> int:
        return sum(len(cell) for row in self.cells for cell in row)


def scale_to_grid(value: float, max_value: float) -> int:
    """Map value in [0, max_value] onto grid cell 0..4: floor((v/max)*4)."""
    if max_value <= 0:
        raise NonPositiveMax(f"axis maximum must be positive, got {max_value}")
    if value < 0 or value > max_value:
        raise OutOfRange(f"value {value} outside [0, {max_value}]")
    return int(math.floor((value / max_value) * (GRID_SIZE - 1)))


def assign_priority(
    outcome: SimulationOutcome,
    uca: UCAPriorityResult,
    bounds: AxisBounds,
) -> PriorityAssignment:
    """Place one requirement on the grid and derive its label and colour.

    The y cell scales the UCA priority score against the dataset maximum
    (an all-zero axis degenerates to the top cell, matching the
    everything-equal convention). The x cell min-max normalises the
    requirement score and inverts it: the lowest RS sits at x=4, the
    criticality end. A zero RS spread also degenerates to x=4.
    """
    p_uca = uca.priority_score
    rs = outcome.requirement_score
    if bounds.p_uca_max > 0:
        y_cell = scale_to_grid(p_uca, bounds.p_uca_max)
    else:
        y_cell = GRID_SIZE - 1
    rs_span = bounds.rs_max - bounds.rs_min
    if rs_span > 0:
        x_cell = (GRID_SIZE - 1) - scale_to_grid(rs - bounds.rs_min, rs_span)
    else:
        x_cell = GRID_SIZE - 1
    level = PriorityMatrix.cell_level(x_cell, y_cell)
    return PriorityAssignment(
        req_id=outcome.req_id,
        p_uca=p_uca,
        rs=rs,
        p_requirement=p_uca * rs,
        x_cell=x_cell,
        y_cell=y_cell,
        level=level,
        priority=RequirementPriority.from_level(level),
    )


def build_matrix(
    assignments: Sequence[PriorityAssignment],
    colour_ramp: tuple[str, ...] = COLOUR_RAMP,
) -> PriorityMatrix:
    """Collect assignments into the 5x5 grid, preserving input order."""
    if len(colour_ramp) != GRID_SIZE:
        raise ValueError(f"colour ramp must have {GRID_SIZE} entries")
    grid: list[list[list[str]]] = [
        [[] for _ in range(GRID_SIZE)] for _ in range(GRID_SIZE)
    ]
    for a in assignments:
        grid[a.y_cell][a.x_cell].append(a.req_id)
    axis_max = (
        max((a.p_uca for a in assignments), default=0.0),
        max((a.rs for a in assignments), default=0.0),
    )
    cells = tuple(tuple(tuple(cell) for cell in row) for row in grid)
    return PriorityMatrix(cells=cells, axis_max=axis_max, colour_ramp=tuple(colour_ramp))


def uca_grid(results: Sequence[UCAPriorityResult]) -> PriorityMatrix:
    """Place UCAs on the same 5-level grid: x = scaled SIF, y = scaled inverted EJ."""
    if not results:
        raise EmptyInput("cannot place an empty UCA list")
    max_sif = max(r.sif for r in results)
    max_inv = max(r.inverted_ej for r in results)
    grid: list[list[list[str]]] = [
        [[] for _ in range(GRID_SIZE)] for _ in range(GRID_SIZE)
    ]
    for r in results:
        x = scale_to_grid(r.sif, max_sif)
        y = scale_to_grid(r.inverted_ej, max_inv) if max_inv > 0 else GRID_SIZE - 1
        grid[y][x].append(r.uca_id)
    cells = tuple(tuple(tuple(cell) for cell in row) for row in grid)
    return PriorityMatrix(cells=cells, axis_max=(max_sif, max_inv))
