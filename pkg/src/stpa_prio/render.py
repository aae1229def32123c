"""SVG rendering of the prioritisation matrix and the rank-shift diagram.

The SVG is assembled by hand so that identical inputs always produce
identical bytes; all coordinates use fixed-precision formatting.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .engine import RANK_SHIFT_FLAG_THRESHOLD, RankShiftEntry
from .errors import EmptyInput, IoError
from .matrix import GRID_SIZE, PriorityMatrix

# Line colours of the shift diagram carry no analytic meaning; this is
# the familiar default ten-colour plotting cycle.
LINE_CYCLE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

X_AXIS_LABELS = ("RS1", "RS2", "RS3", "RS4", "RS5")
Y_AXIS_LABELS = ("UCA_P5", "UCA_P4", "UCA_P3", "UCA_P2", "UCA_P1")

_CELL_W = 180
_CELL_H = 100
_MARGIN_LEFT = 80
_MARGIN_TOP = 50
_MARGIN_BOTTOM = 45
_BAR_GAP = 30
_BAR_W = 28
_MAX_IDS_PER_CELL = 6


def emit_matrix(
    matrix: PriorityMatrix,
    path: str | Path,
    title: str = "Requirement Prioritisation Matrix",
    x_labels: Sequence[str] = X_AXIS_LABELS,
    y_labels: Sequence[str] = Y_AXIS_LABELS,
) -> Path:
    """Render the 5x5 grid with IDs in cells and a 0-4 criticality bar."""
    width = _MARGIN_LEFT + GRID_SIZE * _CELL_W + _BAR_GAP + _BAR_W + 60
    height = _MARGIN_TOP + GRID_SIZE * _CELL_H + _MARGIN_BOTTOM
    parts = [_svg_open(width, height)]
    parts.append(_text(width / 2, 28, escape(title), size=16, anchor="middle", bold=True))

    for y in range(GRID_SIZE - 1, -1, -1):
        top = _MARGIN_TOP + (GRID_SIZE - 1 - y) * _CELL_H
        for x in range(GRID_SIZE):
            left = _MARGIN_LEFT + x * _CELL_W
            colour = matrix.cell_colour(x, y)
            parts.append(
                f'<rect x="{left}" y="{top}" width="{_CELL_W}" height="{_CELL_H}" '
                f'fill="#{colour}" fill-opacity="0.85" stroke="#333333" stroke-width="1"/>'
            )
            parts.extend(_cell_ids(matrix.cells[y][x], left, top))
        parts.append(_text(
            _MARGIN_LEFT - 8, top + _CELL_H / 2 + 4,
            escape(y_labels[y]), size=12, anchor="end",
        ))

    for x in range(GRID_SIZE):
        cx = _MARGIN_LEFT + x * _CELL_W + _CELL_W / 2
        parts.append(_text(cx, height - _MARGIN_BOTTOM + 20, escape(x_labels[x]),
                           size=12, anchor="middle"))

    parts.extend(_colour_bar(matrix, _MARGIN_LEFT + GRID_SIZE * _CELL_W + _BAR_GAP, _MARGIN_TOP))
    parts.append("</svg>")
    return _write(path, parts)


def _cell_ids(ids: Sequence[str], left: float, top: float) -> list[str]:
    lines = list(ids[:_MAX_IDS_PER_CELL])
    overflow = len(ids) - len(lines)
    if overflow > 0:
        lines.append(f"+{overflow} more")
    out = []
    for i, label in enumerate(lines):
        out.append(_text(left + 6, top + 16 + i * 13, escape(label), size=10))
    return out


def _colour_bar(matrix: PriorityMatrix, left: float, top: float) -> list[str]:
    swatch_h = GRID_SIZE * _CELL_H / 5
    parts = [_text(left + _BAR_W / 2, top - 10, "Level", size=11, anchor="middle")]
    for level in range(4, -1, -1):
        y = top + (4 - level) * swatch_h
        parts.append(
            f'<rect x="{left}" y="{_fmt(y)}" width="{_BAR_W}" height="{_fmt(swatch_h)}" '
            f'fill="#{matrix.colour_ramp[level]}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(_text(left + _BAR_W + 8, y + swatch_h / 2 + 4, str(level), size=11))
    return parts


def emit_rank_shift(shifts: Sequence[RankShiftEntry], path: str | Path) -> Path:
    """Render rank movements between two runs as vertical segments.

    Zero-length segments are drawn as dots; requirements moving at least
    five places are flagged with a dashed stroke and a warning ring.
    """
    if not shifts:
        raise EmptyInput("cannot render an empty shift list")
    n = len(shifts)
    max_rank = max(max(e.rank_a, e.rank_b) for e in shifts)
    dx = max(34, min(90, 1100 // n))
    left, top = 70, 50
    plot_h = max(260, min(620, 24 * max_rank))
    width = left + n * dx + 40
    height = top + plot_h + 130

    def rank_y(rank: float) -> float:
        if max_rank == 1:
            return top + plot_h / 2
        return top + (rank - 1) / (max_rank - 1) * plot_h

    parts = [_svg_open(width, height)]
    parts.append(_text(width / 2, 24, "Rank shift between two independent simulations",
                       size=14, anchor="middle", bold=True))

    step = max(1, (max_rank + 14) // 15)
    for rank in range(1, max_rank + 1, step):
        y = rank_y(rank)
        parts.append(
            f'<line x1="{left - 6}" y1="{_fmt(y)}" x2="{_fmt(left + n * dx)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(_text(left - 10, y + 4, str(rank), size=10, anchor="end"))

    for i, entry in enumerate(shifts):
        x = left + i * dx + dx / 2
        colour = LINE_CYCLE[i % len(LINE_CYCLE)]
        y_a, y_b = rank_y(entry.rank_a), rank_y(entry.rank_b)
        if entry.shift == 0:
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y_a)}" r="4" fill="{colour}"/>')
        else:
            dash = ' stroke-dasharray="5,3"' if entry.flagged else ""
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(y_a)}" x2="{_fmt(x)}" y2="{_fmt(y_b)}" '
                f'stroke="{colour}" stroke-width="3" stroke-linecap="round"{dash}/>'
            )
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y_b)}" r="3.5" fill="{colour}"/>')
        if entry.flagged:
            mid = (y_a + y_b) / 2
            parts.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(mid)}" r="9" fill="none" '
                f'stroke="#c30000" stroke-width="2"/>'
            )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(top + plot_h + 16)}" font-size="9" '
            f'font-family="sans-serif" text-anchor="end" '
            f'transform="rotate(-45 {_fmt(x)} {_fmt(top + plot_h + 16)})">'
            f"{escape(entry.req_id)}</text>"
        )

    flagged = sum(1 for e in shifts if e.flagged)
    parts.append(_text(
        left, height - 14,
        f"{flagged} requirement(s) shifted by {RANK_SHIFT_FLAG_THRESHOLD}+ places "
        "(dashed, ringed); colours are cosmetic only",
        size=11,
    ))
    parts.append("</svg>")
    return _write(path, parts)


def _svg_open(width: float, height: float) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )


def _text(x: float, y: float, content: str, size: int = 11, anchor: str = "start",
          bold: bool = False) -> str:
    weight = ' font-weight="bold"' if bold else ""
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}"{weight}>{content}</text>'
    )


def _fmt(value: float) -> str:
    text = f"{value:.2f}"
    return text.rstrip("0").rstrip(".") if "." in text else text


def _write(path: str | Path, parts: list[str]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write SVG to {path}: {exc}") from exc
    return path
