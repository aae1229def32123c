import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stpa_prio.engine import outcome_from_ranks
from stpa_prio.errors import NonPositiveMax, OutOfRange
from stpa_prio.matrix import (
    COLOUR_RAMP,
    AxisBounds,
    PriorityMatrix,
    RequirementPriority,
    assign_priority,
    build_matrix,
    scale_to_grid,
    uca_grid,
)
from stpa_prio.uca_priority import UCAPriorityResult


def uca(uca_id: str, score: float, sif: float = 10.0, inv: float = 0.5) -> UCAPriorityResult:
    return UCAPriorityResult(uca_id, sif, 0.0, inv, score)


def outcome(req_id: str, rs: float):
    return outcome_from_ranks(req_id, [rs])


def place(rows):
    """rows: list of (req_id, p_uca, rs) -> dict req_id -> PriorityAssignment."""
    outcomes = [outcome(r, rs) for r, _, rs in rows]
    ucas_by_req = {r: uca(f"u-{r}", p) for r, p, _ in rows}
    bounds = AxisBounds.from_data(outcomes, ucas_by_req)
    return {
        o.req_id: assign_priority(o, ucas_by_req[o.req_id], bounds) for o in outcomes
    }


class TestScaleToGrid:
    def test_top_of_scale(self):
        assert scale_to_grid(148.89, 148.89) == 4

    def test_zero(self):
        assert scale_to_grid(0.0, 123.4) == 0

    def test_published_value_pair(self):
        assert scale_to_grid(42.12, 148.89) == 1  # floor(1.1317)

    def test_nonpositive_max(self):
        with pytest.raises(NonPositiveMax):
            scale_to_grid(1.0, 0.0)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            scale_to_grid(2.0, 1.0)
        with pytest.raises(OutOfRange):
            scale_to_grid(-0.1, 1.0)

    @given(st.floats(0.001, 1e6), st.integers(0, 1000))
    def test_matches_brute_force_cell_search(self, max_value, i):
        value = (i / 1000) * max_value
        value = min(value, max_value)
        ratio4 = (value / max_value) * 4
        oracle = max(k for k in range(5) if ratio4 >= k)
        assert scale_to_grid(value, max_value) == oracle

    def test_cell_boundaries(self):
        for max_value in (1.0, 7.3, 148.89):
            for k in range(1, 5):
                boundary = k * max_value / 4
                if boundary <= max_value:
                    got = scale_to_grid(boundary, max_value)
                    expected = math.floor((boundary / max_value) * 4)
                    assert got == expected


class TestRequirementPriority:
    def test_level_label_mapping(self):
        assert RequirementPriority.from_level(4).label == "ReqP1"
        assert RequirementPriority.from_level(0).label == "ReqP5"
        assert RequirementPriority.REQ_P2.level == 3

    def test_colour_ramp_orientation(self):
        assert COLOUR_RAMP[0] == "00FF00"
        assert COLOUR_RAMP[4] == "C30000"
        assert len(COLOUR_RAMP) == 5

    def test_from_label(self):
        assert RequirementPriority.from_label("ReqP3") is RequirementPriority.REQ_P3
        with pytest.raises(ValueError):
            RequirementPriority.from_label("P3")


class TestAssignPriority:
    def test_best_requirement_lands_dark_red(self):
        placed = place([("best", 148.89, 2.0), ("mid", 42.12, 8.0), ("low", 0.0, 14.0)])
        best = placed["best"]
        assert (best.x_cell, best.y_cell, best.level) == (4, 4, 4)
        assert best.label == "ReqP1"
        assert best.colour == "C30000"

    def test_zero_priority_high_rs_lands_green(self):
        placed = place([("best", 148.89, 2.0), ("worst", 0.0, 14.0)])
        worst = placed["worst"]
        assert (worst.x_cell, worst.y_cell, worst.level) == (0, 0, 0)
        assert worst.label == "ReqP5"
        assert worst.colour == "00FF00"

    def test_single_requirement_degenerates_to_top_cell(self):
        placed = place([("only", 5.0, 3.0)])
        only = placed["only"]
        assert (only.x_cell, only.y_cell) == (4, 4)
        assert only.label == "ReqP1"

    def test_all_zero_priority_scores_degenerate_to_top_row(self):
        placed = place([("a", 0.0, 1.0), ("b", 0.0, 2.0)])
        assert placed["a"].y_cell == 4
        assert placed["b"].y_cell == 4

    def test_p_requirement_is_the_literal_product(self):
        placed = place([("a", 10.0, 3.0), ("b", 5.0, 4.0)])
        assert placed["a"].p_requirement == 30.0
        assert placed["b"].p_requirement == 20.0

    @given(
        rows=st.lists(
            st.tuples(st.floats(0, 100), st.floats(1, 50)),
            min_size=1, max_size=20,
        ),
        k=st.floats(0.01, 100),
        m=st.floats(0.01, 100),
    )
    def test_argmax_invariance_under_rescaling(self, rows, k, m):
        base_rows = [(f"r{i}", round(p, 3), round(rs, 3)) for i, (p, rs) in enumerate(rows)]
        scaled_rows = [(rid, k * p, m * rs) for rid, p, rs in base_rows]
        base = place(base_rows)
        scaled = place(scaled_rows)
        for rid in base:
            assert (base[rid].x_cell, base[rid].y_cell) == (
                scaled[rid].x_cell, scaled[rid].y_cell,
            )

    def test_dynamic_rescaling_after_removing_the_maximum(self):
        rows = [("a", 100.0, 2.0), ("b", 50.0, 3.0), ("c", 25.0, 4.0)]
        with_max = place(rows)
        assert with_max["a"].y_cell == 4
        without_max = place(rows[1:])
        assert without_max["b"].y_cell == 4  # axis re-expands

    @given(
        p=st.floats(0, 100), boost=st.floats(0, 100),
        others=st.lists(st.floats(0, 100), min_size=1, max_size=10),
    )
    def test_y_cell_monotone_in_p_uca(self, p, boost, others):
        rows = [("probe", p, 5.0)] + [
            (f"o{i}", q, 5.0 + i) for i, q in enumerate(others)
        ]
        boosted = [("probe", p + boost, 5.0)] + rows[1:]
        before = place(rows)["probe"].y_cell
        after = place(boosted)["probe"].y_cell
        assert after >= before


class TestBuildMatrix:
    def test_every_requirement_in_exactly_one_cell(self):
        rows = [(f"r{i}", float(i), float(i + 1)) for i in range(12)]
        placed = place(rows)
        matrix = build_matrix(list(placed.values()))
        assert matrix.total_ids() == 12
        seen = [rid for row in matrix.cells for cell in row for rid in cell]
        assert sorted(seen) == sorted(placed)

    def test_cell_levels_form_the_antidiagonal_gradient(self):
        assert PriorityMatrix.cell_level(0, 0) == 0
        assert PriorityMatrix.cell_level(4, 4) == 4
        assert PriorityMatrix.cell_level(4, 0) == 2
        assert PriorityMatrix.cell_level(1, 2) == 1

    def test_cell_colours_come_from_the_ramp(self):
        matrix = build_matrix([])
        for x in range(5):
            for y in range(5):
                assert matrix.cell_colour(x, y) in COLOUR_RAMP

    def test_custom_ramp_must_have_five_entries(self):
        with pytest.raises(ValueError):
            build_matrix([], colour_ramp=("00FF00",))


class TestUcaGrid:
    def test_places_every_uca(self):
        results = [uca(f"u{i}", 1.0, sif=10.0 * (i + 1), inv=i / 10) for i in range(5)]
        grid = uca_grid(results)
        assert grid.total_ids() == 5

    def test_max_sif_and_max_inverted_ej_land_top_right(self):
        results = [uca("top", 1.0, sif=100.0, inv=1.0), uca("low", 1.0, sif=10.0, inv=0.1)]
        grid = uca_grid(results)
        assert "top" in grid.cells[4][4]
