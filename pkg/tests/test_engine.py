import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import triang as scipy_triang

from stpa_prio.engine import (
    FACTORS,
    RankShiftEntry,
    SawScore,
    desirability,
    final_ranking,
    outcome_from_ranks,
    rank_once,
    rank_shift,
    sample_triangular,
    saw,
    sensitivity_oat,
    simulate,
    triangular_from_uniform,
)
from stpa_prio.errors import (
    EmptyInput,
    InvalidPerturbation,
    MismatchedSets,
    TooFewRequirements,
)
from stpa_prio.model import (
    AnalysisConfig,
    FactorAssessment,
    MitigationType,
    RequirementRecord,
)

CONFIG = AnalysisConfig()

# (time, cost, type, covered) rows of the published SME assessment table.
CASESTUDY_FACTOR_ROWS = [
    ("UCA(Ph2)-7.5.2-RQ.5", 2, 2, "C", 1),
    ("UCA(Ph2)-7.5.3-RQ.2", 2, 2, "C", 1),
    ("UCA(Ph0.1)-13.5.2-RQ1", 1, 1, "A", 1),
    ("UCA(Ph0.1)-14.5.1-RQ1", 1, 1, "A", 1),
    ("UCA(Ph0.1)-15.5.1-RQ1", 2, 1, "A", 1),
    ("UCA(Ph1)-18.2.1-RQ1", 1, 1, "E", 0),
    ("UCA(Ph0.2)-33.7.2-RQ2", 1, 1, "E", 0),
    ("UCA(Ph1)-18.5.1-RQ2", 1, 1, "E", 0),
    ("UCA(Ph1)-18.2.2-RQ1", 1, 1, "E", 0),
    ("UCA(Ph1)-18.2.2-RQ5", 1, 1, "E", 0),
    ("UCA(Ph0.1)-34.1.1-RQ2", 1, 1, "E", 0),
    ("UCA(Ph0.2)-33.1.2-RQ2", 1, 1, "E", 0),
    ("UCA(Ph0.2)-10.6.1-RQ2", 1, 1, "D", 1),
    ("UCA(Ph0.1)-17.1.2-RQ1", 1, 1, "B", 1),
    ("UCA(Ph0.1)-49.5.1-RQ4", 2, 1, "B", 1),
]


def assessment(time=1, cost=1, mtype="A", covered=1, **bounds) -> FactorAssessment:
    return FactorAssessment(
        time=time, cost=cost, mitigation_type=MitigationType[mtype],
        covered_gap=covered, **bounds,
    )


def requirement(i: int, a: FactorAssessment) -> RequirementRecord:
    uca = f"UCA(Ph1)-1.1.{i}"
    return RequirementRecord(f"{uca}-RQ1", uca, f"requirement {i}", (), a)


def requirements_from(factor_rows) -> list[RequirementRecord]:
    return [
        requirement(i, assessment(time=t, cost=c, mtype=y, covered=g))
        for i, (_, t, c, y, g) in enumerate(factor_rows)
    ]


class TestDesirability:
    def test_best_case(self):
        assert desirability(assessment(1, 1, "A", 1)) == (1.0, 1.0, 1.0, 1.0)

    def test_worst_case(self):
        assert desirability(assessment(3, 3, "E", 0)) == (0.0, 0.0, 0.0, 0.0)

    def test_mid_case(self):
        d_type, d_lik, d_time, d_cost = desirability(assessment(2, 2, "C", 1))
        assert (d_type, d_lik, d_time, d_cost) == (0.5, 1.0, 0.5, 0.5)


class TestSaw:
    @pytest.mark.parametrize("time,cost,mtype,covered,expected", [
        (1, 1, "A", 1, 1.0),
        (1, 1, "E", 0, 0.30),
        (2, 2, "C", 1, 0.65),
    ])
    def test_published_assessments(self, time, cost, mtype, covered, expected):
        score = saw(assessment(time, cost, mtype, covered), CONFIG)
        assert score.value == pytest.approx(expected, abs=1e-12)

    def test_value_matches_weighted_sum_invariant(self):
        a = assessment(2, 3, "B", 0)
        score = saw(a, CONFIG, req_id="r")
        expected = sum(w * d for w, d in zip(CONFIG.weights, desirability(a)))
        assert score.value == expected
        assert score.req_id == "r"

    @given(
        time=st.integers(1, 3), cost=st.integers(1, 3),
        mtype=st.sampled_from("ABCDE"), covered=st.integers(0, 1),
        factor=st.sampled_from(FACTORS),
    )
    def test_monotone_in_every_factor(self, time, cost, mtype, covered, factor):
        base = assessment(time, cost, mtype, covered)
        improved_kwargs = dict(time=time, cost=cost, mtype=mtype, covered=covered)
        if factor == "time" and time > 1:
            improved_kwargs["time"] = time - 1
        elif factor == "cost" and cost > 1:
            improved_kwargs["cost"] = cost - 1
        elif factor == "type" and mtype != "A":
            improved_kwargs["mtype"] = "ABCDE"["ABCDE".index(mtype) - 1]
        elif factor == "likelihood" and covered == 0:
            improved_kwargs["covered"] = 1
        else:
            return
        improved = assessment(**improved_kwargs)
        assert saw(improved, CONFIG).value > saw(base, CONFIG).value


class TestRankOnce:
    def test_simple_order(self):
        assert rank_once([0.9, 0.5, 0.1]).tolist() == [1, 2, 3]

    def test_tie_averaging(self):
        assert rank_once([0.9, 0.9, 0.1]).tolist() == [1.5, 1.5, 3]

    def test_accepts_saw_scores(self):
        scores = [SawScore("a", (0, 0, 0, 0), 0.2), SawScore("b", (0, 0, 0, 0), 0.8)]
        assert rank_once(scores).tolist() == [2, 1]

    def test_empty(self):
        with pytest.raises(EmptyInput):
            rank_once([])

    def test_published_assessments_against_sort_oracle(self):
        values = [
            saw(assessment(t, c, y, g), CONFIG).value
            for _, t, c, y, g in CASESTUDY_FACTOR_ROWS
        ]
        ranks = rank_once(values)
        # brute-force oracle: positional sort, ties averaged
        order = sorted(range(len(values)), key=lambda i: -values[i])
        oracle = [0.0] * len(values)
        pos = 0
        while pos < len(order):
            tied = [j for j in order if values[j] == values[order[pos]]]
            avg = sum(order.index(j) + 1 for j in tied) / len(tied)
            for j in tied:
                oracle[j] = avg
            pos += len(tied)
        assert ranks.tolist() == oracle
        # the two all-best rows share the top fractional rank
        best = [i for i, v in enumerate(values) if v == 1.0]
        assert len(best) == 2
        assert all(ranks[i] == 1.5 for i in best)

    @given(st.lists(st.integers(0, 50), min_size=1, max_size=80))
    def test_rank_sum_is_conserved(self, raw):
        values = [v / 50 for v in raw]
        n = len(values)
        assert rank_once(values).sum() == n * (n + 1) / 2


class TestTriangularSampling:
    def test_degenerate_triangle_is_exact(self):
        for v in (0.0, 1.0, 2.5, 3.0):
            assert triangular_from_uniform(0.37, v, v, v) == v
            assert np.all(sample_triangular(v, v, v, size=100, seed=1) == v)

    def test_draws_stay_in_bounds(self):
        draws = sample_triangular(1, 2, 3, size=10_000, seed=7)
        assert draws.min() >= 1.0
        assert draws.max() <= 3.0

    def test_mean_matches_analytic_value(self):
        draws = sample_triangular(1, 2, 3, size=100_000, seed=11)
        assert abs(draws.mean() - 2.0) < 0.02

    @given(
        u=st.floats(0.0, 1.0, exclude_max=True),
        a=st.floats(0, 10), width=st.floats(0.01, 10), frac=st.floats(0, 1),
    )
    def test_matches_scipy_inverse_cdf(self, u, a, width, frac):
        b = a + width
        c = a + frac * width
        ours = triangular_from_uniform(u, a, c, b)
        ref = scipy_triang.ppf(u, c=frac, loc=a, scale=width)
        assert ours == pytest.approx(ref, abs=1e-9)

    def test_asymmetric_mode_at_boundary(self):
        # c == a and c == b are valid triangles
        left = sample_triangular(0, 0, 1, size=50_000, seed=3)
        right = sample_triangular(0, 1, 1, size=50_000, seed=3)
        assert abs(left.mean() - 1 / 3) < 0.01
        assert abs(right.mean() - 2 / 3) < 0.01


class TestOutcomeStatistics:
    def test_hand_worked_two_iteration_example(self):
        out = outcome_from_ranks("r", [1, 3], ci_z=1.96)
        assert out.mean_rank == 2.0
        assert out.rank_sigma == 1.0
        assert out.requirement_score == 3.0
        assert out.ci_upper == pytest.approx(2 + 1.96 / math.sqrt(2), abs=1e-4)

    def test_sigma_uses_population_normalisation(self):
        out = outcome_from_ranks("r", [1, 2, 3, 4])
        assert out.rank_sigma == pytest.approx(math.sqrt(1.25), abs=1e-12)


class TestSimulate:
    def test_needs_two_requirements(self):
        with pytest.raises(TooFewRequirements):
            simulate([requirement(0, assessment())], CONFIG)

    def test_perturbation_validated(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS[:3])
        cfg = AnalysisConfig()
        object.__setattr__(cfg, "perturbation", 1.5)  # bypass config guard
        with pytest.raises(InvalidPerturbation):
            simulate(reqs, cfg)

    def test_zero_uncertainty_degeneracy_is_exact(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        cfg = AnalysisConfig(perturbation=0.0, iterations=64)
        for out in simulate(reqs, cfg):
            assert out.rank_sigma == 0.0
            assert out.requirement_score == out.mean_rank
            assert out.ci_upper == out.mean_rank
            assert np.all(out.ranks == out.ranks[0])

    @pytest.mark.parametrize("mode", ["uniform-pct", "triangular", "combined"])
    def test_deterministic_for_fixed_seed(self, mode):
        reqs = [
            requirement(0, assessment(1, 1, "A", 1, time_bounds=(1, 3))),
            requirement(1, assessment(2, 2, "C", 1, cost_bounds=(1, 3))),
            requirement(2, assessment(3, 1, "E", 0, type_bounds=(1, 3))),
        ]
        cfg = AnalysisConfig(iterations=200, sampling_mode=mode)
        a = simulate(reqs, cfg)
        b = simulate(reqs, cfg)
        for x, y in zip(a, b):
            assert np.array_equal(x.ranks, y.ranks)
            assert (x.mean_rank, x.rank_sigma, x.requirement_score, x.ci_upper) == (
                y.mean_rank, y.rank_sigma, y.requirement_score, y.ci_upper,
            )

    @pytest.mark.parametrize("workers", [2, 3, 8])
    def test_worker_count_does_not_change_results(self, workers):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        base = simulate(reqs, AnalysisConfig(iterations=250))
        multi = simulate(reqs, AnalysisConfig(iterations=250, workers=workers))
        for x, y in zip(base, multi):
            assert np.array_equal(x.ranks, y.ranks)
            assert x.requirement_score == y.requirement_score
            assert x.ci_upper == y.ci_upper

    def test_rank_sums_conserved_every_iteration(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        outs = simulate(reqs, AnalysisConfig(iterations=300))
        ranks = np.stack([o.ranks for o in outs], axis=1)
        n = len(reqs)
        assert np.all(ranks.sum(axis=1) == n * (n + 1) / 2)

    def test_ci_consistency_with_sigma(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        cfg = AnalysisConfig(iterations=500)
        for out in simulate(reqs, cfg):
            lhs = out.ci_upper - out.mean_rank
            rhs = cfg.ci_z * out.rank_sigma / math.sqrt(cfg.iterations)
            assert abs(lhs - rhs) <= 1e-12

    def test_mean_rank_within_bounds(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        for out in simulate(reqs, AnalysisConfig(iterations=100)):
            assert 1.0 <= out.mean_rank <= len(reqs)

    def test_triangular_mode_with_point_assessments_is_degenerate(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        cfg = AnalysisConfig(sampling_mode="triangular", iterations=50)
        for out in simulate(reqs, cfg):
            assert out.rank_sigma == 0.0

    def test_stable_rows_shift_little_between_seeds(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        run_a = simulate(reqs, AnalysisConfig(seed=1))
        run_b = simulate(reqs, AnalysisConfig(seed=2))
        shifts = {e.req_id: e.shift for e in rank_shift(run_a, run_b)}
        # the two all-best assessments can at most swap with each other
        assert shifts[reqs[2].req_id] <= 1
        assert shifts[reqs[3].req_id] <= 1


class TestSensitivity:
    def test_point_assessments_have_zero_shift(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS[:5])
        for res in sensitivity_oat(reqs, CONFIG):
            assert res.max_shift == 0.0
            assert res.rank_at_mode == res.rank_at_lower == res.rank_at_upper

    def test_time_bracket_moves_rank(self):
        # Moderate time bracketed by Minor and Significant on one row,
        # competitors close enough for the bracket to cross them.
        reqs = [
            requirement(0, assessment(2, 1, "B", 1, time_bounds=(1, 3))),
            requirement(1, assessment(1, 2, "B", 1)),
            requirement(2, assessment(1, 1, "C", 1)),
        ]
        results = {
            (r.req_id, r.factor): r for r in sensitivity_oat(reqs, CONFIG)
        }
        probe = results[(reqs[0].req_id, "time")]
        assert probe.rank_at_lower < probe.rank_at_mode < probe.rank_at_upper
        assert probe.max_shift >= 1

    def test_single_requirement_dataset(self):
        reqs = [requirement(0, assessment(2, 2, "C", 1, time_bounds=(1, 3)))]
        for res in sensitivity_oat(reqs, CONFIG):
            assert res.rank_at_mode == 1.0
            assert res.max_shift == 0.0

    def test_one_result_per_requirement_factor_pair(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS[:4])
        results = sensitivity_oat(reqs, CONFIG)
        assert len(results) == 4 * len(FACTORS)


class TestRankShift:
    def _outcomes(self, scores):
        return [
            outcome_from_ranks(req_id, [score]) for req_id, score in scores.items()
        ]

    def test_identical_runs_have_zero_shift(self):
        reqs = requirements_from(CASESTUDY_FACTOR_ROWS)
        run = simulate(reqs, CONFIG)
        assert all(e.shift == 0 for e in rank_shift(run, run))

    def test_constructed_swap_is_flagged(self):
        run_a = self._outcomes({"A": 1, "B": 2, "C": 3, "D": 4, "E": 5, "F": 6})
        run_b = self._outcomes({"F": 1, "B": 2, "C": 3, "D": 4, "E": 5, "A": 6})
        entries = {e.req_id: e for e in rank_shift(run_a, run_b)}
        assert entries["A"].shift == 5 and entries["A"].flagged
        assert entries["F"].shift == 5 and entries["F"].flagged
        assert all(not entries[x].flagged for x in "BCDE")

    def test_mismatched_sets(self):
        run_a = self._outcomes({"A": 1, "B": 2})
        run_b = self._outcomes({"A": 1, "C": 2})
        with pytest.raises(MismatchedSets):
            rank_shift(run_a, run_b)

    def test_final_ranking_breaks_ties_by_req_id(self):
        outcomes = self._outcomes({"B": 1.5, "A": 1.5, "C": 9})
        assert final_ranking(outcomes) == {"A": 1, "B": 2, "C": 3}

    def test_entries_sorted_by_first_run_rank(self):
        run_a = self._outcomes({"A": 2, "B": 1, "C": 3})
        entries = rank_shift(run_a, run_a)
        assert [e.req_id for e in entries] == ["B", "A", "C"]

    def test_flag_threshold_boundary(self):
        assert RankShiftEntry("r", 1, 6, 5).flagged
        assert not RankShiftEntry("r", 1, 5, 4).flagged
