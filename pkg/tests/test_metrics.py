import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ContractError
from metrics.engagement import engagement_rate, relevance_level, window_engagement
from metrics.ranking import (
    dcg_at_k, evaluate_ranking, follower_stratum, followers_reference_scores, ndcg_at_k,
    rank_influencers, rbp, stratified_ndcg,
)
from metrics.report import ReportWriter, read_report


def reference_dcg(levels, k):
    return sum((2 ** level - 1) / math.log2(rank + 2) for rank, level in enumerate(levels[:k]))


class TestEngagement:
    def test_example(self):
        assert engagement_rate([100, 300], 4000) == pytest.approx(0.05)

    def test_no_posts(self):
        assert engagement_rate([], 1000) == 0.0

    def test_non_positive_followers(self):
        with pytest.raises(ContractError):
            engagement_rate([10], 0)

    @pytest.mark.parametrize("rate, level", [
        (0.12, 5), (0.10, 5), (0.07, 4), (0.05, 3), (0.038, 2), (0.01, 1), (0.005, 0), (0.0, 0),
    ])
    def test_relevance_levels(self, rate, level):
        assert relevance_level(rate) == level

    def test_negative_rate(self):
        with pytest.raises(ContractError):
            relevance_level(-0.01)

    def test_window_engagement(self, make_post, make_profile):
        posts = [make_post("u0", 1, likes=30), make_post("u0", 1, likes=10),
                 make_post("u0", 0, likes=1000)]
        profiles = {"u0": make_profile("u0", followers=(100, 200)),
                    "u1": make_profile("u1", followers=(500,))}
        rates = window_engagement(posts, profiles, 1)
        assert rates == pytest.approx({"u0": 0.1, "u1": 0.0})


class TestNdcg:
    def test_worst_first_pair(self):
        assert ndcg_at_k([2, 3], [3, 2], 2) == pytest.approx(0.83399, abs=1e-5)

    def test_zero_ideal(self):
        assert ndcg_at_k([0, 0, 0], [0, 0, 0], 2) == 1.0

    def test_cutoff_must_be_positive(self):
        with pytest.raises(ContractError):
            ndcg_at_k([1], [1], 0)

    def test_exponential_gain(self):
        assert dcg_at_k([5], 1) == 31.0
        assert dcg_at_k([1, 1], 5) == pytest.approx(1.0 + 1.0 / np.log2(3))

    @given(levels=st.lists(st.integers(0, 5), min_size=1, max_size=5), k=st.integers(1, 8))
    def test_ideal_order_maximizes(self, levels, k):
        best = max(ndcg_at_k(list(order), levels, k)
                   for order in itertools.permutations(levels))
        assert best == pytest.approx(1.0)
        for order in itertools.permutations(levels):
            assert 0.0 <= ndcg_at_k(list(order), levels, k) <= 1.0 + 1e-12

    @settings(max_examples=15, deadline=None)
    @given(levels=st.lists(st.integers(0, 5), min_size=1, max_size=8), k=st.integers(1, 10))
    def test_matches_exhaustive_reference(self, levels, k):
        orders = list(itertools.permutations(levels))
        dcgs = [reference_dcg(order, k) for order in orders]
        ideal = max(dcgs)
        for order, dcg in zip(orders, dcgs):
            expected = 1.0 if ideal == 0.0 else dcg / ideal
            assert ndcg_at_k(list(order), levels, k) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestRbp:
    def test_example(self):
        assert rbp([0.10, 0.05], 0.95) == pytest.approx(0.0073750, abs=1e-10)

    def test_depth(self):
        assert rbp([0.10, 0.05], 0.95, depth=1) == pytest.approx(0.005)

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_bad_persistence(self, p):
        with pytest.raises(ContractError):
            rbp([0.1], p)

    @given(gains=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8),
           p=st.floats(0.05, 0.99))
    def test_matches_reference_sum(self, gains, p):
        expected = (1.0 - p) * math.fsum(g * p ** i for i, g in enumerate(gains))
        assert rbp(gains, p) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    @given(gains=st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8),
           p=st.floats(0.05, 0.99))
    def test_improving_swap_never_lowers(self, gains, p):
        before = rbp(gains, p)
        for i, j in itertools.combinations(range(len(gains)), 2):
            if gains[i] < gains[j]:
                swapped = list(gains)
                swapped[i], swapped[j] = swapped[j], swapped[i]
                assert rbp(swapped, p) >= before - 1e-12


class TestRanking:
    def test_ties_break_by_id(self):
        ranked = rank_influencers(["c", "a", "b"], [1.0, 1.0, 2.0], {"a": 0.0, "b": 0.0, "c": 0.0})
        assert ranked.ids == ("b", "a", "c")

    def test_perfect_ranking(self):
        rates = {"a": 0.12, "b": 0.06, "c": 0.02, "d": 0.0}
        ranked = rank_influencers(list(rates), [4.0, 3.0, 2.0, 1.0], rates)
        metrics = evaluate_ranking(ranked, (1, 2, 10))
        assert metrics["ndcg@1"] == metrics["ndcg@10"] == pytest.approx(1.0)
        assert ranked.relevance.tolist() == [5, 3, 1, 0]
        assert metrics["rbp"] == pytest.approx(0.05 * (0.12 + 0.06 * 0.95 + 0.02 * 0.95 ** 2))

    def test_missing_rate(self):
        with pytest.raises(ContractError):
            rank_influencers(["a"], [1.0], {})

    def test_non_finite_scores(self):
        with pytest.raises(ContractError):
            rank_influencers(["a"], [np.nan], {"a": 0.1})


class TestStrata:
    @pytest.mark.parametrize("followers, stratum", [
        (19999, "micro"), (20000, "mid"), (100000, "mid"), (100001, "macro"),
    ])
    def test_boundaries(self, followers, stratum):
        assert follower_stratum(followers) == stratum

    def test_per_stratum_metrics(self):
        rates = {"a": 0.12, "b": 0.02, "c": 0.08, "d": 0.0}
        followers = {"a": 1000, "b": 5000, "c": 50000, "d": 60000}
        ranked = rank_influencers(list(rates), [1.0, 2.0, 4.0, 3.0], rates)
        result = stratified_ndcg(ranked, followers, (1,))
        assert set(result) == {"micro", "mid"}
        assert result["micro"]["count"] == 2.0
        assert result["micro"]["ndcg@1"] < 1.0
        assert result["mid"]["ndcg@1"] == pytest.approx(1.0)

    def test_sampling(self):
        ids = [f"u{i}" for i in range(10)]
        rates = {i: 0.01 * n for n, i in enumerate(ids)}
        ranked = rank_influencers(ids, list(range(10)), rates)
        sampled = stratified_ndcg(ranked, {i: 100 for i in ids}, (5,), sample_size=4, repeats=3,
                                  rng=np.random.default_rng(0))
        assert sampled["micro"]["count"] == 10.0
        assert 0.0 <= sampled["micro"]["ndcg@5"] <= 1.0

    def test_followers_reference(self):
        scores = followers_reference_scores(["a", "b"], {"a": 10, "b": 1000})
        assert scores[1] > scores[0]


class TestReport:
    def test_rows_carry_config(self, tmp_path):
        writer = ReportWriter(tmp_path / "eval.csv", {"seed": 3})
        writer.add("run", "full", 0, {"ndcg@10": 0.5})
        writer.add("run", "full", 1, {"ndcg@10": 0.7})
        writer.add_median("run", "full", writer.rows, ["ndcg@10"])
        frame = read_report(writer.write())
        assert frame["ndcg@10"].tolist() == pytest.approx([0.5, 0.7, 0.6])
        assert frame["seed"].tolist() == [0, 1, -1]
        assert list(frame.columns)[-1] == "config"
        assert frame["config"].iloc[0] == '{"seed": 3}'

    def test_append(self, tmp_path):
        path = tmp_path / "ablate.csv"
        first = ReportWriter(path)
        first.add("one", "full", 0, {"rbp": 0.1})
        first.write()
        second = ReportWriter(path, append=True)
        second.add("two", "no-gcn", 0, {"rbp": 0.2})
        second.write()
        assert read_report(path)["run_id"].tolist() == ["one", "two"]

    def test_overwrite_by_default(self, tmp_path):
        path = tmp_path / "eval.csv"
        for run_id in ("one", "two"):
            writer = ReportWriter(path)
            writer.add(run_id, "full", 0, {"rbp": 0.1})
            writer.write()
        assert read_report(path)["run_id"].tolist() == ["two"]
