import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import specgen
from chartdesign import sampling, schema
from chartdesign.sampling import (
    WeightTable,
    attribute_counts,
    compute_weights,
    corpus_stats,
    coverage_log,
    example_weight,
    normalize_weights,
    sample_batches,
    value_weight,
)


def mk(chart, alignment="vertical", **extra):
    obj = {"chart_type": chart, "chart_alignment": alignment, "text_elements": {}}
    obj.update(extra)
    return schema.spec_from_obj(obj)


class TestAttributeCounts:
    def test_direct_count(self):
        corpus = [mk("bar"), mk("bar"), mk("bar"), mk("line")]
        table = attribute_counts(corpus)
        assert table.counts["chart_type=bar"] == 3
        assert table.counts["chart_type=line"] == 1
        assert table.total == 4

    def test_duplicates_counted_per_document(self):
        corpus = [mk("bar")] * 5
        # independent recount: every flattened pair of every document
        oracle = Counter()
        for spec in corpus:
            from chartdesign.evaluation import flatten

            oracle.update(sampling.pair_key(f.path, f.value) for f in flatten(spec))
        table = attribute_counts(corpus)
        assert table.counts == dict(oracle)
        assert table.counts["chart_type=bar"] == 5

    def test_empty_corpus_errors(self):
        with pytest.raises(ValueError):
            attribute_counts([])


class TestValueWeight:
    def test_full_coverage_is_ln2(self):
        assert value_weight(100, 100) == pytest.approx(math.log(2), abs=1e-15)

    def test_published_corpus_counts(self):
        # brute-force recomputation via log1p as the second route
        assert value_weight(180, 2118) == pytest.approx(math.log1p(2118 / 180), abs=1e-12)
        assert value_weight(17, 2118) == pytest.approx(math.log1p(2118 / 17), abs=1e-12)
        assert value_weight(180, 2118) == pytest.approx(2.5467, abs=2e-4)
        assert value_weight(17, 2118) == pytest.approx(4.833, abs=5e-4)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            value_weight(0, 10)
        with pytest.raises(ValueError):
            value_weight(11, 10)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 10**6))
    def test_strictly_decreasing_in_count(self, a, b, total):
        n1, n2 = sorted((a % total + 1, b % total + 1))
        if n1 != n2:
            assert value_weight(n1, total) > value_weight(n2, total)


class TestExampleWeight:
    def test_pure_product(self):
        # pie with every applicable attribute present: no penalty applies
        spec = mk(
            "pie",
            sub_chart_type="simple",
            legend={"visible": True, "position": "top", "labels": []},
        )
        weights = WeightTable(
            {
                "chart_type=pie": 2.0,
                "chart_alignment=vertical": 3.0,
                "sub_chart_type=simple": 1.0,
                "legend.visible=true": 1.0,
                "legend.position=top": 1.0,
            }
        )
        assert example_weight(spec, weights, penalty=0.5) == pytest.approx(6.0)

    def test_single_missing_attribute_applies_penalty_once(self):
        # pie missing only its legend: weights product 6.0 -> 5.4 at 0.9
        spec = mk("pie", sub_chart_type="simple")
        weights = WeightTable(
            {
                "chart_type=pie": 2.0,
                "chart_alignment=vertical": 3.0,
                "sub_chart_type=simple": 1.0,
            }
        )
        assert example_weight(spec, weights, penalty=0.9) == pytest.approx(5.4)

    def test_penalty_one_ignores_missing(self):
        spec = mk("pie")
        weights = WeightTable({"chart_type=pie": 2.0, "chart_alignment=vertical": 3.0})
        assert example_weight(spec, weights, penalty=1.0) == pytest.approx(6.0)

    def test_unseen_value_is_named(self):
        spec = mk("pie")
        with pytest.raises(ValueError, match="chart_type=pie"):
            example_weight(spec, WeightTable({"chart_alignment=vertical": 1.0}))

    def test_matches_brute_force_product(self, rng):
        corpus = [specgen.random_valid_spec(rng) for _ in range(40)]
        weights = compute_weights(attribute_counts(corpus))
        from chartdesign.evaluation import flatten

        for spec in corpus[:10]:
            expected = 1.0
            for f in flatten(spec):
                expected *= weights.weights[sampling.pair_key(f.path, f.value)]
            assert example_weight(spec, weights, penalty=1.0) == pytest.approx(expected)


class TestNormalizeWeights:
    def test_uniform(self):
        assert sampling.normalize_weights([1, 1, 1, 1]).probabilities == (0.25,) * 4

    def test_simple_ratios(self):
        dist = normalize_weights([1, 2, 4])
        assert dist.probabilities == pytest.approx((1 / 7, 2 / 7, 4 / 7))

    def test_single_element(self):
        assert normalize_weights([3.5]).probabilities == (1.0,)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            normalize_weights([1.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=50))
    def test_sums_to_one(self, raw):
        assert math.fsum(normalize_weights(raw).probabilities) == pytest.approx(1.0, abs=1e-9)


class TestSampleBatches:
    def test_degenerate_distribution(self):
        dist = normalize_weights([1.0])
        batches = sample_batches(dist, batch_size=4, num_batches=3, seed=1)
        assert batches == [[0, 0, 0, 0]] * 3

    def test_deterministic_per_seed(self):
        dist = normalize_weights([1, 2, 4])
        assert sample_batches(dist, 4, 10, seed=9) == sample_batches(dist, 4, 10, seed=9)
        assert sample_batches(dist, 4, 10, seed=9) != sample_batches(dist, 4, 10, seed=10)

    def test_empirical_frequencies_converge(self):
        dist = normalize_weights([1, 2, 4])
        batches = sample_batches(dist, batch_size=4, num_batches=25_000, seed=20240817)
        tally = Counter(i for batch in batches for i in batch)
        for index, p in enumerate(dist.probabilities):
            assert abs(tally[index] / 100_000 - p) <= 0.01

    def test_batch_shape(self):
        dist = normalize_weights([1, 1])
        batches = sample_batches(dist, batch_size=2, num_batches=5, seed=0)
        assert len(batches) == 5
        assert all(len(b) == 2 for b in batches)
        with pytest.raises(ValueError):
            sample_batches(dist, batch_size=0, num_batches=1, seed=0)


class TestCoverageLog:
    def test_single_batch_tally(self):
        corpus = [mk("bar")] * 4
        report = coverage_log([[0, 1, 2, 3]], corpus)
        assert report.per_batch[0]["chart_type=bar"] == 4

    def test_aggregate_conservation(self):
        corpus = [mk("bar"), mk("line"), mk("pie")]
        batches = sample_batches(normalize_weights([1, 1, 1]), 4, 25, seed=3)
        report = coverage_log(batches, corpus)
        total_by_type = sum(
            n for key, n in report.aggregate.items() if key.startswith("chart_type=")
        )
        assert total_by_type == 4 * 25

    def test_out_of_range_index(self):
        with pytest.raises(IndexError):
            coverage_log([[0, 5]], [mk("bar")])

    def test_weighting_lifts_rare_class_share(self):
        specs, _ = specgen.table2_corpus()
        counts = attribute_counts(specs)
        weights = compute_weights(counts)
        dist = normalize_weights([example_weight(s, weights) for s in specs])
        batches = sample_batches(dist, batch_size=4, num_batches=2_500, seed=11)
        report = coverage_log(batches, specs)
        scatter_share = report.aggregate.get("chart_type=scatter", 0) / 10_000
        assert scatter_share > 180 / 2118


class TestCorpusStats:
    def test_published_composition_recovered_exactly(self):
        specs, tags = specgen.table2_corpus()
        report = corpus_stats(specs, tags)
        assert report.totals == {"charxiv": 1017, "pew": 1101}
        assert sum(report.totals.values()) == 2118
        assert report.chart_types["charxiv"] == {
            "bar": 200,
            "line": 420,
            "pie": 20,
            "area": 110,
            "scatter": 180,
            "box": 70,
            "histogram": 17,
        }
        assert report.chart_types["pew"]["line"] == 400
        assert report.chart_types["pew"]["pie"] == 50
        assert report.chart_types["pew"]["area"] == 30
        assert report.sub_types == {
            "pew": {"grouped": 50, "stacked": 20},
            "charxiv": {"grouped": 35, "stacked": 15},
        }
        assert report.alignment_values == {
            "pew": ("horizontal", "other", "vertical"),
            "charxiv": ("horizontal", "other", "vertical"),
        }
        assert report.grid_line_ranges["pew"]["horizontal"] == (0, 4)
        assert report.grid_line_ranges["charxiv"]["horizontal"] == (0, 6)

    def test_counts_sum_per_facet(self):
        specs, tags = specgen.table2_corpus()
        report = corpus_stats(specs, tags)
        for source, per_type in report.chart_types.items():
            assert sum(per_type.values()) == report.totals[source]

    def test_all_bar_corpus(self):
        report = corpus_stats([mk("bar")] * 5, ["x"] * 5)
        assert report.chart_types["x"]["bar"] == 5
        assert sum(report.chart_types["x"].values()) == 5

    def test_errors(self):
        with pytest.raises(ValueError):
            corpus_stats([], [])
        with pytest.raises(ValueError):
            corpus_stats([mk("bar")], ["a", "b"])
