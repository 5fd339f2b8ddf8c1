import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratbench.corpus import (ClassHistogram, Dataset, class_histogram,
                               GROUND_COVER_CLASS_COUNTS)
from stratbench.sampling import (Allocation, Sample, draw_without_replacement,
                                 sample_head, sample_srs, sample_stratified,
                                 stratified_allocation)
from stratbench.seeds import substream


def make_data(n=50, k=3, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(rng.standard_normal((n, 2)), rng.integers(0, k, n),
                   tuple(f"c{i}" for i in range(k)))


class TestSampleContainer:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Sample(np.array([1, 1]), np.ones(2), "srs")

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            Sample(np.array([0, 1]), np.array([1.0, 0.0]), "srs")

    def test_rejects_unknown_design(self):
        with pytest.raises(ValueError):
            Sample(np.array([0]), np.ones(1), "quota")

    def test_arrays_read_only(self):
        s = Sample(np.array([0, 1]), np.ones(2), "srs")
        with pytest.raises(ValueError):
            s.indices[0] = 5


class TestHead:
    def test_takes_prefix(self):
        d = make_data(10)
        s = sample_head(d, 4)
        assert list(s.indices) == [0, 1, 2, 3]
        assert np.all(s.weights == 1.0)
        assert s.design == "head"

    def test_bounds(self):
        d = make_data(10)
        assert sample_head(d, 0).size == 0
        assert sample_head(d, 10).size == 10
        with pytest.raises(ValueError):
            sample_head(d, 11)
        with pytest.raises(ValueError):
            sample_head(d, -1)


class TestDrawWithoutReplacement:
    def test_full_draw_is_permutation(self):
        pool = np.arange(17)
        out = draw_without_replacement(pool, 17, substream(3))
        assert sorted(out) == list(range(17))
        assert not np.array_equal(out, pool)  # seed 3 happens to shuffle

    def test_subset_distinct_and_from_pool(self):
        pool = np.array([5, 9, 12, 40, 41])
        out = draw_without_replacement(pool, 3, substream(0))
        assert len(set(out.tolist())) == 3
        assert set(out.tolist()) <= set(pool.tolist())

    def test_k_zero(self):
        out = draw_without_replacement(np.arange(4), 0, substream(0))
        assert out.size == 0

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            draw_without_replacement(np.arange(4), 5, substream(0))

    def test_uniform_over_singletons(self):
        # each element should be picked about equally often as a 1-draw
        pool = np.arange(10)
        hits = np.zeros(10)
        for seed in range(4000):
            hits[draw_without_replacement(pool, 1, substream(seed))[0]] += 1
        assert hits.min() > 300 and hits.max() < 500


class TestSrs:
    def test_deterministic_per_seed(self):
        d = make_data()
        a = sample_srs(d, 20, 7)
        b = sample_srs(d, 20, 7)
        c = sample_srs(d, 20, 8)
        assert np.array_equal(a.indices, b.indices)
        assert not np.array_equal(a.indices, c.indices)

    def test_n_equals_population(self):
        d = make_data(12)
        s = sample_srs(d, 12, 5)
        assert sorted(s.indices.tolist()) == list(range(12))

    def test_indices_distinct_in_range(self):
        d = make_data(100)
        s = sample_srs(d, 60, 3)
        assert len(set(s.indices.tolist())) == 60
        assert s.indices.min() >= 0 and s.indices.max() < 100

    def test_bad_n(self):
        d = make_data(10)
        with pytest.raises(ValueError):
            sample_srs(d, 11, 0)

    def test_class_counts_hypergeometric_mean(self):
        # class with 100 of 1000 records: mean count in n=100 draws is 10
        labels = np.zeros(1000, dtype=int)
        labels[:100] = 1
        d = Dataset(np.arange(1000, dtype=float).reshape(-1, 1), labels,
                    ("big", "small"))
        counts = [np.sum(d.labels[sample_srs(d, 100, seed).indices] == 1)
                  for seed in range(1000)]
        assert abs(np.mean(counts) - 10.0) < 1.0

    @given(st.integers(min_value=0, max_value=40),
           st.integers(min_value=0, max_value=2**63))
    @settings(max_examples=30, deadline=None)
    def test_always_distinct_in_range(self, n, seed):
        d = make_data(40, seed=2)
        s = sample_srs(d, n, seed)
        assert s.size == n
        assert len(set(s.indices.tolist())) == n
        if n:
            assert 0 <= s.indices.min() and s.indices.max() < 40


class TestAllocation:
    def test_rule_small_and_large(self):
        h = ClassHistogram(("A", "B"), (100, 9))
        a = stratified_allocation(h, 10)
        assert a.as_dict() == {"A": 10, "B": 4}
        assert a.total == 14
        assert a.requested == 10

    def test_boundary_exactly_twice(self):
        h = ClassHistogram(("A",), (20,))
        assert stratified_allocation(h, 10).as_dict() == {"A": 10}

    def test_just_below_twice_takes_half(self):
        h = ClassHistogram(("A",), (19,))
        assert stratified_allocation(h, 10).as_dict() == {"A": 9}

    def test_zero_and_one_record_classes(self):
        h = ClassHistogram(("none", "lone"), (0, 1))
        assert stratified_allocation(h, 5).as_dict() == {"none": 0, "lone": 0}

    def test_survey_spot_values(self):
        h = ClassHistogram(tuple(GROUND_COVER_CLASS_COUNTS),
                           tuple(GROUND_COVER_CLASS_COUNTS.values()))
        for target in (7, 50, 500, 5000):
            a = stratified_allocation(h, target)
            assert a["walls/buildings"] == 6
        assert stratified_allocation(h, 50)["error class"] == 29
        assert stratified_allocation(h, 5)["walls/buildings"] == 5

    def test_requires_positive_target(self):
        h = ClassHistogram(("A",), (5,))
        with pytest.raises(ValueError):
            stratified_allocation(h, 0)

    @given(st.lists(st.integers(min_value=0, max_value=500), min_size=1,
                    max_size=8),
           st.integers(min_value=1, max_value=60))
    def test_rule_holds_classwise(self, counts, target):
        h = ClassHistogram(tuple(f"c{i}" for i in range(len(counts))),
                           tuple(counts))
        a = stratified_allocation(h, target)
        for n_h, a_h in zip(counts, a.counts):
            expected = target if n_h >= 2 * target else n_h // 2
            assert a_h == expected
            assert a_h <= n_h

    @given(st.lists(st.integers(min_value=0, max_value=500), min_size=1,
                    max_size=8),
           st.integers(min_value=1, max_value=59))
    def test_monotone_in_target(self, counts, target):
        h = ClassHistogram(tuple(f"c{i}" for i in range(len(counts))),
                           tuple(counts))
        a = stratified_allocation(h, target)
        b = stratified_allocation(h, target + 1)
        assert b.total >= a.total


class TestStratified:
    def test_composition_matches_allocation(self):
        d = make_data(200, k=4, seed=1)
        s = sample_stratified(d, 20, 9)
        hist = class_histogram(d)
        alloc = stratified_allocation(hist, 20)
        got = np.bincount(d.labels[s.indices], minlength=4)
        assert list(got) == list(alloc.counts)
        assert s.design == "stratified"
        assert s.per_class == 20

    def test_deterministic_per_seed(self):
        d = make_data(200, k=4, seed=1)
        a = sample_stratified(d, 10, 3)
        b = sample_stratified(d, 10, 3)
        c = sample_stratified(d, 10, 4)
        assert np.array_equal(a.indices, b.indices)
        assert not np.array_equal(a.indices, c.indices)

    def test_class_substreams_are_independent(self):
        # removing one class must not change what the others draw
        rng = np.random.default_rng(8)
        feats = rng.standard_normal((90, 1))
        labels = np.repeat([0, 1, 2], 30)
        d3 = Dataset(feats, labels, ("a", "b", "c"))
        s3 = sample_stratified(d3, 5, 42)
        # drop class c entirely; a and b keep their row positions
        d2 = Dataset(feats[:60], labels[:60], ("a", "b", "c"))
        s2 = sample_stratified(d2, 5, 42)
        picked_ab_3 = s3.indices[d3.labels[s3.indices] < 2]
        picked_ab_2 = s2.indices[d2.labels[s2.indices] < 2]
        assert np.array_equal(picked_ab_3, picked_ab_2)

    def test_lone_record_class_unsampled(self):
        feats = np.arange(21, dtype=float).reshape(-1, 1)
        labels = np.array([0] * 20 + [1])
        d = Dataset(feats, labels, ("big", "lone"))
        s = sample_stratified(d, 5, 0)
        assert np.sum(d.labels[s.indices] == 1) == 0
        assert s.size == 5

    def test_all_classes_tiny_gives_empty_sample(self):
        feats = np.arange(2, dtype=float).reshape(-1, 1)
        d = Dataset(feats, np.array([0, 1]), ("a", "b"))
        s = sample_stratified(d, 5, 0)
        assert s.size == 0

    @given(st.integers(min_value=1, max_value=30),
           st.integers(min_value=0, max_value=2**63))
    @settings(max_examples=30, deadline=None)
    def test_indices_distinct_in_range(self, per_class, seed):
        d = make_data(80, k=5, seed=4)
        s = sample_stratified(d, per_class, seed)
        assert len(set(s.indices.tolist())) == s.size
        if s.size:
            assert 0 <= s.indices.min() and s.indices.max() < 80
