"""Acceptance gate: every criterion prints one pass/fail line.

Run with ``python3 -m pytest tests/test_acceptance.py -v -s`` to see the
per-criterion lines as they complete. Each criterion has a pinned tolerance
and a runtime limit; the line reports both outcome and elapsed time.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from stratbench.cart import TreeParams, best_split, grow_tree
from stratbench.corpus import GROUND_COVER_CLASS_COUNTS, ClassHistogram
from stratbench.design import post_stratification_weights
from stratbench.harness import (default_experiment_config, emit_results,
                                method_means, resolve_dataset, run_experiment,
                                trend_report)
from stratbench.metrics import kappa, mcr_class, mcr_total, metric_triple
from stratbench.sampling import STRATIFIED, Sample, stratified_allocation

from reference import brute_force_best_split


class criterion:
    """Context manager that prints one pass/fail line with elapsed time."""

    def __init__(self, num, name, limit_s, extra_elapsed=0.0):
        self.num = num
        self.name = name
        self.limit_s = limit_s
        self.extra = extra_elapsed

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0 + self.extra
        ok = exc_type is None and dt < self.limit_s
        print(f"criterion {self.num} ({self.name}): "
              f"{'PASS' if ok else 'FAIL'} [{dt:.2f}s, limit "
              f"{self.limit_s:.0f}s]", flush=True)
        if exc_type is None and dt >= self.limit_s:
            raise AssertionError(
                f"criterion {self.num} exceeded its {self.limit_s}s limit "
                f"({dt:.2f}s)")
        return False


@pytest.fixture(scope="module")
def default_grid():
    """One full run of the stock benchmark, shared by criteria 6-8."""
    config = default_experiment_config()
    data = resolve_dataset(config)
    t0 = time.perf_counter()
    rows = run_experiment(config, data=data)
    elapsed = time.perf_counter() - t0
    return config, data, rows, elapsed


def test_criterion_1_allocation_rule():
    with criterion(1, "allocation rule", 1.0):
        counts = GROUND_COVER_CLASS_COUNTS
        assert len(counts) == 17
        hist = ClassHistogram(tuple(counts), tuple(counts.values()))
        for s in (5, 50, 500, 5000):
            alloc = stratified_allocation(hist, s)
            for name, n_h in counts.items():
                expected = s if n_h >= 2 * s else n_h // 2
                assert alloc[name] == expected, (s, name)
        for s in (7, 50, 500, 5000):
            assert stratified_allocation(hist, s)["walls/buildings"] == 6
        for s in (29, 50, 500, 5000):
            assert stratified_allocation(hist, s)["error class"] == 29


def test_criterion_2_post_stratification_identity():
    with criterion(2, "post-stratification identity", 1.0):
        rng = np.random.default_rng(20240202)
        for _ in range(200):
            k = int(rng.integers(2, 7))
            pop = rng.integers(1, 400, size=k)
            total = int(pop.sum())
            labels = np.repeat(np.arange(k), pop)
            hist = ClassHistogram(tuple(f"c{j}" for j in range(k)),
                                  tuple(int(c) for c in pop))
            picks = []
            offset = 0
            for j in range(k):
                n_h = int(rng.integers(1, pop[j] + 1))
                picks.append(rng.choice(pop[j], size=n_h,
                                        replace=False) + offset)
                offset += int(pop[j])
            indices = np.concatenate(picks)
            sample = Sample(indices=indices, weights=np.ones(indices.size),
                            design=STRATIFIED)
            w = post_stratification_weights(sample, labels, hist)
            sampled_labels = labels[indices]
            grand = float(w.sum())
            for j in range(k):
                share = float(w[sampled_labels == j].sum()) / grand
                assert abs(share - pop[j] / total) < 1e-12, j


def test_criterion_3_split_search_oracle():
    with criterion(3, "split-search oracle", 30.0):
        rng = np.random.default_rng(20240303)
        found = 0
        for _ in range(500):
            n = int(rng.integers(4, 51))
            d = int(rng.integers(1, 3))
            k = int(rng.integers(2, 4))
            X = np.round(rng.normal(scale=2.0, size=(n, d)), 2)
            y = rng.integers(0, k, size=n)
            w = rng.uniform(0.1, 3.0, size=n)
            mb = int(rng.integers(1, 4))
            totals = np.bincount(y, weights=w, minlength=k)
            params = TreeParams(cp=0.0, min_split=2 * mb, min_bucket=mb,
                                max_depth=5)
            got = best_split(X, y, w, totals, params)
            want = brute_force_best_split(X, y, w, k, min_bucket=mb)
            if want is None:
                assert got is None
                continue
            f, thr, dec, left_set = want
            assert got is not None
            assert got.feature == f
            left = frozenset(np.flatnonzero(
                X[:, got.feature] < got.threshold).tolist())
            assert left == left_set
            assert abs(got.decrease - dec) < 1e-12
            found += 1
        assert found >= 400


def same_tree(a, b, prob_tol):
    # leaves carry NaN thresholds, hence equal_nan
    assert np.array_equal(a.feature, b.feature)
    assert np.array_equal(a.threshold, b.threshold, equal_nan=True)
    assert np.array_equal(a.left, b.left)
    assert np.array_equal(a.right, b.right)
    assert np.array_equal(a.prediction, b.prediction)
    assert np.allclose(a.probs, b.probs, rtol=0.0, atol=prob_tol)


def test_criterion_4_cart_invariants():
    with criterion(4, "cart invariants", 60.0):
        rng = np.random.default_rng(20240404)
        params = TreeParams(cp=0.01, min_split=6, min_bucket=3, max_depth=8)
        for _ in range(50):
            n = int(rng.integers(20, 81))
            d = int(rng.integers(1, 4))
            k = int(rng.integers(2, 5))
            X = rng.normal(size=(n, d))
            y = rng.integers(0, k, size=n)
            y[:k] = np.arange(k)
            w = rng.uniform(0.2, 5.0, size=n)
            base = grow_tree(X, y, w, params)
            for c in (0.001, 7.0, 1e6):
                same_tree(base, grow_tree(X, y, w * c, params), 1e-9)
            totals = np.bincount(y, weights=w, minlength=k)
            pri = tuple(totals / totals.sum())
            withp = grow_tree(X, y, w, replace(params, priors=pri))
            same_tree(base, withp, 1e-9)
        for _ in range(50):
            n = int(rng.integers(10, 61))
            d = int(rng.integers(1, 3))
            k = int(rng.integers(2, 5))
            X = rng.uniform(size=(n, d))
            assert np.unique(X, axis=0).shape[0] == n
            y = rng.integers(0, k, size=n)
            deep = TreeParams(cp=0.0, min_split=2, min_bucket=1,
                              max_depth=max(2, n))
            tree = grow_tree(X, y, np.ones(n), deep)
            assert np.array_equal(tree.predict_batch(X), y)


def test_criterion_5_metric_identities():
    with criterion(5, "metric identities", 5.0):
        diag = np.diag([7, 3, 11])
        triple = metric_triple(diag)
        assert triple.mcr_total == 0.0
        assert triple.mcr_class == 0.0
        assert triple.kappa == pytest.approx(1.0, abs=1e-12)

        hand = [[90, 10], [30, 70]]
        assert mcr_total(hand) == pytest.approx(0.2, abs=1e-12)
        assert mcr_class(hand) == pytest.approx(0.2, abs=1e-12)
        assert kappa([[45, 15], [25, 15]]) == pytest.approx(0.13043,
                                                            abs=1e-5)

        rows = np.array([40, 25, 35])
        cols = np.array([10, 55, 35])
        assert kappa(np.outer(rows, cols)) == pytest.approx(0.0, abs=1e-12)

        rng = np.random.default_rng(20240505)
        for _ in range(200):
            k = int(rng.integers(2, 7))
            m = rng.integers(0, 30, size=(k, k)) + np.eye(k, dtype=np.int64)
            perm = rng.permutation(k)
            pm = m[np.ix_(perm, perm)]
            assert mcr_total(pm) == pytest.approx(mcr_total(m), abs=1e-12)
            assert mcr_class(pm) == pytest.approx(mcr_class(m), abs=1e-12)
            assert kappa(pm) == pytest.approx(kappa(m), abs=1e-12)


def test_criterion_6_trend_reproduction(default_grid):
    config, data, rows, elapsed = default_grid
    with criterion(6, "trend reproduction", 600.0, extra_elapsed=elapsed):
        assert all(r.status == "ok" for r in rows)
        report = trend_report(rows)
        print()
        print(report, end="", flush=True)
        means = method_means(rows)
        strats = [m for m in config.methods if m != "srs"]
        for size in config.sizes:
            lbl = size.label
            for m in strats:
                assert (means[("srs", lbl, "mcr_total")]
                        < means[(m, lbl, "mcr_total")]), ("mcr_total", lbl, m)
                assert (means[("srs", lbl, "kappa")]
                        > means[(m, lbl, "kappa")]), ("kappa", lbl, m)
            assert (means[("strat_uninformed", lbl, "mcr_class")]
                    < means[("srs", lbl, "mcr_class")]), ("mcr_class", lbl)
        assert "VIOLATED" not in report


def test_criterion_7_determinism(default_grid, tmp_path):
    config, data, rows, _ = default_grid
    with criterion(7, "determinism", 600.0):
        first = tmp_path / "first.csv"
        again = tmp_path / "again.csv"
        parallel = tmp_path / "parallel.csv"
        emit_results(rows, first)
        emit_results(run_experiment(config, data=data), again)
        emit_results(run_experiment(config, data=data, jobs=8), parallel)
        assert first.read_bytes() == again.read_bytes()
        assert first.read_bytes() == parallel.read_bytes()


def test_criterion_8_grid_shape(default_grid):
    config, data, rows, _ = default_grid
    with criterion(8, "grid shape", 5.0):
        assert len(rows) == 4 * 3 * 50 == 600
        for r in rows:
            assert r.n_sample + r.n_eval == data.n_records
        groups = {}
        for r in rows:
            groups.setdefault((r.method, r.size_label), []).append(r.replicate)
        assert len(groups) == 12
        for reps in groups.values():
            assert reps == list(range(50))
