import math

import numpy as np
import pytest
from scipy import integrate

from edakit.errors import AnalysisError
from edakit.stats import (
    compare_distributions,
    correlations,
    outlier_flags,
    significance,
    summarize,
)

from conftest import make_matrix
from test_special import chi2_pdf, f_pdf


def interp_quartile(values, p):
    """Independent inclusive-interpolation quantile oracle."""
    xs = sorted(values)
    h = (len(xs) - 1) * p
    lo = math.floor(h)
    hi = math.ceil(h)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


class TestSummarize:
    def test_uniform_bins(self):
        m = make_matrix(np.arange(10.0)[:, None])
        s = summarize(m, bins=5)[0]
        assert s.counts == (2, 2, 2, 2, 2)
        assert s.count == 10 and sum(s.counts) == s.count

    def test_interpolated_quartiles(self):
        vals = [1.0, 2.0, 3.0, 4.0]
        m = make_matrix(np.array(vals)[:, None])
        s = summarize(m)[0]
        assert s.q1 == pytest.approx(interp_quartile(vals, 0.25))
        assert s.median == pytest.approx(interp_quartile(vals, 0.5))
        assert s.q3 == pytest.approx(interp_quartile(vals, 0.75))
        assert (s.q1, s.median, s.q3) == (1.75, 2.5, 3.25)

    def test_constant_column_degenerate_histogram(self):
        m = make_matrix(np.array([[5.0], [5.0], [5.0]]))
        s = summarize(m, bins=4)[0]
        assert s.min == s.max == 5.0
        assert len(s.counts) == 1 and s.counts[0] == 3
        assert s.bin_edges[0] < s.bin_edges[1]

    def test_order_invariants(self):
        rng = np.random.default_rng(0)
        m = make_matrix(rng.normal(size=(50, 4)))
        for s in summarize(m, bins=7):
            assert s.min <= s.q1 <= s.median <= s.q3 <= s.max
            assert sum(s.counts) == s.count == 50
            assert all(a < b for a, b in zip(s.bin_edges, s.bin_edges[1:]))

    def test_max_in_last_bin(self):
        m = make_matrix(np.array([[0.0], [1.0], [2.0]]))
        s = summarize(m, bins=2)[0]
        assert s.counts == (1, 2)

    def test_bad_bins(self):
        m = make_matrix(np.zeros((3, 1)))
        with pytest.raises(AnalysisError):
            summarize(m, bins=0)


class TestCompareDistributions:
    def test_full_group_identical(self):
        rng = np.random.default_rng(1)
        m = make_matrix(rng.normal(size=(30, 3)))
        for group, glob in compare_distributions(m, range(30)):
            assert group == glob

    def test_single_row_group(self):
        rng = np.random.default_rng(2)
        m = make_matrix(rng.normal(size=(20, 2)))
        for group, _ in compare_distributions(m, [5]):
            assert group.count == 1

    def test_partition_identity(self):
        rng = np.random.default_rng(3)
        m = make_matrix(rng.normal(size=(40, 3)))
        rows = list(range(40))
        rng.shuffle(rows)
        ga, gb = rows[:17], rows[17:]
        for (a, glob), (b, _g2) in zip(
            compare_distributions(m, ga), compare_distributions(m, gb)
        ):
            assert a.bin_edges == glob.bin_edges == _g2.bin_edges
            got = tuple(x + y for x, y in zip(a.counts, b.counts))
            assert got == glob.counts

    def test_empty_group_rejected(self):
        m = make_matrix(np.zeros((3, 1)))
        with pytest.raises(AnalysisError):
            compare_distributions(m, [])


def robust_flags_oracle(col):
    """Scalar brute-force robust z: MAD scale, mean-abs-dev fallback."""
    med = sorted(col)[len(col) // 2] if len(col) % 2 else np.median(col)
    dev = [abs(v - med) for v in col]
    mad = sorted(dev)[len(dev) // 2] if len(dev) % 2 else float(np.median(dev))
    if mad > 0:
        z = [d / (1.4826 * mad) for d in dev]
    else:
        meanad = sum(dev) / len(dev)
        if meanad == 0:
            return np.zeros(len(col), dtype=bool)
        z = [d / (1.253314 * meanad) for d in dev]
    return np.array([v > 3.5 for v in z])


class TestOutliers:
    def test_fifty_zeros_one_spike(self):
        col = np.zeros(51)
        col[17] = 100.0
        m = make_matrix(col[:, None])
        flags, row_scores = outlier_flags(m)
        np.testing.assert_array_equal(flags[:, 0], robust_flags_oracle(col))
        assert flags[17, 0] and flags[:, 0].sum() == 1
        assert row_scores[17] == 1

    def test_spike_with_noise(self):
        rng = np.random.default_rng(4)
        col = rng.normal(0, 1, size=51)
        col[17] = 100.0
        m = make_matrix(col[:, None])
        flags, row_scores = outlier_flags(m)
        np.testing.assert_array_equal(flags[:, 0], robust_flags_oracle(col))
        assert flags[17, 0]

    def test_constant_column_no_flags(self):
        m = make_matrix(np.full((20, 1), 3.3))
        flags, scores = outlier_flags(m)
        assert not flags.any() and not scores.any()

    def test_tight_cluster_no_flags(self):
        m = make_matrix(np.array([1.0, 1.1, 0.9, 1.05])[:, None])
        flags, _ = outlier_flags(m)
        assert not flags.any()

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(5)
        data = rng.standard_t(2, size=(200, 4))
        m = make_matrix(data)
        flags, scores = outlier_flags(m)
        for j in range(4):
            np.testing.assert_array_equal(flags[:, j], robust_flags_oracle(data[:, j]))
        np.testing.assert_array_equal(scores, flags.sum(axis=1))


def pearson_oracle(x, y):
    mx, my = sum(x) / len(x), sum(y) / len(y)
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = math.sqrt(sum((a - mx) ** 2 for a in x))
    dy = math.sqrt(sum((b - my) ** 2 for b in y))
    return num / (dx * dy)


class TestCorrelations:
    def test_self_is_one_negation_is_minus_one(self):
        rng = np.random.default_rng(6)
        v = rng.normal(size=25)
        m = make_matrix(np.column_stack([v, v, -v]))
        r = correlations(m, top_k=3)
        assert r.matrix[0, 0] == pytest.approx(1.0)
        assert r.matrix[0, 1] == pytest.approx(1.0)
        assert r.matrix[0, 2] == pytest.approx(-1.0)

    def test_textbook_formula_oracle(self):
        rng = np.random.default_rng(7)
        data = rng.normal(size=(20, 5))
        m = make_matrix(data)
        r = correlations(m, top_k=10)
        for i in range(5):
            for j in range(5):
                want = pearson_oracle(data[:, i].tolist(), data[:, j].tolist())
                assert r.matrix[i, j] == pytest.approx(want, abs=1e-12)

    def test_constant_feature_degenerate(self):
        rng = np.random.default_rng(8)
        m = make_matrix(np.column_stack([rng.normal(size=10), np.full(10, 2.0)]))
        r = correlations(m, top_k=5)
        assert r.degenerate_features == ("f1",)
        assert r.matrix[0, 1] == 0.0 and r.matrix[1, 1] == 0.0

    def test_top_pairs_sorted_no_self_no_dup(self):
        rng = np.random.default_rng(9)
        m = make_matrix(rng.normal(size=(30, 6)))
        r = correlations(m, top_k=100)
        assert len(r.top_pairs) == 15  # 6 choose 2
        strengths = [abs(p[2]) for p in r.top_pairs]
        assert strengths == sorted(strengths, reverse=True)
        seen = set()
        for a, b, _ in r.top_pairs:
            assert a != b and (a, b) not in seen
            seen.add((a, b))

    def test_top_k_limits(self):
        rng = np.random.default_rng(10)
        m = make_matrix(rng.normal(size=(10, 4)))
        assert len(correlations(m, top_k=3).top_pairs) == 3

    def test_psd_on_clean_input(self):
        rng = np.random.default_rng(11)
        m = make_matrix(rng.normal(size=(50, 6)))
        r = correlations(m, top_k=0)
        evals = np.linalg.eigvalsh(r.matrix)
        assert evals.min() > -1e-8

    def test_needs_two_rows(self):
        with pytest.raises(AnalysisError):
            correlations(make_matrix(np.zeros((1, 2))), top_k=1)


def anova_oracle(col, labels):
    """Independent F and p: direct sums + quadrature of the F density."""
    groups = [col[labels == u] for u in np.unique(labels)]
    n, k = len(col), len(groups)
    grand = col.mean()
    ssb = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in groups)
    f = (ssb / (k - 1)) / (ssw / (n - k))
    upper, _ = integrate.quad(f_pdf, f, np.inf, args=(k - 1, n - k), limit=300)
    return f, upper, ssb / (ssb + ssw)


class TestSignificance:
    def test_equal_means_give_p_one(self):
        col = np.array([0.0, 1.0, 0.0, 1.0])
        m = make_matrix(col[:, None])
        e = significance(m, [0, 0, 1, 1], "anova").entries[0]
        assert e.statistic == 0.0 and e.p_value == 1.0 and e.effect_size == 0.0

    def test_perfect_separation(self):
        col = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        m = make_matrix(col[:, None])
        e = significance(m, [0, 0, 0, 1, 1, 1], "anova").entries[0]
        assert e.p_value == 0.0 and e.degenerate
        assert e.effect_size == pytest.approx(1.0)

    def test_anova_matches_quadrature_oracle(self):
        rng = np.random.default_rng(12)
        for trial in range(20):
            n = int(rng.integers(10, 40))
            col = rng.normal(size=n)
            labels = rng.integers(0, 2, size=n)
            labels[:2] = [0, 1]  # both groups non-empty
            m = make_matrix(col[:, None])
            e = significance(m, labels, "anova").entries[0]
            f, p, eta2 = anova_oracle(col, labels)
            assert e.statistic == pytest.approx(f, abs=1e-9)
            assert e.p_value == pytest.approx(p, abs=1e-6)
            assert e.effect_size == pytest.approx(eta2, abs=1e-12)

    def test_eta2_identity(self):
        rng = np.random.default_rng(13)
        col = rng.normal(size=30)
        labels = rng.integers(0, 3, size=30)
        labels[:3] = [0, 1, 2]
        m = make_matrix(col[:, None])
        e = significance(m, labels, "anova").entries[0]
        _, _, eta2 = anova_oracle(col, labels)
        assert abs(e.effect_size - eta2) < 1e-12

    def test_chi2_matches_series_oracle(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            n = int(rng.integers(10, 40))
            col = rng.uniform(0, 5, size=n)
            labels = rng.integers(0, 3, size=n)
            labels[:3] = [0, 1, 2]
            m = make_matrix(col[:, None])
            e = significance(m, labels, "chi2").entries[0]
            shifted = col - col.min()
            groups = [shifted[labels == u] for u in np.unique(labels)]
            obs = np.array([g.sum() for g in groups])
            exp = shifted.sum() * np.array([len(g) / n for g in groups])
            stat = float(((obs - exp) ** 2 / exp).sum())
            p, _ = integrate.quad(chi2_pdf, stat, np.inf, args=(len(groups) - 1,), limit=300)
            assert e.statistic == pytest.approx(stat, abs=1e-9)
            assert e.p_value == pytest.approx(p, abs=1e-6)
            assert 0.0 <= e.effect_size <= 1.0

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(15)
        data = rng.normal(size=(30, 3))
        labels = rng.integers(0, 3, size=30)
        labels[:3] = [0, 1, 2]
        m = make_matrix(data)
        renamed = np.array([{0: 2, 1: 0, 2: 1}[int(v)] for v in labels])
        for method in ("anova", "chi2"):
            a = significance(m, labels, method)
            b = significance(m, renamed, method)
            for ea, eb in zip(a.entries, b.entries):
                assert ea.statistic == pytest.approx(eb.statistic, abs=1e-12)
                assert ea.p_value == pytest.approx(eb.p_value, abs=1e-12)
                assert ea.effect_size == pytest.approx(eb.effect_size, abs=1e-12)

    def test_single_cluster_rejected(self):
        m = make_matrix(np.zeros((5, 1)))
        with pytest.raises(AnalysisError):
            significance(m, [0, 0, 0, 0, 0], "anova")

    def test_n_equal_k_rejected(self):
        m = make_matrix(np.arange(3.0)[:, None])
        with pytest.raises(AnalysisError):
            significance(m, [0, 1, 2], "anova")
