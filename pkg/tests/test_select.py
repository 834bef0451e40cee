import numpy as np
import pytest

from edakit.errors import AnalysisError
from edakit.select import auto_select, rank_features
from edakit.stats import significance

from conftest import make_matrix


class TestRankFeatures:
    def test_variance_order(self):
        rng = np.random.default_rng(0)
        data = np.column_stack(
            [np.zeros(30), rng.normal(0, 1, 30), rng.normal(0, 5, 30)]
        )
        r = rank_features(make_matrix(data, ("f1", "f2", "f3")), "variance")
        assert [e.feature_id for e in r.entries] == ["f3", "f2", "f1"]

    def test_variance_tie_breaks_by_index(self):
        data = np.column_stack([np.array([0.0, 1.0]), np.array([0.0, 1.0])])
        r = rank_features(make_matrix(data, ("b_feat", "a_feat")), "variance")
        assert [e.feature_id for e in r.entries] == ["b_feat", "a_feat"]

    def test_pca_loading_uses_displayed_dims(self):
        rng = np.random.default_rng(1)
        data = rng.normal(size=(40, 4))
        m = make_matrix(data)
        r = rank_features(m, "pca_loading", dims=2)
        assert len(r.entries) == 4
        assert all(np.isfinite(e.score) for e in r.entries)

    def test_agglomerate_groups_duplicated_features(self):
        rng = np.random.default_rng(2)
        v = rng.normal(size=30)
        data = np.column_stack([v, v * 2.0, rng.normal(size=30)])
        m = make_matrix(data, ("a", "a2", "other"))
        r = rank_features(m, "agglomerate", top_n=2)
        groups = [set(g) for g in r.groups]
        assert {"a", "a2"} in groups  # perfectly correlated -> distance 0

    def test_anova_order_matches_stats_statistics(self):
        rng = np.random.default_rng(3)
        data = rng.normal(size=(40, 5))
        labels = rng.integers(0, 2, size=40)
        labels[:2] = [0, 1]
        data[:, 2] += labels * 4.0  # make one feature strongly separated
        m = make_matrix(data)
        r = rank_features(m, "anova", labels=labels)
        sig = significance(m, labels, "anova")
        stats_by_f = {e.feature_id: e.statistic for e in sig.entries}
        scores = [stats_by_f[e.feature_id] for e in r.entries]
        assert scores == sorted(scores, reverse=True)
        assert r.entries[0].feature_id == "f2"
        assert all(e.p_value is not None for e in r.entries)

    def test_supervised_requires_labels(self):
        m = make_matrix(np.zeros((10, 3)))
        with pytest.raises(AnalysisError):
            rank_features(m, "anova")

    def test_single_feature_rejected(self):
        m = make_matrix(np.zeros((10, 1)))
        with pytest.raises(AnalysisError):
            rank_features(m, "variance")

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(30, 4))
        labels = rng.integers(0, 2, size=30)
        labels[:2] = [0, 1]
        perm = rng.permutation(30)
        for method in ("variance", "pca_loading", "agglomerate"):
            a = rank_features(make_matrix(data), method, top_n=2)
            b = rank_features(make_matrix(data[perm]), method, top_n=2)
            assert [e.feature_id for e in a.entries] == [e.feature_id for e in b.entries]
        a = rank_features(make_matrix(data), "anova", labels=labels)
        b = rank_features(make_matrix(data[perm]), "anova", labels=labels[perm])
        assert [e.feature_id for e in a.entries] == [e.feature_id for e in b.entries]

    def test_anova_relabeling_invariance(self):
        rng = np.random.default_rng(5)
        data = rng.normal(size=(30, 4))
        labels = rng.integers(0, 3, size=30)
        labels[:3] = [0, 1, 2]
        renamed = np.array([{0: 2, 1: 0, 2: 1}[int(v)] for v in labels])
        a = rank_features(make_matrix(data), "anova", labels=labels)
        b = rank_features(make_matrix(data), "anova", labels=renamed)
        assert [e.feature_id for e in a.entries] == [e.feature_id for e in b.entries]

    def test_unknown_method(self):
        m = make_matrix(np.zeros((5, 2)))
        with pytest.raises(AnalysisError):
            rank_features(m, "lasso")


class TestAutoSelect:
    def test_all_features(self):
        rng = np.random.default_rng(6)
        m = make_matrix(rng.normal(size=(20, 3)))
        r = rank_features(m, "variance")
        assert set(auto_select(r, 3)) == {"f0", "f1", "f2"}

    def test_top_one_by_variance(self):
        data = np.column_stack(
            [np.zeros(20), np.linspace(0, 1, 20), np.linspace(0, 5, 20)]
        )
        r = rank_features(make_matrix(data, ("f1", "f2", "f3")), "variance")
        assert auto_select(r, 1) == ("f3",)

    def test_agglomerate_never_selects_both_correlated(self):
        rng = np.random.default_rng(7)
        v = rng.normal(size=40)
        data = np.column_stack([v, -3.0 * v, rng.normal(size=40)])
        m = make_matrix(data, ("a", "a_neg", "other"))
        r = rank_features(m, "agglomerate", top_n=2)
        chosen = set(auto_select(r, 2))
        assert not {"a", "a_neg"} <= chosen
        assert "other" in chosen

    def test_agglomerate_requires_matching_n(self):
        rng = np.random.default_rng(8)
        m = make_matrix(rng.normal(size=(20, 4)))
        r = rank_features(m, "agglomerate", top_n=2)
        with pytest.raises(AnalysisError, match="re-rank"):
            auto_select(r, 3)

    def test_n_out_of_range(self):
        rng = np.random.default_rng(9)
        m = make_matrix(rng.normal(size=(10, 3)))
        r = rank_features(m, "variance")
        with pytest.raises(AnalysisError):
            auto_select(r, 0)
        with pytest.raises(AnalysisError):
            auto_select(r, 4)
