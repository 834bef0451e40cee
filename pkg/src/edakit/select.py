"""Feature ranking and automatic selection.

Unsupervised methods (variance, pca_loading, agglomerate) need only the
matrix; anova/chi2 score features against cluster labels via the
significance tests.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .dataset import MaterializedMatrix
from .errors import AnalysisError
from .reduce import ProjectionParams, project
from .stats import correlations, significance

METHODS = ("variance", "pca_loading", "agglomerate", "anova", "chi2")
_SUPERVISED = ("anova", "chi2")


@dataclass(frozen=True)
class RankEntry:
    feature_id: str
    score: float
    p_value: float | None = None


@dataclass(frozen=True)
class FeatureRanking:
    method: str
    entries: tuple[RankEntry, ...]  # descending by score, ties by feature index
    top_n: int
    groups: tuple[tuple[str, ...], ...] = ()  # agglomerate only

    def to_payload(self) -> dict:
        return {
            "method": self.method,
            "top_n": self.top_n,
            "entries": [
                {"feature": e.feature_id, "score": e.score, "p_value": e.p_value}
                for e in self.entries
            ],
            "groups": [list(g) for g in self.groups],
        }


def _ordered(matrix: MaterializedMatrix, scores, p_values=None) -> tuple[RankEntry, ...]:
    idx = list(range(matrix.f))
    idx.sort(key=lambda j: (-scores[j], j))
    return tuple(
        RankEntry(
            matrix.feature_ids[j],
            float(scores[j]),
            None if p_values is None else float(p_values[j]),
        )
        for j in idx
    )


def _finite(score: float) -> float:
    # degenerate perfect separators carry an infinite statistic; rank them
    # first but keep scores finite per the ranking contract
    return score if np.isfinite(score) else sys.float_info.max


def _feature_groups(matrix: MaterializedMatrix, n_groups: int) -> list[list[int]]:
    """Group features by average-linkage agglomeration of 1 - |r| distance."""
    f = matrix.f
    corr = correlations(matrix, top_k=0).matrix
    dist = 1.0 - np.abs(corr)
    clusters: list[list[int]] = [[j] for j in range(f)]
    # distances between clusters, average linkage
    cd = dist.copy()
    np.fill_diagonal(cd, np.inf)
    active = list(range(f))
    sizes = {j: 1 for j in range(f)}
    while len(active) > n_groups:
        best = (np.inf, -1, -1)
        for ai in range(len(active)):
            i = active[ai]
            for aj in range(ai + 1, len(active)):
                j = active[aj]
                v = cd[i, j]
                if v < best[0] or (v == best[0] and (i, j) < (best[1], best[2])):
                    best = (v, i, j)
        _, i, j = best
        ni, nj = sizes[i], sizes[j]
        for m in active:
            if m in (i, j):
                continue
            cd[i, m] = cd[m, i] = (ni * cd[i, m] + nj * cd[j, m]) / (ni + nj)
        clusters[i] = clusters[i] + clusters[j]
        clusters[j] = []
        sizes[i] = ni + nj
        active.remove(j)
    return [sorted(clusters[i]) for i in sorted(active)]


def rank_features(
    matrix: MaterializedMatrix,
    method: str,
    labels=None,
    top_n: int | None = None,
    dims: int = 2,
) -> FeatureRanking:
    """Rank the matrix features by the chosen relevance criterion.

    variance: sample variance of the raw values. pca_loading: squared
    loading mass on the displayed components. agglomerate: group features
    by 1 - |r| (average linkage) into ``top_n`` groups, rank within group by
    variance (group representatives first). anova / chi2: significance
    statistic against ``labels``, p-value carried through.
    """
    if method not in METHODS:
        raise AnalysisError(f"unknown ranking method {method!r}")
    if matrix.f < 2:
        raise AnalysisError("ranking needs at least 2 features")
    if method in _SUPERVISED and labels is None:
        raise AnalysisError(f"method {method!r} requires cluster labels")
    if top_n is None:
        top_n = matrix.f
    if not 1 <= top_n <= matrix.f:
        raise AnalysisError(f"top_n must be in [1, {matrix.f}]")

    if method == "variance":
        scores = matrix.data.var(axis=0, ddof=1)
        return FeatureRanking(method, _ordered(matrix, scores), top_n)

    if method == "pca_loading":
        res = project(matrix, ProjectionParams("pca", dims=dims, standardize=False))
        scores = (res.components**2).sum(axis=0)
        return FeatureRanking(method, _ordered(matrix, scores), top_n)

    if method == "agglomerate":
        groups = _feature_groups(matrix, top_n)
        variances = matrix.data.var(axis=0, ddof=1)
        scores = np.zeros(matrix.f)
        for g in groups:
            by_var = sorted(g, key=lambda j: (-variances[j], j))
            for rank, j in enumerate(by_var):
                # rank band first, variance tiebreak inside the band
                scores[j] = -rank + variances[j] / (1.0 + variances[j])
        group_ids = tuple(
            tuple(matrix.feature_ids[j] for j in g) for g in groups
        )
        return FeatureRanking(method, _ordered(matrix, scores), top_n, group_ids)

    sig = significance(matrix, labels, method=method)
    by_feature = {e.feature_id: e for e in sig.entries}
    scores = np.array(
        [_finite(by_feature[fid].statistic) for fid in matrix.feature_ids]
    )
    p_values = np.array([by_feature[fid].p_value for fid in matrix.feature_ids])
    return FeatureRanking(method, _ordered(matrix, scores, p_values), top_n)


def auto_select(ranking: FeatureRanking, n: int) -> tuple[str, ...]:
    """Pick the n most relevant features; agglomerate picks one
    representative per group."""
    total = len(ranking.entries)
    if not 1 <= n <= total:
        raise AnalysisError(f"n must be in [1, {total}]")
    if ranking.method == "agglomerate":
        if n != ranking.top_n:
            raise AnalysisError(
                f"agglomerate ranking was grouped for top_n={ranking.top_n}; re-rank for n={n}"
            )
        rank_pos = {e.feature_id: i for i, e in enumerate(ranking.entries)}
        reps = [min(group, key=lambda fid: rank_pos[fid]) for group in ranking.groups]
        return tuple(sorted(reps, key=lambda fid: rank_pos[fid]))
    return tuple(e.feature_id for e in ranking.entries[:n])
