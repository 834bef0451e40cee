"""Clustering with deterministic contracts: k-means(++), agglomerative
linkage, silhouette validation and per-cluster feature profiles.

Labels are always relabeled canonically by first occurrence (row 0's
cluster is 0), so equal partitions compare equal regardless of internal
cluster numbering. Same seed, same input: bit-stable output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .dataset import MaterializedMatrix
from .errors import AnalysisError
from .metrics import METRICS, pairwise_distances

ALGORITHMS = ("kmeans", "agglomerative")
LINKAGES = ("average", "complete", "single")
MAX_KMEANS_ITER = 300
SILHOUETTE_SAMPLE_CAP = 5000


@dataclass(frozen=True)
class ClusteringParams:
    algorithm: str = "kmeans"
    k: int = 2
    metric: str = "euclidean"  # agglomerative only; kmeans is euclidean
    linkage: str = "average"  # agglomerative only
    seed: int = 0  # kmeans seeding and silhouette subsampling

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise AnalysisError(f"unknown clustering algorithm {self.algorithm!r}")
        if self.k < 2:
            raise AnalysisError("k must be >= 2")
        if self.metric not in METRICS:
            raise AnalysisError(f"unknown metric {self.metric!r}")
        if self.linkage not in LINKAGES:
            raise AnalysisError(f"unknown linkage {self.linkage!r}")

    @property
    def effective_metric(self) -> str:
        return "euclidean" if self.algorithm == "kmeans" else self.metric

    def to_payload(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "metric": self.metric,
            "linkage": self.linkage,
            "seed": self.seed,
        }

    @staticmethod
    def from_payload(d: Mapping) -> "ClusteringParams":
        return ClusteringParams(
            algorithm=d.get("algorithm", "kmeans"),
            k=int(d.get("k", 2)),
            metric=d.get("metric", "euclidean"),
            linkage=d.get("linkage", "average"),
            seed=int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class SilhouetteScores:
    per_point: np.ndarray  # scores for evaluated points
    mean: float
    sampled: bool = False
    sample_indices: tuple[int, ...] = ()  # matrix positions when sampled

    def to_payload(self) -> dict:
        return {
            "per_point": [float(v) for v in self.per_point],
            "mean": self.mean,
            "sampled": self.sampled,
            "sample_indices": list(self.sample_indices),
        }

    @staticmethod
    def from_payload(d: Mapping) -> "SilhouetteScores":
        return SilhouetteScores(
            per_point=np.asarray(d["per_point"], dtype=np.float64),
            mean=float(d["mean"]),
            sampled=bool(d.get("sampled", False)),
            sample_indices=tuple(int(i) for i in d.get("sample_indices", ())),
        )


@dataclass(frozen=True)
class ClusterProfile:
    feature_ids: tuple[str, ...]
    cluster_ids: tuple[int, ...]
    means: np.ndarray  # f x k, original units
    normalized: np.ndarray  # f x k in [0, 1], row-min 0 / row-max 1

    def to_payload(self) -> dict:
        return {
            "features": list(self.feature_ids),
            "clusters": list(self.cluster_ids),
            "means": [[float(v) for v in row] for row in self.means],
            "normalized": [[float(v) for v in row] for row in self.normalized],
        }

    @staticmethod
    def from_payload(d: Mapping) -> "ClusterProfile":
        return ClusterProfile(
            feature_ids=tuple(d["features"]),
            cluster_ids=tuple(int(c) for c in d["clusters"]),
            means=np.asarray(d["means"], dtype=np.float64),
            normalized=np.asarray(d["normalized"], dtype=np.float64),
        )


@dataclass(frozen=True)
class ClusteringResult:
    params: ClusteringParams
    labels: np.ndarray  # canonical ints 0..k-1
    cluster_sizes: tuple[int, ...]
    inertia: float | None = None  # kmeans
    silhouette: SilhouetteScores | None = None
    silhouette_by_k: tuple[tuple[int, float], ...] = ()
    profile: ClusterProfile | None = None

    @property
    def k(self) -> int:
        return len(self.cluster_sizes)

    def to_payload(self) -> dict:
        out = {
            "params": self.params.to_payload(),
            "labels": [int(v) for v in self.labels],
            "cluster_sizes": list(self.cluster_sizes),
            "inertia": self.inertia,
            "silhouette_by_k": [[k, s] for k, s in self.silhouette_by_k],
        }
        if self.silhouette is not None:
            out["silhouette"] = self.silhouette.to_payload()
        if self.profile is not None:
            out["profile"] = self.profile.to_payload()
        return out

    @staticmethod
    def from_payload(d: Mapping) -> "ClusteringResult":
        return ClusteringResult(
            params=ClusteringParams.from_payload(d["params"]),
            labels=np.asarray(d["labels"], dtype=int),
            cluster_sizes=tuple(int(s) for s in d["cluster_sizes"]),
            inertia=None if d.get("inertia") is None else float(d["inertia"]),
            silhouette=(
                SilhouetteScores.from_payload(d["silhouette"])
                if "silhouette" in d
                else None
            ),
            silhouette_by_k=tuple(
                (int(k), float(s)) for k, s in d.get("silhouette_by_k", ())
            ),
            profile=(
                ClusterProfile.from_payload(d["profile"]) if "profile" in d else None
            ),
        )


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel by first occurrence: labels[0] -> 0, next new label -> 1, ..."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=int)
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out


# --------------------------------------------------------------------------
# k-means
# --------------------------------------------------------------------------

def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # all points coincide with a center
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r))
            idx = min(idx, n - 1)
        centers[c] = x[idx]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * x @ centers.T
        + (centers * centers).sum(axis=1)[None, :]
    )
    np.maximum(d2, 0.0, out=d2)
    labels = np.argmin(d2, axis=1)  # ties -> lowest center index
    return labels, d2

def _kmeans(x: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, float]:
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(x, k, rng)
    labels, d2 = _assign(x, centers)
    prev_inertia = math.inf
    for _ in range(MAX_KMEANS_ITER):
        # repair empty clusters by stealing the farthest point
        for c in range(k):
            if not (labels == c).any():
                far = int(np.argmax(d2[np.arange(len(labels)), labels]))
                labels[far] = c
        for c in range(k):
            centers[c] = x[labels == c].mean(axis=0)
        new_labels, d2 = _assign(x, centers)
        inertia = float(d2[np.arange(len(new_labels)), new_labels].sum())
        if inertia > prev_inertia * (1 + 1e-12) + 1e-12:
            raise AssertionError("k-means inertia increased across an iteration")
        prev_inertia = inertia
        if (new_labels == labels).all():
            labels = new_labels
            break
        labels = new_labels
    return labels, prev_inertia


# --------------------------------------------------------------------------
# Agglomerative (Lance-Williams over a dense distance matrix)
# --------------------------------------------------------------------------

def _agglomerative(x: np.ndarray, k: int, metric: str, linkage: str) -> np.ndarray:
    n = x.shape[0]
    d = pairwise_distances(x, metric=metric)
    active = list(range(n))  # cluster representative = smallest member index
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    dist = d.copy()
    np.fill_diagonal(dist, np.inf)

    while len(active) > k:
        # find the closest pair; ties break on the smallest (i, j)
        best = (math.inf, -1, -1)
        for ai in range(len(active)):
            i = active[ai]
            for aj in range(ai + 1, len(active)):
                j = active[aj]
                v = dist[i, j]
                if v < best[0] or (v == best[0] and (i, j) < (best[1], best[2])):
                    best = (v, i, j)
        _, i, j = best
        ni, nj = len(members[i]), len(members[j])
        for m in active:
            if m in (i, j):
                continue
            if linkage == "single":
                new = min(dist[i, m], dist[j, m])
            elif linkage == "complete":
                new = max(dist[i, m], dist[j, m])
            else:  # average
                new = (ni * dist[i, m] + nj * dist[j, m]) / (ni + nj)
            dist[i, m] = dist[m, i] = new
        members[i] = members[i] + members[j]
        del members[j]
        active.remove(j)

    labels = np.empty(n, dtype=int)
    for c, rep in enumerate(sorted(members)):
        labels[np.asarray(members[rep], dtype=int)] = c
    return labels


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def cluster(matrix: MaterializedMatrix, params: ClusteringParams) -> ClusteringResult:
    """Cluster the matrix rows; labels come back canonically relabeled."""
    n = matrix.n
    if params.k > n:
        raise AnalysisError(f"k={params.k} exceeds row count {n}")
    if params.algorithm == "kmeans":
        raw, inertia = _kmeans(matrix.data, params.k, params.seed)
    else:
        raw = _agglomerative(matrix.data, params.k, params.metric, params.linkage)
        inertia = None
    labels = canonical_labels(raw)
    sizes = tuple(int((labels == c).sum()) for c in range(params.k))
    return ClusteringResult(
        params=params, labels=labels, cluster_sizes=sizes, inertia=inertia
    )


def silhouette(
    matrix: MaterializedMatrix,
    labels,
    metric: str = "euclidean",
    sample_cap: int = SILHOUETTE_SAMPLE_CAP,
    seed: int = 0,
) -> SilhouetteScores:
    """Per-point silhouette s = (b - a) / max(a, b) and its mean.

    a is the mean intra-cluster distance (excluding self), b the smallest
    mean distance to another cluster. Singleton-cluster members score 0.
    Above ``sample_cap`` rows, scores come from a seeded uniform subsample.
    """
    labels = np.asarray(labels)
    n = matrix.n
    if len(labels) != n:
        raise AnalysisError("labels length must match matrix rows")
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise AnalysisError("silhouette needs at least 2 clusters")

    sampled = n > sample_cap
    if sampled:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(n, size=sample_cap, replace=False))
    else:
        idx = np.arange(n)
    sub_labels = labels[idx]
    present = np.unique(sub_labels)
    if len(present) < 2:
        raise AnalysisError("subsample lost all but one cluster; lower sample_cap")
    d = pairwise_distances(matrix.data[idx], metric=metric)

    # per-point distance sums to each cluster; d[i, i] == 0 so dividing the
    # own-cluster sum by (count - 1) is the mean excluding self
    masks = [sub_labels == u for u in present]
    counts = np.array([mask.sum() for mask in masks], dtype=np.float64)
    sums = np.column_stack([d[:, mask].sum(axis=1) for mask in masks])
    own_col = np.searchsorted(present, sub_labels)
    m = len(idx)
    rows = np.arange(m)
    own_counts = counts[own_col]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[rows, own_col] / (own_counts - 1.0)
    other_means = sums / counts[None, :]
    other_means[rows, own_col] = np.inf
    b = other_means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = np.where(denom > 0, (b - a) / denom, 0.0)
    scores[own_counts <= 1] = 0.0  # singleton-cluster members score 0
    return SilhouetteScores(
        per_point=scores,
        mean=float(scores.mean()),
        sampled=sampled,
        sample_indices=tuple(int(i) for i in idx) if sampled else (),
    )


def silhouette_sweep(
    matrix: MaterializedMatrix,
    params: ClusteringParams,
    k_range=None,
) -> tuple[tuple[int, float], ...]:
    """Mean silhouette for each k, same algorithm/metric/seed, ordered by k."""
    n = matrix.n
    if k_range is None:
        k_range = range(2, min(10, n - 1) + 1)
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise AnalysisError("empty k range")
    if ks[0] < 2 or ks[-1] > n - 1:
        raise AnalysisError(f"k range must stay within [2, {n - 1}]")
    out = []
    for k in ks:
        res = cluster(matrix, replace(params, k=k))
        sil = silhouette(
            matrix, res.labels, metric=params.effective_metric, seed=params.seed
        )
        out.append((k, sil.mean))
    return tuple(out)


def cluster_profile(matrix: MaterializedMatrix, labels) -> ClusterProfile:
    """features x clusters matrix of per-cluster means in original units,
    plus a per-feature-row [0, 1] normalization for color mapping."""
    labels = np.asarray(labels)
    if len(labels) != matrix.n:
        raise AnalysisError("labels length must match matrix rows")
    if matrix.standardized:
        raise AnalysisError("cluster_profile expects the matrix in original units")
    uniq = [int(u) for u in np.unique(labels)]
    means = np.column_stack(
        [matrix.data[labels == u].mean(axis=0) for u in uniq]
    )
    lo = means.min(axis=1, keepdims=True)
    hi = means.max(axis=1, keepdims=True)
    span = hi - lo
    with np.errstate(invalid="ignore", divide="ignore"):
        normalized = np.where(span > 0, (means - lo) / np.where(span == 0, 1, span), 0.5)
    return ClusterProfile(
        feature_ids=matrix.feature_ids,
        cluster_ids=tuple(uniq),
        means=means,
        normalized=normalized,
    )
