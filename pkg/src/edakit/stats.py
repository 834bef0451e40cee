"""Distribution summaries, outlier flags, correlations and significance tests.

All functions are pure and operate on a MaterializedMatrix. Quartiles use
the inclusive linear-interpolation method; histograms are equal-width over
[min, max] with the max value included in the last bin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import MaterializedMatrix
from .errors import AnalysisError
from .special import chi2_sf, f_sf

ROBUST_Z_CUTOFF = 3.5
MAD_SCALE = 1.4826
MEANAD_SCALE = 1.253314  # sqrt(pi/2), consistency constant for the mean abs dev
DEFAULT_BINS = 20


@dataclass(frozen=True)
class FeatureSummary:
    feature_id: str
    count: int
    mean: float
    std: float  # sample std (n-1)
    min: float
    q1: float
    median: float
    q3: float
    max: float
    bin_edges: tuple[float, ...]  # k+1 edges, strictly increasing
    counts: tuple[int, ...]  # k bin counts
    outlier_count: int

    def to_payload(self) -> dict:
        return {
            "feature": self.feature_id,
            "count": self.count,
            "mean": _json_num(self.mean),
            "std": _json_num(self.std),
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "histogram": {"edges": list(self.bin_edges), "counts": list(self.counts)},
            "outlier_count": self.outlier_count,
        }


@dataclass(frozen=True)
class CorrelationResult:
    feature_ids: tuple[str, ...]
    matrix: np.ndarray  # f x f Pearson r
    top_pairs: tuple[tuple[str, str, float], ...]
    degenerate_features: tuple[str, ...]  # constant features, r forced to 0

    def to_payload(self) -> dict:
        return {
            "features": list(self.feature_ids),
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "top_pairs": [
                {"a": a, "b": b, "r": float(r)} for a, b, r in self.top_pairs
            ],
            "degenerate_features": list(self.degenerate_features),
        }


@dataclass(frozen=True)
class SignificanceEntry:
    feature_id: str
    statistic: float
    p_value: float
    effect_size: float
    degenerate: bool


@dataclass(frozen=True)
class SignificanceResult:
    method: str  # "anova" | "chi2"
    entries: tuple[SignificanceEntry, ...]

    def entry(self, feature_id: str) -> SignificanceEntry:
        for e in self.entries:
            if e.feature_id == feature_id:
                return e
        raise AnalysisError(f"no significance entry for {feature_id!r}")

    def to_payload(self) -> dict:
        return {
            "method": self.method,
            "entries": [
                {
                    "feature": e.feature_id,
                    "statistic": _json_num(e.statistic),
                    "p_value": e.p_value,
                    "effect_size": e.effect_size,
                    "degenerate": e.degenerate,
                }
                for e in self.entries
            ],
        }


def _json_num(v: float):
    """Strict JSON has no Infinity/NaN; degenerate flags carry the meaning."""
    return float(v) if math.isfinite(v) else None


# --------------------------------------------------------------------------
# Summaries
# --------------------------------------------------------------------------

def _quartiles(values: np.ndarray) -> tuple[float, float, float]:
    q1, med, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    return float(q1), float(med), float(q3)


def _histogram(values: np.ndarray, bins: int, edges: np.ndarray | None = None):
    if edges is None:
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            # degenerate single-value column: one bin around the value
            edges = np.array([lo - 0.5, hi + 0.5])
        else:
            edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    return edges, counts


def _outlier_mask_1d(values: np.ndarray) -> np.ndarray:
    # robust z around the median; when more than half the values coincide
    # (MAD == 0) fall back to the scaled mean absolute deviation so a lone
    # spike is still caught, and flag nothing on a constant column
    dev = np.abs(values - np.median(values))
    mad = np.median(dev)
    if mad > 0.0:
        z = dev / (MAD_SCALE * mad)
    else:
        meanad = dev.mean()
        if meanad == 0.0:
            return np.zeros(len(values), dtype=bool)
        z = dev / (MEANAD_SCALE * meanad)
    return z > ROBUST_Z_CUTOFF


def _summary_for(feature_id: str, values: np.ndarray, bins: int,
                 edges: np.ndarray | None = None) -> FeatureSummary:
    q1, med, q3 = _quartiles(values)
    e, counts = _histogram(values, bins, edges)
    n = len(values)
    return FeatureSummary(
        feature_id=feature_id,
        count=n,
        mean=float(values.mean()),
        std=float(values.std(ddof=1)) if n > 1 else 0.0,
        min=float(values.min()),
        q1=q1,
        median=med,
        q3=q3,
        max=float(values.max()),
        bin_edges=tuple(float(x) for x in e),
        counts=tuple(int(c) for c in counts),
        outlier_count=int(_outlier_mask_1d(values).sum()),
    )


def summarize(matrix: MaterializedMatrix, bins: int = DEFAULT_BINS) -> list[FeatureSummary]:
    """Per-feature summary statistics, quartiles and histogram."""
    if bins < 1:
        raise AnalysisError("bins must be >= 1")
    return [
        _summary_for(fid, matrix.data[:, j], bins)
        for j, fid in enumerate(matrix.feature_ids)
    ]


def compare_distributions(
    matrix: MaterializedMatrix, group_rows, bins: int = DEFAULT_BINS
) -> list[tuple[FeatureSummary, FeatureSummary]]:
    """Per-feature (group summary, global summary) pairs.

    Group histograms reuse the global bin edges so overlays align.
    """
    group = sorted(set(int(r) for r in group_rows))
    if not group:
        raise AnalysisError("empty group")
    pos = {rid: i for i, rid in enumerate(matrix.row_ids)}
    try:
        gidx = np.array([pos[r] for r in group], dtype=np.intp)
    except KeyError as exc:
        raise AnalysisError(f"group row {exc.args[0]} not in matrix") from None
    out = []
    for j, fid in enumerate(matrix.feature_ids):
        col = matrix.data[:, j]
        glob = _summary_for(fid, col, bins)
        gsum = _summary_for(fid, col[gidx], bins, edges=np.asarray(glob.bin_edges))
        out.append((gsum, glob))
    return out


def outlier_flags(matrix: MaterializedMatrix) -> tuple[np.ndarray, np.ndarray]:
    """(n x f boolean flags, per-row flagged-cell counts).

    A cell is flagged when its robust z-score |x - median| / (1.4826 * MAD)
    exceeds 3.5; features with MAD == 0 get no flags.
    """
    flags = np.zeros(matrix.data.shape, dtype=bool)
    for j in range(matrix.f):
        flags[:, j] = _outlier_mask_1d(matrix.data[:, j])
    return flags, flags.sum(axis=1)


# --------------------------------------------------------------------------
# Correlations
# --------------------------------------------------------------------------

def correlations(matrix: MaterializedMatrix, top_k: int = 10) -> CorrelationResult:
    """Pearson correlation matrix plus the strongest |r| pairs.

    Pairs involving a constant feature get r = 0 and the feature is listed
    as degenerate.
    """
    if matrix.n < 2:
        raise AnalysisError("correlations need at least 2 rows")
    data = matrix.data
    f = matrix.f
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    constant = norms == 0.0
    safe = np.where(constant, 1.0, norms)
    r = (centered.T @ centered) / np.outer(safe, safe)
    np.clip(r, -1.0, 1.0, out=r)
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    np.fill_diagonal(r, np.where(constant, 0.0, 1.0))
    r = (r + r.T) / 2.0

    pairs = []
    for i in range(f):
        for j in range(i + 1, f):
            pairs.append((i, j, float(r[i, j])))
    pairs.sort(key=lambda t: (-abs(t[2]), t[0], t[1]))
    top = tuple(
        (matrix.feature_ids[i], matrix.feature_ids[j], v)
        for i, j, v in pairs[: max(top_k, 0)]
    )
    return CorrelationResult(
        feature_ids=matrix.feature_ids,
        matrix=r,
        top_pairs=top,
        degenerate_features=tuple(
            fid for fid, c in zip(matrix.feature_ids, constant) if c
        ),
    )


# --------------------------------------------------------------------------
# Significance
# --------------------------------------------------------------------------

def _group_indices(labels: np.ndarray) -> list[np.ndarray]:
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise AnalysisError("significance needs at least 2 clusters")
    groups = [np.flatnonzero(labels == u) for u in uniq]
    if any(len(g) == 0 for g in groups):
        raise AnalysisError("empty cluster")
    return groups


def _anova_feature(col: np.ndarray, groups: list[np.ndarray]) -> SignificanceEntry:
    n = len(col)
    k = len(groups)
    grand = col.mean()
    ssb = 0.0
    ssw = 0.0
    for g in groups:
        vals = col[g]
        m = vals.mean()
        ssb += len(g) * (m - grand) ** 2
        ssw += float(((vals - m) ** 2).sum())
    sst = ssb + ssw
    eta2 = ssb / sst if sst > 0 else 0.0
    if ssb <= 0.0:
        return SignificanceEntry("", 0.0, 1.0, eta2, sst <= 0.0)
    if ssw <= 0.0:
        # perfect separation: F unbounded
        return SignificanceEntry("", math.inf, 0.0, eta2, True)
    fstat = (ssb / (k - 1)) / (ssw / (n - k))
    p = f_sf(fstat, k - 1, n - k)
    return SignificanceEntry("", fstat, p, eta2, False)


def _chi2_feature(col: np.ndarray, groups: list[np.ndarray]) -> SignificanceEntry:
    # shift to non-negative, score per-cluster sums against size-proportional
    # expectations (chi-squared with k-1 dof)
    k = len(groups)
    n = len(col)
    shifted = col - col.min()
    total = float(shifted.sum())
    if total <= 0.0:
        return SignificanceEntry("", 0.0, 1.0, 0.0, True)
    observed = np.array([float(shifted[g].sum()) for g in groups])
    expected = total * np.array([len(g) / n for g in groups])
    stat = float(((observed - expected) ** 2 / expected).sum())
    p = chi2_sf(stat, k - 1)
    # Cramer's V analog for the 1 x k sum table, clipped to [0, 1]
    v = math.sqrt(stat / (total * (k - 1))) if total > 0 else 0.0
    return SignificanceEntry("", stat, p, min(v, 1.0), False)


def significance(
    matrix: MaterializedMatrix, labels, method: str = "anova"
) -> SignificanceResult:
    """Per-feature one-way ANOVA F or chi-squared scoring against labels.

    ANOVA reports eta squared as effect size; chi2 reports a Cramer's V
    analog. Degenerate conventions: SSB == 0 -> p = 1; SSW == 0 with
    SSB > 0 -> p = 0 with the degenerate flag set.
    """
    if method not in ("anova", "chi2"):
        raise AnalysisError(f"unknown significance method {method!r}")
    labels = np.asarray(labels)
    if len(labels) != matrix.n:
        raise AnalysisError("labels length must match matrix rows")
    groups = _group_indices(labels)
    if method == "anova" and matrix.n <= len(groups):
        raise AnalysisError("ANOVA needs n > k")
    score = _anova_feature if method == "anova" else _chi2_feature
    entries = []
    for j, fid in enumerate(matrix.feature_ids):
        e = score(matrix.data[:, j], groups)
        entries.append(
            SignificanceEntry(fid, e.statistic, e.p_value, e.effect_size, e.degenerate)
        )
    return SignificanceResult(method=method, entries=tuple(entries))
