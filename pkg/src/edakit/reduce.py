"""Dimensionality reduction to 2-D/3-D with interpretability aids.

PCA (SVD with a deterministic sign fix) and classical MDS (double-centered
squared distances). A ProjectionResult stores the centering/scaling it was
fitted with, so points can be mapped forward (what-if perturbations) and
backward (drag a point, recover the minimal feature change) without
refitting. Prolines are per-feature sweep axes drawn in projection space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

import numpy as np

from .dataset import MaterializedMatrix
from .errors import AnalysisError, CancelledError, UnsupportedOperation
from .metrics import METRICS, pairwise_distances
from .stats import FeatureSummary

ALGORITHMS = ("pca", "cmds")
DEFAULT_DISTANCE_CAP = 512
TRAJECTORY_STEPS = 10  # interpolation steps -> 11 samples
DEFAULT_PROLINE_STEPS = 11


@dataclass(frozen=True)
class ProjectionParams:
    algorithm: str = "pca"
    dims: int = 2
    metric: str = "euclidean"  # cmds only; ignored for pca
    standardize: bool = True

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise AnalysisError(f"unknown projection algorithm {self.algorithm!r}")
        if self.dims not in (2, 3):
            raise AnalysisError("dims must be 2 or 3")
        if self.metric not in METRICS:
            raise AnalysisError(f"unknown metric {self.metric!r}")

    def to_payload(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "dims": self.dims,
            "metric": self.metric,
            "standardize": self.standardize,
        }

    @staticmethod
    def from_payload(d: Mapping) -> "ProjectionParams":
        return ProjectionParams(
            algorithm=d.get("algorithm", "pca"),
            dims=int(d.get("dims", 2)),
            metric=d.get("metric", "euclidean"),
            standardize=bool(d.get("standardize", True)),
        )


@dataclass(frozen=True)
class ProlineAxis:
    feature_id: str
    polyline: np.ndarray  # steps x dims
    tick_positions: tuple[float, ...]  # fractional indices of min,q1,median,q3,max
    relevance: float  # arc length
    zero_length: bool = False

    def to_payload(self) -> dict:
        return {
            "feature": self.feature_id,
            "polyline": [[float(v) for v in p] for p in self.polyline],
            "ticks": list(self.tick_positions),
            "relevance": self.relevance,
            "zero_length": self.zero_length,
        }

    @staticmethod
    def from_payload(d: Mapping) -> "ProlineAxis":
        return ProlineAxis(
            feature_id=d["feature"],
            polyline=np.asarray(d["polyline"], dtype=np.float64),
            tick_positions=tuple(float(t) for t in d["ticks"]),
            relevance=float(d["relevance"]),
            zero_length=bool(d.get("zero_length", False)),
        )


@dataclass(frozen=True)
class DistanceMatrixView:
    order: tuple[int, ...]  # permutation of matrix positions, by (label, position)
    row_ids: tuple[int, ...]  # dataset row ids in that order
    values: np.ndarray  # m x m, m <= cap
    cap: int
    aggregated: bool

    def to_payload(self) -> dict:
        return {
            "order": list(self.order),
            "row_ids": list(self.row_ids),
            "values": [[float(v) for v in row] for row in self.values],
            "cap": self.cap,
            "aggregated": self.aggregated,
        }

    @staticmethod
    def from_payload(d: Mapping) -> "DistanceMatrixView":
        return DistanceMatrixView(
            order=tuple(int(i) for i in d["order"]),
            row_ids=tuple(int(i) for i in d["row_ids"]),
            values=np.asarray(d["values"], dtype=np.float64),
            cap=int(d["cap"]),
            aggregated=bool(d["aggregated"]),
        )


@dataclass(frozen=True)
class ProjectionResult:
    algorithm: str
    dims: int
    metric: str
    standardized: bool
    row_ids: tuple[int, ...]
    feature_ids: tuple[str, ...]
    coords: np.ndarray  # n x dims
    column_means: np.ndarray  # in source units
    column_scales: np.ndarray  # divisors applied after centering (1.0 if none)
    components: np.ndarray | None = None  # dims x f (pca)
    explained_variance_ratio: tuple[float, ...] = ()  # pca
    eigenvalues: tuple[float, ...] = ()  # cmds spectrum, descending
    negative_eigenvalues_clamped: bool = False
    prolines: tuple[ProlineAxis, ...] = ()
    distance_view: DistanceMatrixView | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def to_payload(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "dims": self.dims,
            "metric": self.metric,
            "standardize": self.standardized,
            "row_ids": list(self.row_ids),
            "features": list(self.feature_ids),
            "coords": [[float(v) for v in row] for row in self.coords],
            "centering": {
                "means": [float(v) for v in self.column_means],
                "scales": [float(v) for v in self.column_scales],
            },
            "prolines": [p.to_payload() for p in self.prolines],
        }
        if self.components is not None:
            out["components"] = [[float(v) for v in row] for row in self.components]
            out["explained_variance_ratio"] = list(self.explained_variance_ratio)
        if self.algorithm == "cmds":
            out["eigenvalues"] = list(self.eigenvalues)
            out["negative_eigenvalues_clamped"] = self.negative_eigenvalues_clamped
        if self.distance_view is not None:
            out["distance_matrix"] = self.distance_view.to_payload()
        return out

    @staticmethod
    def from_payload(d: Mapping) -> "ProjectionResult":
        return ProjectionResult(
            algorithm=d["algorithm"],
            dims=int(d["dims"]),
            metric=d.get("metric", "euclidean"),
            standardized=bool(d.get("standardize", False)),
            row_ids=tuple(int(r) for r in d["row_ids"]),
            feature_ids=tuple(d["features"]),
            coords=np.asarray(d["coords"], dtype=np.float64),
            column_means=np.asarray(d["centering"]["means"], dtype=np.float64),
            column_scales=np.asarray(d["centering"]["scales"], dtype=np.float64),
            components=(
                np.asarray(d["components"], dtype=np.float64)
                if "components" in d
                else None
            ),
            explained_variance_ratio=tuple(
                float(v) for v in d.get("explained_variance_ratio", ())
            ),
            eigenvalues=tuple(float(v) for v in d.get("eigenvalues", ())),
            negative_eigenvalues_clamped=bool(
                d.get("negative_eigenvalues_clamped", False)
            ),
            prolines=tuple(
                ProlineAxis.from_payload(p) for p in d.get("prolines", ())
            ),
            distance_view=(
                DistanceMatrixView.from_payload(d["distance_matrix"])
                if "distance_matrix" in d
                else None
            ),
        )


def _check_cancel(cancel: Callable[[], bool] | None):
    if cancel is not None and cancel():
        raise CancelledError("projection cancelled")


def _sign_fix(components: np.ndarray, coords: np.ndarray):
    """Flip each component so its largest-magnitude loading is positive."""
    for d in range(components.shape[0]):
        i = int(np.argmax(np.abs(components[d])))
        if components[d, i] < 0:
            components[d] = -components[d]
            coords[:, d] = -coords[:, d]


def project(
    matrix: MaterializedMatrix,
    params: ProjectionParams,
    cancel: Callable[[], bool] | None = None,
) -> ProjectionResult:
    """Fit the projection and return coordinates plus the fitted transform.

    ``cancel`` is polled between matrix-scale phases; when it returns True
    the call raises CancelledError.
    """
    data = matrix.data
    n, f = data.shape
    if n < params.dims + 1:
        raise AnalysisError(f"need at least dims+1={params.dims + 1} rows, got {n}")
    if params.dims > f:
        raise AnalysisError(f"dims={params.dims} exceeds feature count {f}")

    means = data.mean(axis=0)
    stds = data.std(axis=0)
    if params.standardize:
        scales = np.where(stds == 0.0, 1.0, stds)  # constant columns stay unscaled
    else:
        scales = np.ones(f)
    z = (data - means) / scales
    _check_cancel(cancel)

    if params.algorithm == "cmds":
        # distances are taken on the standardized data when asked, otherwise
        # on the raw data: column-centering would silently change the
        # cosine/correlation geometry
        return _project_cmds(matrix, params, z if params.standardize else data,
                             means, scales, cancel)

    if params.algorithm == "pca":
        u, s, vt = np.linalg.svd(z, full_matrices=False)
        _check_cancel(cancel)
        if params.dims > len(s):
            raise AnalysisError(f"dims={params.dims} exceeds available rank {len(s)}")
        components = vt[: params.dims].copy()
        coords = z @ components.T
        _sign_fix(components, coords)
        total = float((s * s).sum())
        evr = tuple(
            float(s[d] ** 2 / total) if total > 0 else 0.0 for d in range(params.dims)
        )
        return ProjectionResult(
            algorithm="pca",
            dims=params.dims,
            metric=params.metric,
            standardized=params.standardize,
            row_ids=matrix.row_ids,
            feature_ids=matrix.feature_ids,
            coords=coords,
            column_means=means,
            column_scales=scales,
            components=components,
            explained_variance_ratio=evr,
        )

    raise AnalysisError(f"unknown projection algorithm {params.algorithm!r}")


def _project_cmds(matrix, params, points, means, scales, cancel):
    # classical MDS: double-center the squared distance matrix
    d = pairwise_distances(points, metric=params.metric)
    _check_cancel(cancel)
    d2 = d * d
    row_mean = d2.mean(axis=1, keepdims=True)
    col_mean = d2.mean(axis=0, keepdims=True)
    b = -0.5 * (d2 - row_mean - col_mean + d2.mean())
    evals, evecs = np.linalg.eigh(b)
    _check_cancel(cancel)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    top = evals[: params.dims]
    clamped = bool((top < 0).any())
    lam = np.maximum(top, 0.0)
    coords = evecs[:, : params.dims] * np.sqrt(lam)[None, :]
    # canonical orientation: largest-magnitude coordinate positive per axis
    for dd in range(params.dims):
        i = int(np.argmax(np.abs(coords[:, dd])))
        if coords[i, dd] < 0:
            coords[:, dd] = -coords[:, dd]
    return ProjectionResult(
        algorithm="cmds",
        dims=params.dims,
        metric=params.metric,
        standardized=params.standardize,
        row_ids=matrix.row_ids,
        feature_ids=matrix.feature_ids,
        coords=coords,
        column_means=means,
        column_scales=scales,
        eigenvalues=tuple(float(v) for v in evals),
        negative_eigenvalues_clamped=clamped,
    )


# --------------------------------------------------------------------------
# Forward / backward projection (pca only)
# --------------------------------------------------------------------------

def _require_linear(projection: ProjectionResult, op: str):
    if projection.algorithm != "pca" or projection.components is None:
        raise UnsupportedOperation(f"{op} requires a pca projection")


def transform_points(projection: ProjectionResult, points: np.ndarray) -> np.ndarray:
    """Apply the stored centering/scaling and linear map to raw-unit points."""
    _require_linear(projection, "transform_points")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    z = (pts - projection.column_means) / projection.column_scales
    return z @ projection.components.T


def _perturbation_vector(
    projection: ProjectionResult, perturbation: Mapping[str, float]
) -> np.ndarray:
    delta = np.zeros(len(projection.feature_ids))
    for fid, dv in perturbation.items():
        try:
            j = projection.feature_ids.index(fid)
        except ValueError:
            raise AnalysisError(f"feature {fid!r} not enabled in this projection") from None
        delta[j] = float(dv)
    return delta


def forward_project(
    projection: ProjectionResult,
    point: np.ndarray,
    perturbation: Mapping[str, float],
) -> np.ndarray:
    """Coordinate trajectory for a feature perturbation of one data point.

    Returns 11 samples: the current position, 9 interpolated positions and
    the perturbed endpoint, for animation.
    """
    _require_linear(projection, "forward projection")
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (len(projection.feature_ids),):
        raise AnalysisError("point length must match enabled features")
    delta = _perturbation_vector(projection, perturbation)
    start = transform_points(projection, point)[0]
    end = transform_points(projection, point + delta)[0]
    t = np.linspace(0.0, 1.0, TRAJECTORY_STEPS + 1)[:, None]
    return start[None, :] * (1.0 - t) + end[None, :] * t


@dataclass(frozen=True)
class BackwardResult:
    delta: np.ndarray  # original units, full feature vector (frozen -> 0)
    delta_scaled: np.ndarray  # in standardized units
    residual: float
    feasible: bool

    def to_payload(self, feature_ids: Iterable[str]) -> dict:
        return {
            "delta": {fid: float(d) for fid, d in zip(feature_ids, self.delta)},
            "residual": self.residual,
            "feasible": self.feasible,
        }


def backward_project(
    projection: ProjectionResult,
    point: np.ndarray,
    target: np.ndarray,
    frozen: Iterable[str] = (),
    feasibility_tol: float = 1e-9,
) -> BackwardResult:
    """Minimum-norm feature change moving ``point`` to ``target`` coords.

    The norm is minimized in standardized units over the non-frozen
    features (pseudoinverse of the loading submatrix). When the free
    loadings cannot reach the target the least-squares minimizer is
    returned with its residual and feasible=False.
    """
    _require_linear(projection, "backward projection")
    point = np.asarray(point, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (projection.dims,):
        raise AnalysisError("target must have `dims` coordinates")
    frozen = set(frozen)
    unknown = frozen - set(projection.feature_ids)
    if unknown:
        raise AnalysisError(f"frozen feature(s) not in projection: {sorted(unknown)}")
    free_idx = [
        j for j, fid in enumerate(projection.feature_ids) if fid not in frozen
    ]
    if not free_idx:
        raise AnalysisError("all features frozen")

    w_free = projection.components[:, free_idx]
    gap = target - transform_points(projection, point)[0]
    u = np.linalg.pinv(w_free) @ gap
    residual = float(np.linalg.norm(w_free @ u - gap))

    delta_scaled = np.zeros(len(projection.feature_ids))
    delta_scaled[free_idx] = u
    delta = delta_scaled * projection.column_scales
    return BackwardResult(
        delta=delta,
        delta_scaled=delta_scaled,
        residual=residual,
        feasible=residual <= feasibility_tol,
    )


# --------------------------------------------------------------------------
# Prolines
# --------------------------------------------------------------------------

def prolines(
    projection: ProjectionResult,
    summaries: list[FeatureSummary],
    steps: int = DEFAULT_PROLINE_STEPS,
) -> tuple[ProlineAxis, ...]:
    """Per-feature sweep axes through the median synthetic point.

    Each axis sweeps one feature from its min to its max over ``steps``
    sample points while the other features stay at their medians; the
    projected polyline shows the feature's direction, and its arc length is
    the relevance. Zero-variance features yield a flagged zero-length axis.
    """
    _require_linear(projection, "prolines")
    if steps < 2:
        raise AnalysisError("steps must be >= 2")
    by_id = {s.feature_id: s for s in summaries}
    missing = [fid for fid in projection.feature_ids if fid not in by_id]
    if missing:
        raise AnalysisError(f"summaries missing for feature(s) {missing}")
    anchor = np.array([by_id[fid].median for fid in projection.feature_ids])

    axes = []
    for j, fid in enumerate(projection.feature_ids):
        s = by_id[fid]
        if s.max == s.min:
            base = transform_points(projection, anchor)[0]
            poly = np.tile(base, (steps, 1))
            axes.append(ProlineAxis(fid, poly, (0.0, 0.0, 0.0, 0.0, 0.0), 0.0, True))
            continue
        sweep = np.linspace(s.min, s.max, steps)
        pts = np.tile(anchor, (steps, 1))
        pts[:, j] = sweep
        poly = transform_points(projection, pts)
        seglen = np.linalg.norm(np.diff(poly, axis=0), axis=1)
        span = s.max - s.min
        ticks = tuple(
            float((q - s.min) / span * (steps - 1))
            for q in (s.min, s.q1, s.median, s.q3, s.max)
        )
        axes.append(ProlineAxis(fid, poly, ticks, float(seglen.sum()), False))
    return tuple(axes)


def with_prolines(
    projection: ProjectionResult,
    summaries: list[FeatureSummary],
    steps: int = DEFAULT_PROLINE_STEPS,
) -> ProjectionResult:
    return replace(projection, prolines=prolines(projection, summaries, steps))


# --------------------------------------------------------------------------
# Cluster-sorted distance heatmap
# --------------------------------------------------------------------------

def distance_matrix(
    matrix: MaterializedMatrix,
    metric: str = "euclidean",
    labels=None,
    cap: int = DEFAULT_DISTANCE_CAP,
    cancel: Callable[[], bool] | None = None,
) -> DistanceMatrixView:
    """Pairwise distances with rows/columns sorted by (cluster label, row).

    When n exceeds ``cap`` contiguous blocks of the sorted order are
    averaged so the output stays at most cap x cap.
    """
    n = matrix.n
    if labels is None:
        labels = np.zeros(n, dtype=int)
    labels = np.asarray(labels)
    if len(labels) != n:
        raise AnalysisError("labels length must match matrix rows")
    if cap < 1:
        raise AnalysisError("cap must be >= 1")

    positions = np.arange(n)
    order = np.lexsort((positions, labels))  # stable (label, position)
    x = matrix.data[order]

    if n <= cap:
        values = pairwise_distances(x, metric=metric)
        aggregated = False
    else:
        blocks = np.array_split(positions, cap)
        starts = np.array([b[0] for b in blocks])
        sizes = np.array([len(b) for b in blocks], dtype=np.float64)
        m = len(blocks)
        values = np.zeros((m, m))
        for i, b in enumerate(blocks):
            _check_cancel(cancel)
            rows = pairwise_distances(x[b], x, metric=metric)
            sums = np.add.reduceat(rows, starts, axis=1).sum(axis=0)
            values[i, :] = sums / (len(b) * sizes)
        values = (values + values.T) / 2.0
        aggregated = True

    return DistanceMatrixView(
        order=tuple(int(i) for i in order),
        row_ids=tuple(matrix.row_ids[i] for i in order),
        values=values,
        cap=cap,
        aggregated=aggregated,
    )
