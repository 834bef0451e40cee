"""Pairwise distance metrics shared by projection, clustering and silhouettes."""

from __future__ import annotations

import numpy as np

from .errors import AnalysisError

METRICS = ("euclidean", "manhattan", "cosine", "correlation")


def _check(metric: str):
    if metric not in METRICS:
        raise AnalysisError(f"unknown metric {metric!r}; expected one of {METRICS}")


def pairwise_distances(x: np.ndarray, y: np.ndarray | None = None, metric: str = "euclidean") -> np.ndarray:
    """Dense |x| by |y| distance matrix (y defaults to x).

    correlation distance needs non-constant rows and cosine non-zero rows;
    degenerate rows raise AnalysisError.
    """
    _check(metric)
    x = np.asarray(x, dtype=np.float64)
    symmetric = y is None
    y = x if y is None else np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2:
        raise AnalysisError("pairwise_distances expects 2-D arrays")

    if metric == "euclidean":
        sq = (
            np.sum(x * x, axis=1)[:, None]
            + np.sum(y * y, axis=1)[None, :]
            - 2.0 * (x @ y.T)
        )
        np.maximum(sq, 0.0, out=sq)
        d = np.sqrt(sq)
    elif metric == "manhattan":
        d = np.abs(x[:, None, :] - y[None, :, :]).sum(axis=2)
    elif metric == "cosine":
        nx = np.linalg.norm(x, axis=1)
        ny = np.linalg.norm(y, axis=1)
        if (nx == 0).any() or (ny == 0).any():
            raise AnalysisError("cosine metric undefined for zero-norm rows")
        d = 1.0 - (x @ y.T) / np.outer(nx, ny)
        np.clip(d, 0.0, 2.0, out=d)
    else:  # correlation
        xc = x - x.mean(axis=1, keepdims=True)
        yc = y - y.mean(axis=1, keepdims=True)
        nx = np.linalg.norm(xc, axis=1)
        ny = np.linalg.norm(yc, axis=1)
        if (nx == 0).any() or (ny == 0).any():
            raise AnalysisError("correlation metric undefined for zero-variance rows")
        d = 1.0 - (xc @ yc.T) / np.outer(nx, ny)
        np.clip(d, 0.0, 2.0, out=d)

    if symmetric:
        d = (d + d.T) / 2.0  # kill float asymmetry
        np.fill_diagonal(d, 0.0)
    return d


def point_distances(x: np.ndarray, point: np.ndarray, metric: str = "euclidean") -> np.ndarray:
    """Distances from every row of x to a single point."""
    return pairwise_distances(x, point[None, :], metric=metric)[:, 0]
