"""Cluster, validate with silhouettes, sweep k, and read the profile
heatmap matrix.

Run: python demos/03_clustering_validation.py
"""

import numpy as np

from edakit import ClusteringParams, cluster, cluster_profile, silhouette, silhouette_sweep
from edakit.dataset import MaterializedMatrix

rng = np.random.default_rng(3)
blobs = [rng.normal(c, 0.4, size=(60, 3)) for c in (0.0, 4.0, 9.0)]
data = np.vstack(blobs)
matrix = MaterializedMatrix(
    row_ids=tuple(range(len(data))),
    feature_ids=("f_a", "f_b", "f_c"),
    data=data,
    standardized=False,
    column_means=data.mean(axis=0),
    column_stds=data.std(axis=0),
    zero_variance=(False, False, False),
)

result = cluster(matrix, ClusteringParams("kmeans", k=3, seed=42))
print(f"k-means k=3: sizes={result.cluster_sizes} inertia={result.inertia:.2f}")
print("labels are canonical: first row is cluster", result.labels[0])

scores = silhouette(matrix, result.labels)
print(f"mean silhouette {scores.mean:.3f} "
      f"(min {scores.per_point.min():.3f}, max {scores.per_point.max():.3f})")

print("\nsilhouette vs k (the elbow chart data):")
for k, s in silhouette_sweep(matrix, ClusteringParams("kmeans", k=2, seed=42), range(2, 7)):
    marker = " <- best" if s == max(v for _, v in silhouette_sweep(matrix, ClusteringParams("kmeans", k=2, seed=42), range(2, 7))) else ""
    print(f"  k={k}: {s:.3f}{marker}")

agg = cluster(matrix, ClusteringParams("agglomerative", k=3, metric="manhattan", linkage="complete"))
print(f"\nagglomerative (manhattan, complete): sizes={agg.cluster_sizes}")

profile = cluster_profile(matrix, result.labels)
print("\nprofile matrix (per-cluster feature means, original units):")
header = "            " + "".join(f"  c{c}   " for c in profile.cluster_ids)
print(header)
for fi, fid in enumerate(profile.feature_ids):
    cells = "".join(f"{profile.means[fi, ci]:6.2f} " for ci in range(len(profile.cluster_ids)))
    print(f"  {fid:8s} {cells}")
print("(normalized rows drive the red-high/blue-low heatmap in the UI)")
