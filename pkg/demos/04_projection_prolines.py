"""Project to 2-D with PCA and classical MDS, read prolines, and build the
cluster-sorted distance heatmap.

Run: python demos/04_projection_prolines.py
"""

import numpy as np

from edakit import ClusteringParams, ProjectionParams, cluster, distance_matrix, project, prolines, summarize
from edakit.dataset import MaterializedMatrix

rng = np.random.default_rng(4)
n = 150
lat = rng.normal(size=(n, 2))
data = np.column_stack([
    lat[:, 0] * 3.0,
    lat[:, 0] * 2.9 + rng.normal(0, 0.1, n),  # nearly duplicates the first
    lat[:, 1],
    rng.normal(0, 0.05, n),                   # nearly noise
])
matrix = MaterializedMatrix(
    row_ids=tuple(range(n)),
    feature_ids=("load", "load_twin", "drift", "jitter"),
    data=data,
    standardized=False,
    column_means=data.mean(axis=0),
    column_stds=data.std(axis=0),
    zero_variance=(False, False, False, False),
)

pca = project(matrix, ProjectionParams("pca", dims=2, standardize=True))
print("pca explained variance ratio:", [round(v, 3) for v in pca.explained_variance_ratio])
print("components are orthonormal:",
      bool(np.abs(pca.components @ pca.components.T - np.eye(2)).max() < 1e-9))

axes = prolines(pca, summarize(matrix))
print("\nproline relevance (arc length in projection space):")
for axis in sorted(axes, key=lambda a: -a.relevance):
    print(f"  {axis.feature_id:10s} {axis.relevance:7.3f}"
          + ("  (zero length)" if axis.zero_length else ""))

cmds = project(matrix, ProjectionParams("cmds", dims=2, metric="manhattan"))
print(f"\ncmds (manhattan): top eigenvalues "
      f"{[round(v, 1) for v in cmds.eigenvalues[:3]]}, "
      f"negatives clamped: {cmds.negative_eigenvalues_clamped}")

labels = cluster(matrix, ClusteringParams("kmeans", k=3, seed=1)).labels
view = distance_matrix(matrix, "euclidean", labels, cap=64)
v = view.values
within = np.mean([v[i, i] for i in range(v.shape[0])])
print(f"\ndistance heatmap: {v.shape[0]}x{v.shape[1]} "
      f"(aggregated={view.aggregated}); diagonal-block mean {within:.2f} vs "
      f"overall {v.mean():.2f} -> compact clusters read as dark squares")
