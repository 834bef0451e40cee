"""What-if analysis on the projection: perturb a feature and watch the
point move (forward), or drag the point and recover the minimal feature
change (backward).

Run: python demos/05_whatif_projection.py
"""

import numpy as np

from edakit import ProjectionParams, backward_project, forward_project, project
from edakit.reduce import transform_points
from edakit.dataset import MaterializedMatrix

rng = np.random.default_rng(12)
n = 80
data = np.column_stack([
    rng.normal(60, 10, n),    # weight
    rng.normal(8000, 2500, n),  # steps
    rng.normal(6.5, 1.0, n),  # sleep
])
matrix = MaterializedMatrix(
    row_ids=tuple(range(n)),
    feature_ids=("weight", "steps", "sleep"),
    data=data,
    standardized=False,
    column_means=data.mean(axis=0),
    column_stds=data.std(axis=0),
    zero_variance=(False, False, False),
)
proj = project(matrix, ProjectionParams("pca", dims=2, standardize=True))

point = data[10]
print("subject 10 sits at", np.round(transform_points(proj, point)[0], 3))

traj = forward_project(proj, point, {"steps": 4000.0})
print("\nforward: increasing steps by 4000 animates through 11 samples:")
for i in (0, 5, 10):
    print(f"  t={i/10:.1f} -> {np.round(traj[i], 3)}")

target = traj[-1] + np.array([0.3, -0.2])
out = backward_project(proj, point, target)
print(f"\nbackward: dragging to {np.round(target, 3)} needs "
      f"(residual {out.residual:.2e}, feasible={out.feasible}):")
for fid, delta in zip(proj.feature_ids, out.delta):
    print(f"  {fid:8s} {delta:+10.2f}")

frozen = backward_project(proj, point, target, frozen=["weight", "sleep"])
print(f"\nsame drag with weight and sleep frozen -> only steps may move; "
      f"residual {frozen.residual:.3f} (feasible={frozen.feasible})")
for fid, delta in zip(proj.feature_ids, frozen.delta):
    if delta:
        print(f"  {fid:8s} {delta:+10.2f}")
