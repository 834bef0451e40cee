"""Distribution summaries, aligned comparison overlays, outlier flags and
top correlations.

Run: python demos/02_distributions_and_outliers.py
"""

import numpy as np

from edakit import compare_distributions, correlations, outlier_flags, summarize
from edakit.dataset import MaterializedMatrix

rng = np.random.default_rng(11)
n = 300
base = rng.normal(0, 1, size=n)
data = np.column_stack([
    base,
    base * 0.8 + rng.normal(0, 0.3, size=n),  # correlated with the first
    rng.exponential(2.0, size=n),
    rng.normal(50, 5, size=n),
])
data[17, 3] = 120.0  # plant one wild value
matrix = MaterializedMatrix(
    row_ids=tuple(range(n)),
    feature_ids=("signal", "echo", "wait_time", "score"),
    data=data,
    standardized=False,
    column_means=data.mean(axis=0),
    column_stds=data.std(axis=0),
    zero_variance=(False, False, False, False),
)

print("per-feature summaries (20 bins):")
for s in summarize(matrix):
    print(f"  {s.feature_id:10s} mean={s.mean:7.2f} q1={s.q1:7.2f} "
          f"median={s.median:7.2f} q3={s.q3:7.2f} outliers={s.outlier_count}")

group = [i for i in range(n) if data[i, 0] > 0.5]
print(f"\ncomparing the {len(group)}-row high-signal group against everyone")
for gsum, glob in compare_distributions(matrix, group):
    print(f"  {gsum.feature_id:10s} group mean {gsum.mean:7.2f} vs global {glob.mean:7.2f} "
          f"(same bin edges: {gsum.bin_edges == glob.bin_edges})")

flags, row_scores = outlier_flags(matrix)
worst = int(np.argmax(row_scores))
print(f"\nrobust-z outliers: {int(flags.sum())} flagged cells; "
      f"row {worst} has {int(row_scores[worst])} flagged cell(s)")

corr = correlations(matrix, top_k=3)
print("\nstrongest correlations:")
for a, b, r in corr.top_pairs:
    print(f"  {a} ~ {b}: r = {r:+.3f}")
