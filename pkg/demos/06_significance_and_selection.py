"""Score features against cluster labels (ANOVA / chi-squared) and select
the most relevant ones automatically.

Run: python demos/06_significance_and_selection.py
"""

import numpy as np

from edakit import auto_select, rank_features, significance
from edakit.dataset import MaterializedMatrix

rng = np.random.default_rng(9)
n = 200
labels = rng.integers(0, 3, size=n)
labels[:3] = [0, 1, 2]
data = np.column_stack([
    labels * 2.0 + rng.normal(0, 0.5, n),   # strongly separated
    labels * 0.4 + rng.normal(0, 1.0, n),   # weakly separated
    rng.normal(0, 1.0, n),                  # pure noise
    rng.normal(5, 0.01, n),                 # nearly constant
])
matrix = MaterializedMatrix(
    row_ids=tuple(range(n)),
    feature_ids=("separator", "hint", "noise", "flatline"),
    data=data,
    standardized=False,
    column_means=data.mean(axis=0),
    column_stds=data.std(axis=0),
    zero_variance=(False, False, False, False),
)

print("one-way ANOVA against the 3 cluster labels:")
for e in significance(matrix, labels, "anova").entries:
    print(f"  {e.feature_id:10s} F={e.statistic:9.2f} p={e.p_value:.2e} eta2={e.effect_size:.3f}")

print("\nchi-squared scoring (features shifted non-negative):")
for e in significance(matrix, labels, "chi2").entries:
    print(f"  {e.feature_id:10s} chi2={e.statistic:9.2f} p={e.p_value:.2e} V={e.effect_size:.3f}")

ranking = rank_features(matrix, "anova", labels=labels)
print("\nANOVA ranking:", [e.feature_id for e in ranking.entries])
print("auto-select top 2:", auto_select(ranking, 2))

grouped = rank_features(matrix, "agglomerate", top_n=3)
print("\nfeature agglomeration into 3 groups (1 - |r| distance):")
for i, group in enumerate(grouped.groups):
    print(f"  group {i}: {group}")
print("one representative per group:", auto_select(grouped, 3))
