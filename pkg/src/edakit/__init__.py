"""edakit: a collaborative exploratory data analysis engine.

Typed datasets with a filter DSL, distribution/correlation/significance
statistics, PCA and classical-MDS projections with prolines and
forward/backward what-if projection, deterministic clustering with
silhouette validation, feature ranking, and an event-sourced collaborative
session served over websockets.
"""

from .cluster import (
    ClusteringParams,
    ClusteringResult,
    cluster,
    cluster_profile,
    silhouette,
    silhouette_sweep,
)
from .command import Command, parse_command, print_command
from .dataset import (
    Dataset,
    MaterializedMatrix,
    engineer_feature,
    load_csv,
    materialize,
)
from .errors import (
    AnalysisError,
    CommandError,
    DataError,
    EdakitError,
    FilterError,
    RevisionConflict,
    SessionError,
    SnapshotError,
    UnsupportedOperation,
)
from .filters import FilterExpr, apply_filter, parse_filter, print_filter
from .reduce import (
    ProjectionParams,
    ProjectionResult,
    backward_project,
    distance_matrix,
    forward_project,
    project,
    prolines,
)
from .select import FeatureRanking, auto_select, rank_features
from .session import (
    Event,
    SessionState,
    Solution,
    apply_event,
    create_solution,
    new_session,
    overview,
    restore,
    snapshot,
)
from .stats import (
    CorrelationResult,
    FeatureSummary,
    SignificanceResult,
    compare_distributions,
    correlations,
    outlier_flags,
    significance,
    summarize,
)

__version__ = "0.1.0"
