/** Wire types for the session protocol. Field names mirror the server's
 * JSON payloads exactly; numbers are 64-bit floats, row ids 0-based ints. */

export type ViewKind =
  | "table"
  | "projection"
  | "clustering"
  | "distribution"
  | "correlation"
  | "feature_selection";

export interface ClusteringParamsDoc {
  algorithm: "kmeans" | "agglomerative";
  k: number;
  metric: string;
  linkage: string;
  seed: number;
}

export interface SilhouetteDoc {
  per_point: number[];
  mean: number;
  sampled: boolean;
  sample_indices: number[];
}

export interface ProfileDoc {
  features: string[];
  clusters: number[];
  means: number[][];
  normalized: number[][];
}

export interface ClusteringDoc {
  params: ClusteringParamsDoc;
  labels: number[];
  cluster_sizes: number[];
  inertia: number | null;
  silhouette?: SilhouetteDoc;
  silhouette_by_k: Array<[number, number]>;
  profile?: ProfileDoc;
}

export interface ProlineDoc {
  feature: string;
  polyline: number[][];
  ticks: number[];
  relevance: number;
  zero_length: boolean;
}

export interface DistanceMatrixDoc {
  order: number[];
  row_ids: number[];
  values: number[][];
  cap: number;
  aggregated: boolean;
}

export interface ProjectionDoc {
  algorithm: "pca" | "cmds";
  dims: 2 | 3;
  metric: string;
  standardize: boolean;
  row_ids: number[];
  features: string[];
  coords: number[][];
  centering: { means: number[]; scales: number[] };
  prolines: ProlineDoc[];
  components?: number[][];
  explained_variance_ratio?: number[];
  eigenvalues?: number[];
  negative_eigenvalues_clamped?: boolean;
  distance_matrix?: DistanceMatrixDoc;
}

export interface SolutionDoc {
  id: number;
  color: string;
  active_rows: number[];
  enabled_features: string[];
  standardize: boolean;
  selection: number[];
  isolation_stack: number[][];
  clustering_params: ClusteringParamsDoc | null;
  clustering: ClusteringDoc | null;
  projection_params: Record<string, unknown> | null;
  projection: ProjectionDoc | null;
  revision: number;
}

export interface BindingDoc {
  view_id: number;
  kind: ViewKind;
  solution_id: number;
  slots: number[];
  color?: string;
}

export interface SessionDoc {
  schema_version: number;
  dataset: { path: string; sha256: string; name: string };
  slot_count: number;
  solutions: SolutionDoc[];
  bindings: BindingDoc[];
}

export interface OverviewEntry {
  solution_id: number;
  color: string;
  revision: number;
  n_rows: number;
  n_features: number;
  algorithm: string | null;
  silhouette_mean: number | null;
  thumbnail: number[][] | null;
  profile: ProfileDoc | null;
}

export interface OverviewDoc {
  solutions: OverviewEntry[];
  ring: BindingDoc[];
}

export interface WhatIfDoc {
  row_id: number;
  perturbation?: Record<string, number>;
  trajectory?: number[][];
  target?: number[];
  delta?: Record<string, number>;
  residual?: number;
  feasible?: boolean;
}

export interface DeltaPayload {
  event: string;
  seq: number;
  client_id: string;
  solution_id?: number;
  solution?: SolutionDoc;
  affected_views?: number[];
  binding?: BindingDoc;
  ring?: BindingDoc[];
  what_if?: WhatIfDoc;
}

export interface RejectPayload {
  seq: number;
  code: "conflict" | "invalid" | "parse_error" | "internal";
  reason: string;
  offset?: number | null;
  suggestions?: string[] | null;
}

export interface SnapshotPayload {
  session: SessionDoc;
  dataset: { name: string; n_rows: number; n_cols: number; columns: unknown[] };
  overview: OverviewDoc;
  client_id?: string;
}

export type ServerMessage =
  | { v: 1; type: "snapshot"; revision: number; payload: SnapshotPayload }
  | { v: 1; type: "delta"; revision: number; payload: DeltaPayload }
  | { v: 1; type: "reject"; revision: number; payload: RejectPayload };

export interface ClientEvent {
  v: 1;
  type: string;
  seq: number;
  solution_id?: number;
  expected_revision?: number;
  payload?: Record<string, unknown>;
}

export interface CommandMessage {
  v: 1;
  type: "command";
  seq: number;
  text: string;
  context?: { selection?: number[]; focused_view?: number };
}

export interface TablePage {
  solution_id: number;
  revision: number;
  offset: number;
  total_rows: number;
  features: string[];
  row_ids: number[];
  cells: Array<Array<number | string | null>>;
  missing: boolean[][];
  outlier_flags: boolean[][];
  outlier_scores: number[];
  labels: Array<number | null>;
  selection: number[];
}
