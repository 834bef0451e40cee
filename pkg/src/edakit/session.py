"""Authoritative collaborative session state.

The session holds one dataset, a registry of solutions (independent
row/feature subsets with their own clustering and projection), view
bindings onto screen slots, and applies revisioned mutation events.
apply_event is a pure transition: replaying an event log from the initial
state reproduces the final state bit-exactly (all computation seeds travel
inside the events), which is what makes sessions reproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from . import reduce as reducemod
from . import stats as statsmod
from .cluster import (
    ClusteringParams,
    ClusteringResult,
    cluster_profile,
    silhouette as silhouette_scores,
    silhouette_sweep,
)
from .cluster import cluster as run_cluster
from .dataset import (
    DEFAULT_MISSING_TOKENS,
    Dataset,
    MaterializedMatrix,
    NUMERIC,
    engineer_feature,
    load_csv,
    materialize,
)
from .errors import RevisionConflict, SessionError, SnapshotError
from .filters import apply_filter, parse_filter

SCHEMA_VERSION = 1
DEFAULT_SLOT_COUNT = 15

# fixed 8-color palette, assigned to solutions round-robin
PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc949",
    "#b07aa1",
    "#ff9da7",
)

VIEW_KINDS = (
    "table",
    "projection",
    "clustering",
    "distribution",
    "correlation",
    "feature_selection",
)

MUTATION_EVENTS = frozenset(
    {
        "create_solution",
        "set_filter",
        "isolate",
        "undo_isolate",
        "reproject",
        "enable_features",
        "engineer_feature",
        "apply_clustering",
        "apply_projection",
        "select_points",
    }
)
VIEW_EVENTS = frozenset({"bind_view", "move_view", "extend_view", "clear_view"})
# notifications compute or signal without mutating state; highlight_views is
# the software stand-in for physically calling a solution's screens over
COMPUTE_EVENTS = frozenset({"forward_project", "backward_project", "highlight_views"})
EVENT_TYPES = MUTATION_EVENTS | VIEW_EVENTS | COMPUTE_EVENTS | {"snapshot"}


@dataclass(frozen=True)
class Event:
    type: str
    payload: dict = field(default_factory=dict)
    solution_id: int | None = None
    client_id: str = ""
    expected_revision: int | None = None
    seq: int = 0

    def to_wire(self) -> dict:
        return {
            "v": 1,
            "type": self.type,
            "seq": self.seq,
            "solution_id": self.solution_id,
            "expected_revision": self.expected_revision,
            "payload": self.payload,
        }

    @staticmethod
    def from_wire(d: Mapping, client_id: str = "") -> "Event":
        etype = d.get("type")
        if etype not in EVENT_TYPES:
            raise SessionError(f"unknown event type {etype!r}")
        sol = d.get("solution_id")
        exp = d.get("expected_revision")
        return Event(
            type=etype,
            payload=dict(d.get("payload") or {}),
            solution_id=None if sol is None else int(sol),
            client_id=client_id or str(d.get("client_id") or ""),
            expected_revision=None if exp is None else int(exp),
            seq=int(d.get("seq") or 0),
        )


@dataclass(frozen=True)
class ViewBinding:
    view_id: int
    kind: str
    solution_id: int
    slots: tuple[int, ...]

    def to_payload(self) -> dict:
        return {
            "view_id": self.view_id,
            "kind": self.kind,
            "solution_id": self.solution_id,
            "slots": list(self.slots),
        }


@dataclass(frozen=True)
class Solution:
    id: int
    color: str
    active_rows: frozenset[int]
    enabled_features: tuple[str, ...]
    standardize: bool = True
    selection: frozenset[int] = frozenset()
    isolation_stack: tuple[frozenset[int], ...] = ()
    clustering_params: ClusteringParams | None = None
    clustering: ClusteringResult | None = None
    projection_params: reducemod.ProjectionParams | None = None
    projection: reducemod.ProjectionResult | None = None
    revision: int = 0

    def to_payload(self) -> dict:
        return {
            "id": self.id,
            "color": self.color,
            "active_rows": sorted(self.active_rows),
            "enabled_features": list(self.enabled_features),
            "standardize": self.standardize,
            "selection": sorted(self.selection),
            "isolation_stack": [sorted(s) for s in self.isolation_stack],
            "clustering_params": (
                self.clustering_params.to_payload() if self.clustering_params else None
            ),
            "clustering": self.clustering.to_payload() if self.clustering else None,
            "projection_params": (
                self.projection_params.to_payload() if self.projection_params else None
            ),
            "projection": self.projection.to_payload() if self.projection else None,
            "revision": self.revision,
        }

    @staticmethod
    def from_payload(d: Mapping) -> "Solution":
        return Solution(
            id=int(d["id"]),
            color=d["color"],
            active_rows=frozenset(int(r) for r in d["active_rows"]),
            enabled_features=tuple(d["enabled_features"]),
            standardize=bool(d["standardize"]),
            selection=frozenset(int(r) for r in d["selection"]),
            isolation_stack=tuple(
                frozenset(int(r) for r in s) for s in d["isolation_stack"]
            ),
            clustering_params=(
                ClusteringParams.from_payload(d["clustering_params"])
                if d.get("clustering_params")
                else None
            ),
            clustering=(
                ClusteringResult.from_payload(d["clustering"])
                if d.get("clustering")
                else None
            ),
            projection_params=(
                reducemod.ProjectionParams.from_payload(d["projection_params"])
                if d.get("projection_params")
                else None
            ),
            projection=(
                reducemod.ProjectionResult.from_payload(d["projection"])
                if d.get("projection")
                else None
            ),
            revision=int(d["revision"]),
        )


@dataclass(frozen=True)
class SessionState:
    dataset: Dataset
    csv_options: dict = field(default_factory=dict)
    solutions: dict[int, Solution] = field(default_factory=dict)
    bindings: dict[int, ViewBinding] = field(default_factory=dict)
    next_solution_id: int = 0
    next_view_id: int = 0
    palette_cursor: int = 0
    slot_count: int = DEFAULT_SLOT_COUNT

    def solution(self, solution_id: int) -> Solution:
        try:
            return self.solutions[solution_id]
        except KeyError:
            raise SessionError(f"unknown solution {solution_id}") from None

    def binding(self, view_id: int) -> ViewBinding:
        try:
            return self.bindings[view_id]
        except KeyError:
            raise SessionError(f"unknown view {view_id}") from None

    def views_of(self, solution_id: int) -> list[int]:
        return sorted(
            vid for vid, b in self.bindings.items() if b.solution_id == solution_id
        )

    def occupied_slots(self, exclude_view: int | None = None) -> set[int]:
        out: set[int] = set()
        for vid, b in self.bindings.items():
            if vid != exclude_view:
                out.update(b.slots)
        return out


def new_session(
    dataset: Dataset,
    slot_count: int = DEFAULT_SLOT_COUNT,
    csv_options: dict | None = None,
) -> SessionState:
    return SessionState(
        dataset=dataset, csv_options=dict(csv_options or {}), slot_count=slot_count
    )


# --------------------------------------------------------------------------
# Engine plumbing
# --------------------------------------------------------------------------

def _numeric_features(sol: Solution, dataset: Dataset) -> list[str]:
    return [
        f for f in sol.enabled_features if dataset.column(f).kind == NUMERIC
    ]


def _matrix(state: SessionState, sol: Solution, standardize: bool) -> MaterializedMatrix:
    feats = _numeric_features(sol, state.dataset)
    if not feats:
        raise SessionError(f"solution {sol.id} has no enabled numeric features")
    return materialize(state.dataset, sol.active_rows, feats, standardize=standardize)


def _clear_results(sol: Solution) -> Solution:
    return replace(sol, clustering=None, projection=None)


def _bump(sol: Solution) -> Solution:
    return replace(sol, revision=sol.revision + 1)


def _with_solution(state: SessionState, sol: Solution) -> SessionState:
    solutions = dict(state.solutions)
    solutions[sol.id] = sol
    return replace(state, solutions=solutions)


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def create_solution(
    state: SessionState,
    parent_solution: int | None = None,
    rows=None,
    features=None,
    standardize: bool | None = None,
) -> tuple[SessionState, int]:
    """Register a new solution; defaults to the whole dataset, or to the
    parent's current selection when a parent is given."""
    dataset = state.dataset
    if parent_solution is not None:
        parent = state.solution(parent_solution)
        if rows is None:
            rows = parent.selection or parent.active_rows
        else:
            rows = frozenset(int(r) for r in rows)
            if not rows <= parent.active_rows:
                raise SessionError("rows must be a subset of the parent's active rows")
        if features is None:
            features = parent.enabled_features
        if standardize is None:
            standardize = parent.standardize
    else:
        if rows is None:
            rows = range(dataset.n_rows)
        if features is None:
            features = [c.name for c in dataset.columns if c.kind == NUMERIC]
        if standardize is None:
            standardize = True

    active = frozenset(int(r) for r in rows)
    if not active:
        raise SessionError("a solution needs at least one row")
    for r in active:
        if r < 0 or r >= dataset.n_rows:
            raise SessionError(f"row id {r} out of range")
    feats = tuple(features)
    for f in feats:
        if not dataset.has_column(f):
            raise SessionError(f"unknown feature {f!r}")

    sid = state.next_solution_id
    sol = Solution(
        id=sid,
        color=PALETTE[state.palette_cursor % len(PALETTE)],
        active_rows=active,
        enabled_features=feats,
        standardize=bool(standardize),
    )
    state = _with_solution(state, sol)
    state = replace(
        state, next_solution_id=sid + 1, palette_cursor=state.palette_cursor + 1
    )
    return state, sid


def overview(state: SessionState) -> dict:
    """Compact per-solution comparison payload plus the view ring."""
    entries = []
    for sid in sorted(state.solutions):
        sol = state.solutions[sid]
        clus = sol.clustering
        if sol.clustering_params is not None:
            p = sol.clustering_params
            algorithm_text = f"{p.algorithm}, k={p.k}, {p.effective_metric}"
        else:
            algorithm_text = None
        entries.append(
            {
                "solution_id": sid,
                "color": sol.color,
                "revision": sol.revision,
                "n_rows": len(sol.active_rows),
                "n_features": len(sol.enabled_features),
                "algorithm": algorithm_text,
                "silhouette_mean": (
                    clus.silhouette.mean
                    if clus is not None and clus.silhouette is not None
                    else None
                ),
                "thumbnail": (
                    [[float(v) for v in row] for row in sol.projection.coords]
                    if sol.projection is not None
                    else None
                ),
                "profile": (
                    clus.profile.to_payload()
                    if clus is not None and clus.profile is not None
                    else None
                ),
            }
        )
    ring = [
        state.bindings[vid].to_payload()
        for vid in sorted(
            state.bindings,
            key=lambda v: (min(state.bindings[v].slots), v),
        )
    ]
    for item, vid in zip(
        ring,
        sorted(state.bindings, key=lambda v: (min(state.bindings[v].slots), v)),
    ):
        item["color"] = state.solutions[state.bindings[vid].solution_id].color
    return {"solutions": entries, "ring": ring}


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def snapshot(state: SessionState) -> dict:
    """Serializable session document; dataset referenced by path + hash."""
    derived = [
        {"name": c.name, "expression": c.derived_from}
        for c in state.dataset.columns
        if c.is_derived
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": {
            "path": state.dataset.source_path,
            "sha256": state.dataset.source_hash,
            "name": state.dataset.name,
            "options": state.csv_options,
            "derived": derived,
        },
        "slot_count": state.slot_count,
        "palette_cursor": state.palette_cursor,
        "next_solution_id": state.next_solution_id,
        "next_view_id": state.next_view_id,
        "solutions": [
            state.solutions[sid].to_payload() for sid in sorted(state.solutions)
        ],
        "bindings": [
            state.bindings[vid].to_payload() for vid in sorted(state.bindings)
        ],
    }


def restore(document: Mapping, dataset: Dataset | None = None) -> SessionState:
    """Rebuild a session from a snapshot document.

    The dataset is re-read from its recorded path and verified against the
    recorded content hash (pass ``dataset`` to skip the file read, it is
    still hash-checked). Derived columns are re-engineered.
    """
    if document.get("schema_version") != SCHEMA_VERSION:
        raise SnapshotError(
            f"snapshot schema {document.get('schema_version')!r} not supported"
        )
    ds_info = document["dataset"]
    options = dict(ds_info.get("options") or {})
    if dataset is None:
        dataset = load_csv(
            ds_info["path"],
            delimiter=options.get("delimiter", ","),
            missing_tokens=frozenset(
                options.get("missing_tokens", DEFAULT_MISSING_TOKENS)
            ),
            name=ds_info.get("name"),
        )
    if dataset.source_hash != ds_info["sha256"]:
        raise SnapshotError(
            f"dataset hash mismatch: snapshot has {ds_info['sha256'][:12]}..., "
            f"file has {dataset.source_hash[:12]}..."
        )
    for spec in ds_info.get("derived", ()):
        dataset = engineer_feature(dataset, spec["name"], spec["expression"])

    solutions = {
        int(p["id"]): Solution.from_payload(p) for p in document["solutions"]
    }
    bindings = {
        int(b["view_id"]): ViewBinding(
            view_id=int(b["view_id"]),
            kind=b["kind"],
            solution_id=int(b["solution_id"]),
            slots=tuple(int(s) for s in b["slots"]),
        )
        for b in document["bindings"]
    }
    return SessionState(
        dataset=dataset,
        csv_options=options,
        solutions=solutions,
        bindings=bindings,
        next_solution_id=int(document["next_solution_id"]),
        next_view_id=int(document["next_view_id"]),
        palette_cursor=int(document["palette_cursor"]),
        slot_count=int(document.get("slot_count", DEFAULT_SLOT_COUNT)),
    )


def table_payload(
    state: SessionState, solution_id: int, offset: int = 0, limit: int = 50
) -> dict:
    """Data-table page for a solution: raw cells for the enabled features
    over a window of the active rows, with missing masks, robust-z outlier
    flags, per-row outlier scores and current cluster labels."""
    from .stats import outlier_flags

    sol = state.solution(solution_id)
    if offset < 0 or limit < 1:
        raise SessionError("offset must be >= 0 and limit >= 1")
    rows = sorted(sol.active_rows)
    window = rows[offset : offset + limit]
    feats = [
        f
        for f in sol.enabled_features
        if state.dataset.column(f).kind == NUMERIC
    ]
    flags_by_row: dict[int, list[bool]] = {}
    scores_by_row: dict[int, int] = {}
    if feats:
        mat = _matrix(state, sol, standardize=False)
        flags, scores = outlier_flags(mat)
        for pos, rid in enumerate(mat.row_ids):
            flags_by_row[rid] = [bool(v) for v in flags[pos]]
            scores_by_row[rid] = int(scores[pos])
    labels_by_row: dict[int, int] = {}
    if sol.clustering is not None:
        for pos, rid in enumerate(rows):
            labels_by_row[rid] = int(sol.clustering.labels[pos])
    cells = []
    missing = []
    for rid in window:
        row_cells = []
        row_missing = []
        for f in sol.enabled_features:
            col = state.dataset.column(f)
            m = bool(col.missing[rid])
            row_missing.append(m)
            if m:
                row_cells.append(None)
            elif col.kind == NUMERIC:
                row_cells.append(float(col.values[rid]))
            else:
                row_cells.append(str(col.values[rid]))
        cells.append(row_cells)
        missing.append(row_missing)
    return {
        "solution_id": solution_id,
        "revision": sol.revision,
        "offset": offset,
        "total_rows": len(rows),
        "features": list(sol.enabled_features),
        "row_ids": window,
        "cells": cells,
        "missing": missing,
        "outlier_flags": [flags_by_row.get(rid, []) for rid in window],
        "outlier_scores": [scores_by_row.get(rid, 0) for rid in window],
        "labels": [labels_by_row.get(rid) for rid in window],
        "selection": sorted(sol.selection),
    }


def distributions_payload(
    state: SessionState, solution_id: int, bins: int = 20
) -> dict:
    """Distribution-view data: per-feature global summary plus a selection
    overlay on the same bin edges when a selection exists."""
    from .stats import compare_distributions, summarize

    sol = state.solution(solution_id)
    mat = _matrix(state, sol, standardize=False)
    if sol.selection:
        pairs = compare_distributions(mat, sol.selection, bins=bins)
        entries = [
            {"feature": glob.feature_id, "global": glob.to_payload(), "selection": gsum.to_payload()}
            for gsum, glob in pairs
        ]
    else:
        entries = [
            {"feature": s.feature_id, "global": s.to_payload(), "selection": None}
            for s in summarize(mat, bins=bins)
        ]
    return {
        "solution_id": solution_id,
        "revision": sol.revision,
        "bins": bins,
        "features": entries,
    }


def correlations_payload(
    state: SessionState, solution_id: int, top_k: int = 10
) -> dict:
    from .stats import correlations

    sol = state.solution(solution_id)
    mat = _matrix(state, sol, standardize=False)
    out = correlations(mat, top_k=top_k).to_payload()
    out["solution_id"] = solution_id
    out["revision"] = sol.revision
    return out


def ranking_payload(
    state: SessionState,
    solution_id: int,
    method: str = "variance",
    top_n: int | None = None,
    dims: int = 2,
) -> dict:
    from .select import rank_features

    sol = state.solution(solution_id)
    mat = _matrix(state, sol, standardize=False)
    labels = None
    if method in ("anova", "chi2"):
        if sol.clustering is None:
            raise SessionError(f"method {method!r} needs a clustering result first")
        labels = sol.clustering.labels
    out = rank_features(mat, method, labels=labels, top_n=top_n, dims=dims).to_payload()
    out["solution_id"] = solution_id
    out["revision"] = sol.revision
    return out


def dataset_summary(dataset: Dataset) -> dict:
    return {
        "name": dataset.name,
        "n_rows": dataset.n_rows,
        "n_cols": dataset.n_cols,
        "columns": [
            {
                "name": c.name,
                "kind": c.kind,
                "derived": c.derived_from,
                "missing": int(c.missing.sum()),
            }
            for c in dataset.columns
        ],
    }


# --------------------------------------------------------------------------
# Event application
# --------------------------------------------------------------------------

def delta_message(
    state: SessionState, event: Event, sol: Solution | None, extra: dict | None = None
) -> dict:
    payload = {
        "event": event.type,
        "seq": event.seq,
        "client_id": event.client_id,
    }
    if sol is not None:
        payload["solution_id"] = sol.id
        payload["solution"] = sol.to_payload()
        payload["affected_views"] = state.views_of(sol.id)
    if extra:
        payload.update(extra)
    return {
        "v": 1,
        "type": "delta",
        "revision": sol.revision if sol is not None else 0,
        "payload": payload,
    }


def _require_solution(state: SessionState, event: Event) -> Solution:
    if event.solution_id is None:
        raise SessionError(f"event {event.type} requires a solution_id")
    sol = state.solution(event.solution_id)
    if event.expected_revision is not None and event.expected_revision != sol.revision:
        raise RevisionConflict(sol.id, event.expected_revision, sol.revision)
    return sol


def _validate_slots(state: SessionState, slots, exclude_view: int | None = None):
    slots = tuple(int(s) for s in slots)
    if not slots:
        raise SessionError("at least one screen slot required")
    if len(set(slots)) != len(slots):
        raise SessionError("duplicate slots in request")
    for s in slots:
        if not 1 <= s <= state.slot_count:
            raise SessionError(f"slot {s} outside 1..{state.slot_count}")
    taken = state.occupied_slots(exclude_view)
    clash = sorted(set(slots) & taken)
    if clash:
        raise SessionError(f"slot(s) {clash} already occupied")
    return slots


def _apply_clustering(state: SessionState, event: Event, sol: Solution):
    params = ClusteringParams.from_payload(event.payload.get("params", {}))
    mat = _matrix(state, sol, standardize=sol.standardize)
    result = run_cluster(mat, params)
    sil = silhouette_scores(
        mat, result.labels, metric=params.effective_metric, seed=params.seed
    )
    raw = _matrix(state, sol, standardize=False)
    profile = cluster_profile(raw, result.labels)
    by_k: tuple[tuple[int, float], ...] = ()
    if event.payload.get("sweep"):
        k_range = event.payload.get("k_range")
        by_k = silhouette_sweep(
            mat, params, k_range=None if k_range is None else [int(k) for k in k_range]
        )
    result = replace(
        result, silhouette=sil, profile=profile, silhouette_by_k=by_k
    )
    sol = replace(sol, clustering_params=params, clustering=result)
    # the distance heatmap is sorted by labels: refresh it if one was shown
    if sol.projection is not None and sol.projection.distance_view is not None:
        dv = reducemod.distance_matrix(
            _matrix(state, sol, standardize=sol.projection.standardized),
            metric=sol.projection.metric if sol.projection.algorithm == "cmds" else "euclidean",
            labels=result.labels,
            cap=sol.projection.distance_view.cap,
        )
        sol = replace(sol, projection=replace(sol.projection, distance_view=dv))
    return sol


def _apply_projection(state: SessionState, event: Event, sol: Solution,
                      params: reducemod.ProjectionParams | None = None):
    if params is None:
        params = reducemod.ProjectionParams.from_payload(event.payload.get("params", {}))
    raw = _matrix(state, sol, standardize=False)
    result = reducemod.project(raw, params)
    if params.algorithm == "pca":
        steps = int(event.payload.get("proline_steps", reducemod.DEFAULT_PROLINE_STEPS))
        result = reducemod.with_prolines(result, statsmod.summarize(raw), steps=steps)
    if event.payload.get("include_distance_matrix"):
        labels = sol.clustering.labels if sol.clustering is not None else None
        cap = int(event.payload.get("distance_cap", reducemod.DEFAULT_DISTANCE_CAP))
        mat = raw if not params.standardize else _matrix(state, sol, standardize=True)
        dv = reducemod.distance_matrix(
            mat,
            metric=params.metric if params.algorithm == "cmds" else "euclidean",
            labels=labels,
            cap=cap,
        )
        result = replace(result, distance_view=dv)
    return replace(sol, projection_params=params, projection=result)


def _point_for_row(state: SessionState, sol: Solution, row_id: int) -> np.ndarray:
    raw = _matrix(state, sol, standardize=False)
    try:
        pos = raw.row_ids.index(int(row_id))
    except ValueError:
        raise SessionError(f"row {row_id} not active in solution {sol.id}") from None
    return raw.data[pos]


def apply_event(state: SessionState, event: Event):
    """Apply one event; returns (state', messages, targets).

    targets is "all" for broadcasts and "sender" for replies that only the
    requesting client should see (snapshot requests). Validation problems
    raise typed SessionError/RevisionConflict; the caller rejects to the
    sender only.
    """
    if event.type not in EVENT_TYPES:
        raise SessionError(f"unknown event type {event.type!r}")

    if event.type == "create_solution":
        p = event.payload
        parent = p.get("parent_solution")
        if parent is not None and event.expected_revision is not None:
            par = state.solution(int(parent))
            if event.expected_revision != par.revision:
                raise RevisionConflict(par.id, event.expected_revision, par.revision)
        state2, sid = create_solution(
            state,
            parent_solution=None if parent is None else int(parent),
            rows=p.get("rows"),
            features=p.get("features"),
            standardize=p.get("standardize"),
        )
        sol = state2.solutions[sid]
        return state2, [delta_message(state2, event, sol)], "all"

    if event.type == "snapshot":
        doc = snapshot(state)
        msg = {"v": 1, "type": "snapshot", "revision": 0, "payload": doc}
        return state, [msg], "sender"

    if event.type in VIEW_EVENTS:
        return _apply_view_event(state, event)

    sol = _require_solution(state, event)
    p = event.payload

    if event.type == "set_filter":
        text = p.get("filter")
        if not isinstance(text, str):
            raise SessionError("set_filter payload needs a 'filter' string")
        expr = parse_filter(text, state.dataset)
        selection = apply_filter(state.dataset, sol.active_rows, expr)
        sol = _bump(replace(sol, selection=selection))

    elif event.type == "select_points":
        rows = frozenset(int(r) for r in p.get("rows", ()))
        if not rows <= sol.active_rows:
            raise SessionError("selection must be a subset of the active rows")
        sol = _bump(replace(sol, selection=rows))

    elif event.type == "isolate":
        if not sol.selection:
            raise SessionError("isolate needs a non-empty selection")
        sol = _bump(
            _clear_results(
                replace(
                    sol,
                    isolation_stack=sol.isolation_stack + (sol.active_rows,),
                    active_rows=sol.selection,
                )
            )
        )

    elif event.type == "undo_isolate":
        if not sol.isolation_stack:
            raise SessionError("nothing to undo: isolation stack is empty")
        restored = sol.isolation_stack[-1]
        sol = _bump(
            _clear_results(
                replace(
                    sol,
                    active_rows=restored,
                    isolation_stack=sol.isolation_stack[:-1],
                )
            )
        )

    elif event.type == "reproject":
        if sol.projection_params is None:
            raise SessionError("no projection parameters to reproject with")
        sol = _bump(_apply_projection(state, event, sol, params=sol.projection_params))

    elif event.type == "enable_features":
        feats = tuple(p.get("features", ()))
        if not feats:
            raise SessionError("enable_features needs a non-empty feature list")
        for f in feats:
            if not state.dataset.has_column(f):
                raise SessionError(f"unknown feature {f!r}")
            if state.dataset.column(f).kind != NUMERIC:
                raise SessionError(f"feature {f!r} is categorical")
        sol = _bump(_clear_results(replace(sol, enabled_features=feats)))

    elif event.type == "engineer_feature":
        name = p.get("name")
        expression = p.get("expression")
        if not name or not expression:
            raise SessionError("engineer_feature needs 'name' and 'expression'")
        dataset = engineer_feature(state.dataset, name, expression)
        state = replace(state, dataset=dataset)
        sol = _bump(
            _clear_results(
                replace(sol, enabled_features=sol.enabled_features + (name,))
            )
        )

    elif event.type == "apply_clustering":
        sol = _bump(_apply_clustering(state, event, sol))

    elif event.type == "apply_projection":
        sol = _bump(_apply_projection(state, event, sol))

    elif event.type == "forward_project":
        if sol.projection is None:
            raise SessionError("forward_project needs a fitted projection")
        row_id = p.get("row_id")
        if row_id is None:
            raise SessionError("forward_project payload needs 'row_id'")
        perturbation = {k: float(v) for k, v in (p.get("perturbation") or {}).items()}
        point = _point_for_row(state, sol, int(row_id))
        traj = reducemod.forward_project(sol.projection, point, perturbation)
        extra = {
            "what_if": {
                "row_id": int(row_id),
                "perturbation": perturbation,
                "trajectory": [[float(v) for v in c] for c in traj],
            }
        }
        return state, [delta_message(state, event, sol, extra)], "all"

    elif event.type == "highlight_views":
        # reserved notification: clients pulse the solution's views
        extra = {"highlight_views": state.views_of(sol.id)}
        return state, [delta_message(state, event, sol, extra)], "all"

    elif event.type == "backward_project":
        if sol.projection is None:
            raise SessionError("backward_project needs a fitted projection")
        row_id = p.get("row_id")
        target = p.get("target")
        if row_id is None or target is None:
            raise SessionError("backward_project payload needs 'row_id' and 'target'")
        point = _point_for_row(state, sol, int(row_id))
        result = reducemod.backward_project(
            sol.projection,
            point,
            np.asarray(target, dtype=np.float64),
            frozen=p.get("frozen", ()),
        )
        extra = {
            "what_if": {
                "row_id": int(row_id),
                "target": [float(v) for v in target],
                **result.to_payload(sol.projection.feature_ids),
            }
        }
        return state, [delta_message(state, event, sol, extra)], "all"

    else:  # pragma: no cover
        raise SessionError(f"unhandled event type {event.type!r}")

    state = _with_solution(state, sol)
    return state, [delta_message(state, event, sol)], "all"


def _apply_view_event(state: SessionState, event: Event):
    p = event.payload

    if event.type == "bind_view":
        kind = p.get("kind")
        if kind not in VIEW_KINDS:
            raise SessionError(f"unknown view kind {kind!r}")
        sid = p.get("solution_id", event.solution_id)
        if sid is None:
            raise SessionError("bind_view needs a solution_id")
        sol = state.solution(int(sid))
        if event.expected_revision is not None and event.expected_revision != sol.revision:
            raise RevisionConflict(sol.id, event.expected_revision, sol.revision)
        slots = _validate_slots(state, p.get("slots", ()))
        vid = state.next_view_id
        binding = ViewBinding(vid, kind, sol.id, slots)
        bindings = dict(state.bindings)
        bindings[vid] = binding
        state = replace(state, bindings=bindings, next_view_id=vid + 1)
        extra = {"binding": binding.to_payload(), "ring": overview(state)["ring"]}
        return state, [delta_message(state, event, sol, extra)], "all"

    binding = state.binding(int(p.get("view_id", -1)))
    sol = state.solution(binding.solution_id)
    if event.expected_revision is not None and event.expected_revision != sol.revision:
        raise RevisionConflict(sol.id, event.expected_revision, sol.revision)

    if event.type == "move_view":
        slots = _validate_slots(state, p.get("slots", ()), exclude_view=binding.view_id)
        binding = replace(binding, slots=slots)
        bindings = dict(state.bindings)
        bindings[binding.view_id] = binding
        state = replace(state, bindings=bindings)
    elif event.type == "extend_view":
        extra_slots = _validate_slots(
            state, p.get("slots", ()), exclude_view=binding.view_id
        )
        current = set(binding.slots)
        for s in extra_slots:
            if s in current:
                raise SessionError(f"slot {s} already part of view {binding.view_id}")
        binding = replace(binding, slots=binding.slots + extra_slots)
        bindings = dict(state.bindings)
        bindings[binding.view_id] = binding
        state = replace(state, bindings=bindings)
    else:  # clear_view
        bindings = dict(state.bindings)
        del bindings[binding.view_id]
        state = replace(state, bindings=bindings)

    extra = {"binding": binding.to_payload(), "ring": overview(state)["ring"]}
    return state, [delta_message(state, event, sol, extra)], "all"


# --------------------------------------------------------------------------
# Event log replay
# --------------------------------------------------------------------------

def replay_events(state: SessionState, events) -> SessionState:
    """Apply a recorded event list in order; raises on any rejection."""
    for entry in events:
        event = entry if isinstance(entry, Event) else Event.from_wire(entry, entry.get("client_id", ""))
        state, _, _ = apply_event(state, event)
    return state


def event_log_document(state: SessionState, events: list[Event]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": {
            "path": state.dataset.source_path,
            "sha256": state.dataset.source_hash,
            "options": state.csv_options,
        },
        "slot_count": state.slot_count,
        "events": [
            {**e.to_wire(), "client_id": e.client_id} for e in events
        ],
    }


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
