"""Headless batch analysis: run a validated step list against one solution.

The batch path drives the same session engine as the interactive service,
so a recorded interactive session and an equivalent pipeline config produce
identical artifacts. All steps are validated against the dataset schema
before anything executes or is written.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import select as selectmod
from . import session as sessionmod
from . import stats as statsmod
from .dataset import DEFAULT_MISSING_TOKENS, NUMERIC, load_csv
from .errors import DataError, EdakitError, FilterError
from .filters import parse_filter
from .session import Event, apply_event, new_session, overview, snapshot

KNOWN_OPS = ("filter", "enable_features", "cluster", "project", "significance", "rank")
_SUPERVISED_RANKS = ("anova", "chi2")


@dataclass
class PipelineConfig:
    dataset_path: str
    delimiter: str = ","
    missing_tokens: frozenset[str] = DEFAULT_MISSING_TOKENS
    name: str | None = None
    standardize: bool = True
    steps: list[dict] = field(default_factory=list)

    @staticmethod
    def from_document(doc: dict) -> "PipelineConfig":
        if not isinstance(doc, dict) or "dataset" not in doc:
            raise EdakitError("config must be an object with a 'dataset' section")
        ds = doc["dataset"]
        if isinstance(ds, str):
            ds = {"path": ds}
        if "path" not in ds:
            raise EdakitError("dataset section needs a 'path'")
        steps = doc.get("steps", [])
        if not isinstance(steps, list):
            raise EdakitError("'steps' must be a list")
        return PipelineConfig(
            dataset_path=ds["path"],
            delimiter=ds.get("delimiter", ","),
            missing_tokens=frozenset(ds.get("missing_tokens", DEFAULT_MISSING_TOKENS)),
            name=ds.get("name"),
            standardize=bool(doc.get("standardize", True)),
            steps=steps,
        )


def validate_steps(config: PipelineConfig, dataset) -> None:
    """Check every step against the dataset schema before running any."""
    numeric = set(dataset.numeric_columns())
    enabled = set(numeric)
    have_labels = False
    for i, step in enumerate(config.steps):
        where = f"step {i} ({step.get('op', '?')})"
        op = step.get("op")
        if op not in KNOWN_OPS:
            raise EdakitError(f"{where}: unknown op; expected one of {KNOWN_OPS}")
        if op == "filter":
            expr = step.get("expr")
            if not isinstance(expr, str):
                raise EdakitError(f"{where}: needs an 'expr' string")
            try:
                parse_filter(expr, dataset)
            except FilterError as exc:
                raise EdakitError(f"{where}: {exc}") from exc
        elif op == "enable_features":
            feats = step.get("features")
            if not feats:
                raise EdakitError(f"{where}: needs a non-empty 'features' list")
            unknown = [f for f in feats if f not in numeric]
            if unknown:
                raise EdakitError(f"{where}: non-numeric or unknown features {unknown}")
            enabled = set(feats)
        elif op == "cluster":
            try:
                from .cluster import ClusteringParams

                ClusteringParams.from_payload(step)
            except EdakitError as exc:
                raise EdakitError(f"{where}: {exc}") from exc
            have_labels = True
        elif op == "project":
            try:
                from .reduce import ProjectionParams

                ProjectionParams.from_payload(
                    {**step, "standardize": step.get("standardize", config.standardize)}
                )
            except EdakitError as exc:
                raise EdakitError(f"{where}: {exc}") from exc
        elif op == "significance":
            method = step.get("method", "anova")
            if method not in ("anova", "chi2"):
                raise EdakitError(f"{where}: unknown method {method!r}")
            if not have_labels:
                raise EdakitError(f"{where}: needs a preceding cluster step")
        elif op == "rank":
            method = step.get("method", "variance")
            if method not in selectmod.METHODS:
                raise EdakitError(f"{where}: unknown method {method!r}")
            if method in _SUPERVISED_RANKS and not have_labels:
                raise EdakitError(f"{where}: method {method!r} needs a preceding cluster step")
            top_n = step.get("top_n")
            if top_n is not None and not 1 <= int(top_n) <= len(enabled):
                raise EdakitError(f"{where}: top_n out of range for {len(enabled)} features")


def _write_artifact(out_dir: str, index: int, op: str, payload) -> str:
    path = os.path.join(out_dir, f"step_{index:02d}_{op}.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def run_pipeline(config: PipelineConfig, out_dir: str, seed: int | None = None) -> list[str]:
    """Execute the pipeline; returns the list of files written.

    Deterministic for a fixed seed: rerunning writes byte-identical
    artifacts.
    """
    dataset = load_csv(
        config.dataset_path,
        delimiter=config.delimiter,
        missing_tokens=config.missing_tokens,
        name=config.name,
    )
    validate_steps(config, dataset)
    os.makedirs(out_dir, exist_ok=True)

    state = new_session(
        dataset,
        csv_options={
            "delimiter": config.delimiter,
            "missing_tokens": sorted(config.missing_tokens),
        },
    )
    state, sid = sessionmod.create_solution(state, standardize=config.standardize)
    written: list[str] = []

    for i, step in enumerate(config.steps):
        op = step["op"]
        if op == "filter":
            for etype, payload in (
                ("set_filter", {"filter": step["expr"]}),
                ("isolate", {}),
            ):
                state, _, _ = apply_event(
                    state, Event(type=etype, payload=payload, solution_id=sid, client_id="batch")
                )
            sol = state.solutions[sid]
            artifact = {
                "expr": step["expr"],
                "n_rows": len(sol.active_rows),
                "rows": sorted(sol.active_rows),
            }
        elif op == "enable_features":
            state, _, _ = apply_event(
                state,
                Event(
                    type="enable_features",
                    payload={"features": list(step["features"])},
                    solution_id=sid,
                    client_id="batch",
                ),
            )
            artifact = {"features": list(step["features"])}
        elif op == "cluster":
            params = dict(step)
            params.pop("op", None)
            if seed is not None and "seed" not in step:
                params["seed"] = seed
            state, _, _ = apply_event(
                state,
                Event(
                    type="apply_clustering",
                    payload={
                        "params": params,
                        "sweep": step.get("sweep", False),
                        "k_range": step.get("k_range"),
                    },
                    solution_id=sid,
                    client_id="batch",
                ),
            )
            artifact = state.solutions[sid].clustering.to_payload()
        elif op == "project":
            params = dict(step)
            params.pop("op", None)
            params.setdefault("standardize", config.standardize)
            state, _, _ = apply_event(
                state,
                Event(
                    type="apply_projection",
                    payload={
                        "params": params,
                        "include_distance_matrix": step.get("include_distance_matrix", False),
                        "distance_cap": step.get("distance_cap", 512),
                    },
                    solution_id=sid,
                    client_id="batch",
                ),
            )
            artifact = state.solutions[sid].projection.to_payload()
        elif op == "significance":
            sol = state.solutions[sid]
            if sol.clustering is None:
                raise EdakitError("significance step without clustering result")
            mat = sessionmod._matrix(state, sol, standardize=False)
            result = statsmod.significance(
                mat, sol.clustering.labels, method=step.get("method", "anova")
            )
            artifact = result.to_payload()
        else:  # rank
            sol = state.solutions[sid]
            mat = sessionmod._matrix(state, sol, standardize=False)
            method = step.get("method", "variance")
            labels = sol.clustering.labels if sol.clustering is not None else None
            ranking = selectmod.rank_features(
                mat,
                method,
                labels=labels,
                top_n=step.get("top_n"),
                dims=int(step.get("dims", 2)),
            )
            artifact = ranking.to_payload()
            n_select = step.get("n_select")
            if n_select is not None:
                artifact["selected"] = list(
                    selectmod.auto_select(ranking, int(n_select))
                )
        written.append(_write_artifact(out_dir, i + 1, op, artifact))

    summary = {
        "dataset": sessionmod.dataset_summary(state.dataset),
        "overview": overview(state),
    }
    path = os.path.join(out_dir, "summary.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    written.append(path)
    return written


def run_replay(log_path: str, out_dir: str) -> list[str]:
    """Replay an exported event log and write the resulting state."""
    with open(log_path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("schema_version") != sessionmod.SCHEMA_VERSION:
        raise EdakitError(f"unsupported log schema {doc.get('schema_version')!r}")
    ds_info = doc["dataset"]
    options = dict(ds_info.get("options") or {})
    dataset = load_csv(
        ds_info["path"],
        delimiter=options.get("delimiter", ","),
        missing_tokens=frozenset(options.get("missing_tokens", DEFAULT_MISSING_TOKENS)),
    )
    if ds_info.get("sha256") and dataset.source_hash != ds_info["sha256"]:
        raise DataError("dataset hash mismatch: log was recorded against another file")
    state = new_session(
        dataset, slot_count=int(doc.get("slot_count", 15)), csv_options=options
    )
    state = sessionmod.replay_events(state, doc["events"])
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, payload in (
        ("overview.json", overview(state)),
        ("snapshot.json", snapshot(state)),
    ):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        written.append(path)
    return written
