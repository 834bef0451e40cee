import json
import os

import numpy as np
import pytest

from edakit.cli import main
from edakit.session import (
    Event,
    apply_event,
    canonical_json,
    event_log_document,
    new_session,
    overview,
)
from edakit.dataset import load_csv

from conftest import write_csv


@pytest.fixture
def toy_csv(tmp_path):
    return write_csv(
        tmp_path / "toy.csv", ["x"], [[0.0], [0.1], [10.0], [10.1]]
    )


@pytest.fixture
def wide_csv(tmp_path):
    rng = np.random.default_rng(31)
    rows = [
        [round(float(rng.normal()), 6) for _ in range(4)] + [int(rng.integers(3))]
        for _ in range(60)
    ]
    return write_csv(tmp_path / "wide.csv", ["a", "b", "c", "d", "grp"], rows)


def run_cli(args):
    return main(args)


def write_config(tmp_path, dataset, steps, name="cfg.json", standardize=True):
    cfg = {"dataset": {"path": dataset}, "standardize": standardize, "steps": steps}
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


class TestAnalyze:
    def test_toy_cluster_labels_match_module_example(self, tmp_path, toy_csv):
        cfg = write_config(
            tmp_path,
            toy_csv,
            [{"op": "cluster", "algorithm": "kmeans", "k": 2, "seed": 0}],
            standardize=False,
        )
        out = tmp_path / "out"
        assert run_cli(["analyze", "--config", cfg, "--out", str(out)]) == 0
        artifact = json.loads((out / "step_01_cluster.json").read_text())
        assert artifact["labels"] == [0, 0, 1, 1]

    def test_empty_steps_writes_only_summary(self, tmp_path, toy_csv):
        cfg = write_config(tmp_path, toy_csv, [])
        out = tmp_path / "out"
        assert run_cli(["analyze", "--config", cfg, "--out", str(out)]) == 0
        assert sorted(os.listdir(out)) == ["summary.json"]
        summary = json.loads((out / "summary.json").read_text())
        assert summary["dataset"]["n_rows"] == 4

    def test_rerun_same_seed_byte_identical(self, tmp_path, wide_csv):
        steps = [
            {"op": "filter", "expr": "a >= -1"},
            {"op": "cluster", "algorithm": "kmeans", "k": 3},
            {"op": "project", "algorithm": "pca", "dims": 2},
            {"op": "significance", "method": "anova"},
            {"op": "rank", "method": "anova", "n_select": 2},
        ]
        cfg = write_config(tmp_path, wide_csv, steps)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run_cli(["analyze", "--config", cfg, "--out", str(out1), "--seed", "7"]) == 0
        assert run_cli(["analyze", "--config", cfg, "--out", str(out2), "--seed", "7"]) == 0
        for name in sorted(os.listdir(out1)):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_full_step_set(self, tmp_path, wide_csv):
        steps = [
            {"op": "enable_features", "features": ["a", "b", "c"]},
            {"op": "filter", "expr": "d < 2"},
            {"op": "cluster", "algorithm": "agglomerative", "k": 2, "linkage": "average"},
            {"op": "project", "algorithm": "cmds", "dims": 2, "metric": "manhattan"},
            {"op": "significance", "method": "chi2"},
            {"op": "rank", "method": "variance", "top_n": 2, "n_select": 2},
        ]
        cfg = write_config(tmp_path, wide_csv, steps)
        out = tmp_path / "out"
        assert run_cli(["analyze", "--config", cfg, "--out", str(out)]) == 0
        files = sorted(os.listdir(out))
        assert files == [
            "step_01_enable_features.json",
            "step_02_filter.json",
            "step_03_cluster.json",
            "step_04_project.json",
            "step_05_significance.json",
            "step_06_rank.json",
            "summary.json",
        ]
        rank = json.loads((out / "step_06_rank.json").read_text())
        assert len(rank["selected"]) == 2
        summary = json.loads((out / "summary.json").read_text())
        assert summary["overview"]["solutions"][0]["algorithm"].startswith("agglomerative")

    def test_validation_failure_exit_2_no_partial_output(self, tmp_path, wide_csv):
        steps = [
            {"op": "cluster", "algorithm": "kmeans", "k": 3},
            {"op": "filter", "expr": "nope >= 1"},
        ]
        cfg = write_config(tmp_path, wide_csv, steps)
        out = tmp_path / "out"
        assert run_cli(["analyze", "--config", cfg, "--out", str(out)]) == 2
        assert not out.exists()

    def test_supervised_rank_needs_cluster_step(self, tmp_path, wide_csv):
        cfg = write_config(tmp_path, wide_csv, [{"op": "rank", "method": "anova"}])
        assert run_cli(["analyze", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_missing_dataset_exit_1(self, tmp_path):
        cfg = write_config(tmp_path, str(tmp_path / "missing.csv"), [])
        assert run_cli(["analyze", "--config", cfg, "--out", str(tmp_path / "o")]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert (
            run_cli(["analyze", "--config", str(tmp_path / "no.json"), "--out", str(tmp_path / "o")])
            == 1
        )

    def test_bad_json_config_exit_2(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        assert run_cli(["analyze", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


class TestReplay:
    def test_replay_matches_live_session(self, tmp_path, wide_csv):
        state = new_session(load_csv(wide_csv))
        events = [
            Event(type="create_solution", client_id="a", seq=1),
            Event(
                type="set_filter",
                payload={"filter": "grp <= 1"},
                solution_id=0,
                client_id="a",
                seq=2,
            ),
            Event(type="isolate", solution_id=0, client_id="a", seq=3),
            Event(
                type="apply_clustering",
                payload={"params": {"algorithm": "kmeans", "k": 2, "seed": 17}},
                solution_id=0,
                client_id="b",
                seq=1,
            ),
            Event(
                type="bind_view",
                payload={"kind": "clustering", "solution_id": 0, "slots": [3]},
                client_id="b",
                seq=2,
            ),
        ]
        for e in events:
            state, _, _ = apply_event(state, e)
        log_path = tmp_path / "events.json"
        log_path.write_text(json.dumps(event_log_document(state, events)))

        out = tmp_path / "replayed"
        assert run_cli(["replay", "--log", str(log_path), "--out", str(out)]) == 0
        replayed_overview = json.loads((out / "overview.json").read_text())
        assert canonical_json(replayed_overview) == canonical_json(overview(state))

    def test_replay_hash_mismatch(self, tmp_path, wide_csv):
        state = new_session(load_csv(wide_csv))
        doc = event_log_document(state, [])
        with open(wide_csv, "a", encoding="utf-8") as f:
            f.write("0,0,0,0,0\n")
        log_path = tmp_path / "events.json"
        log_path.write_text(json.dumps(doc))
        assert run_cli(["replay", "--log", str(log_path), "--out", str(tmp_path / "o")]) == 2

    def test_replay_missing_log_exit_1(self, tmp_path):
        assert run_cli(["replay", "--log", str(tmp_path / "no.json"), "--out", str(tmp_path / "o")]) == 1
