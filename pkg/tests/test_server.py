import numpy as np
import pytest
from starlette.testclient import TestClient

from edakit.dataset import load_csv
from edakit.server import build_app, command_to_event
from edakit.session import Event, apply_event, create_solution, new_session

from conftest import write_csv

PRELOAD = [Event(type="create_solution", client_id="server", seq=0)]


@pytest.fixture
def csv_file(tmp_path):
    rng = np.random.default_rng(9)
    rows = [
        [round(float(rng.normal()), 5), round(float(rng.normal()), 5), int(rng.integers(100))]
        for _ in range(40)
    ]
    return write_csv(tmp_path / "srv.csv", ["x", "y", "count"], rows)


@pytest.fixture
def app_state(csv_file):
    state = new_session(load_csv(csv_file))
    state, _ = create_solution(state)
    return state


@pytest.fixture
def client(csv_file):
    return TestClient(build_app(new_session(load_csv(csv_file)), preload_events=PRELOAD))


class TestHandshake:
    def test_hello_carries_snapshot(self, client):
        with client.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            assert hello["type"] == "snapshot"
            assert hello["v"] == 1
            assert hello["payload"]["session"]["solutions"][0]["id"] == 0
            assert hello["payload"]["client_id"] == "client-0"
            assert hello["payload"]["dataset"]["n_rows"] == 40

    def test_two_clients_identical_snapshots(self, client):
        with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
            ha, hb = a.receive_json(), b.receive_json()
            assert ha["payload"]["session"] == hb["payload"]["session"]
            assert ha["payload"]["overview"] == hb["payload"]["overview"]


class TestEvents:
    def test_delta_reaches_other_client_same_revision(self, client):
        with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
            a.receive_json()
            b.receive_json()
            a.send_json(
                {
                    "v": 1,
                    "type": "select_points",
                    "seq": 5,
                    "solution_id": 0,
                    "expected_revision": 0,
                    "payload": {"rows": [1, 2, 3]},
                }
            )
            da, db = a.receive_json(), b.receive_json()
            assert da == db
            assert da["type"] == "delta" and da["revision"] == 1
            assert da["payload"]["solution"]["selection"] == [1, 2, 3]

    def test_conflict_rejected_to_sender_only(self, client):
        with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
            a.receive_json()
            b.receive_json()
            msg = {
                "v": 1,
                "type": "select_points",
                "seq": 1,
                "solution_id": 0,
                "expected_revision": 0,
                "payload": {"rows": [1]},
            }
            a.send_json(msg)
            a.receive_json()
            b.receive_json()
            msg["seq"] = 2
            b.send_json(msg)  # stale expected_revision
            rb = b.receive_json()
            assert rb["type"] == "reject"
            assert rb["payload"]["code"] == "conflict"
            assert rb["payload"]["seq"] == 2
            # a then mutates fine and both get exactly one delta each
            a.send_json(
                {
                    "v": 1,
                    "type": "select_points",
                    "seq": 3,
                    "solution_id": 0,
                    "expected_revision": 1,
                    "payload": {"rows": [4]},
                }
            )
            da, db = a.receive_json(), b.receive_json()
            assert da["revision"] == db["revision"] == 2

    def test_heavy_event_clustering(self, client):
        with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
            a.receive_json()
            b.receive_json()
            a.send_json(
                {
                    "v": 1,
                    "type": "apply_clustering",
                    "seq": 9,
                    "solution_id": 0,
                    "expected_revision": 0,
                    "payload": {"params": {"algorithm": "kmeans", "k": 2, "seed": 3}},
                }
            )
            da, db = a.receive_json(), b.receive_json()
            assert da == db
            labels = da["payload"]["solution"]["clustering"]["labels"]
            assert len(labels) == 40

    def test_invalid_event_rejected(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"v": 1, "type": "isolate", "seq": 4, "solution_id": 0, "payload": {}})
            reply = ws.receive_json()
            assert reply["type"] == "reject" and reply["payload"]["code"] == "invalid"

    def test_unknown_event_type_rejected(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"v": 1, "type": "launch_rockets", "seq": 1, "payload": {}})
            reply = ws.receive_json()
            assert reply["type"] == "reject"


class TestCommands:
    def test_command_drives_clustering(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "command",
                    "seq": 2,
                    "text": "apply kmeans clustering with 3 clusters to solution 0",
                }
            )
            delta = ws.receive_json()
            assert delta["type"] == "delta"
            assert delta["payload"]["solution"]["clustering_params"]["k"] == 3

    def test_command_parse_error_reject(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "command",
                    "seq": 3,
                    "text": "apply kmaens clustering with 3 clusters to solution 0",
                }
            )
            reply = ws.receive_json()
            assert reply["type"] == "reject"
            assert reply["payload"]["code"] == "parse_error"
            assert "kmeans" in reply["payload"]["suggestions"]

    def test_show_view_binds_to_focused_solution(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "command",
                    "seq": 4,
                    "text": "show projection view on screen number 13",
                }
            )
            delta = ws.receive_json()
            assert delta["payload"]["binding"]["kind"] == "projection"
            assert delta["payload"]["binding"]["slots"] == [13]


class TestCommandToEvent:
    def test_extend_view_picks_free_slots(self, app_state):
        state, _, _ = apply_event(
            app_state,
            Event(type="bind_view", payload={"kind": "table", "solution_id": 0, "slots": [1]}),
        )
        event = command_to_event(state, "extend table view to 3 screens", None, "c", 1)
        assert event.type == "extend_view"
        assert event.payload["slots"] == [2, 3]

    def test_forward_perturb_needs_selection_context(self, app_state):
        from edakit.errors import SessionError

        state, _, _ = apply_event(
            app_state,
            Event(
                type="apply_projection",
                payload={"params": {"algorithm": "pca", "dims": 2}},
                solution_id=0,
            ),
        )
        with pytest.raises(SessionError, match="selected"):
            command_to_event(
                state, "try increasing the x value of this data point by 5", None, "c", 1
            )
        event = command_to_event(
            state,
            "try increasing the x value of this data point by 5",
            {"selection": [7]},
            "c",
            1,
        )
        assert event.type == "forward_project"
        assert event.payload == {"row_id": 7, "perturbation": {"x": 5.0}}


class TestHttp:
    def test_health_and_overview(self, client):
        assert client.get("/health").json()["status"] == "ok"
        body = client.get("/overview").json()
        assert len(body["solutions"]) == 1

    def test_log_grows_with_mutations(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "select_points",
                    "seq": 1,
                    "solution_id": 0,
                    "payload": {"rows": [0]},
                }
            )
            ws.receive_json()
        doc = client.get("/log").json()
        assert [e["type"] for e in doc["events"]] == ["create_solution", "select_points"]
        assert doc["dataset"]["sha256"]


class TestTableEndpoint:
    def test_table_page(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "apply_clustering",
                    "seq": 1,
                    "solution_id": 0,
                    "payload": {"params": {"algorithm": "kmeans", "k": 2, "seed": 0}},
                }
            )
            ws.receive_json()
        body = client.get("/table/0", params={"offset": 0, "limit": 10}).json()
        assert body["total_rows"] == 40
        assert len(body["cells"]) == 10
        assert body["features"] == ["x", "y", "count"]
        assert len(body["labels"]) == 10 and body["labels"][0] in (0, 1)
        assert len(body["outlier_flags"][0]) == 3
        page2 = client.get("/table/0", params={"offset": 35, "limit": 10}).json()
        assert len(page2["cells"]) == 5


class TestStatsEndpoints:
    def test_distributions(self, client):
        body = client.get("/distributions/0", params={"bins": 6}).json()
        assert [f["feature"] for f in body["features"]] == ["x", "y", "count"]
        g = body["features"][0]["global"]
        assert len(g["histogram"]["counts"]) == 6
        assert sum(g["histogram"]["counts"]) == 40
        assert body["features"][0]["selection"] is None

    def test_distributions_with_selection_share_edges(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "select_points",
                    "seq": 1,
                    "solution_id": 0,
                    "payload": {"rows": [0, 1, 2, 3, 4]},
                }
            )
            ws.receive_json()
        body = client.get("/distributions/0").json()
        f0 = body["features"][0]
        assert f0["selection"]["count"] == 5
        assert f0["selection"]["histogram"]["edges"] == f0["global"]["histogram"]["edges"]

    def test_correlations(self, client):
        body = client.get("/correlations/0", params={"top_k": 2}).json()
        assert len(body["matrix"]) == 3
        assert len(body["top_pairs"]) == 2

    def test_ranking_variance_and_supervised_guard(self, client):
        body = client.get("/ranking/0", params={"method": "variance"}).json()
        assert len(body["entries"]) == 3
        resp = client.get("/ranking/0", params={"method": "anova"})
        assert resp.status_code == 400
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "apply_clustering",
                    "seq": 1,
                    "solution_id": 0,
                    "payload": {"params": {"algorithm": "kmeans", "k": 2, "seed": 0}},
                }
            )
            ws.receive_json()
        body = client.get("/ranking/0", params={"method": "anova"}).json()
        assert all(e["p_value"] is not None for e in body["entries"])


class TestLiveLogReplay:
    def test_exported_log_replays_to_identical_overview(self, client, tmp_path):
        import json

        from edakit.pipeline import run_replay
        from edakit.session import canonical_json

        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "apply_clustering",
                    "seq": 1,
                    "solution_id": 0,
                    "payload": {"params": {"algorithm": "kmeans", "k": 2, "seed": 11}},
                }
            )
            ws.receive_json()
            ws.send_json(
                {
                    "v": 1,
                    "type": "bind_view",
                    "seq": 2,
                    "payload": {"kind": "clustering", "solution_id": 0, "slots": [4]},
                }
            )
            ws.receive_json()
        log_doc = client.get("/log").json()
        assert [e["type"] for e in log_doc["events"]] == [
            "create_solution",
            "apply_clustering",
            "bind_view",
        ]
        log_path = tmp_path / "live.json"
        log_path.write_text(json.dumps(log_doc))
        out = tmp_path / "replayed"
        run_replay(str(log_path), str(out))
        live_overview = client.get("/overview").json()
        replayed = json.loads((out / "overview.json").read_text())
        assert canonical_json(replayed) == canonical_json(live_overview)
