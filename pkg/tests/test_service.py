import time

import pytest
from fastapi.testclient import TestClient

from decmine.config import Config
from decmine.log import export_xes
from decmine.service import create_app
from decmine.synth import generate_synthetic_p2p

from conftest import TABLE1_XES

FEATURE_SPEC = {
    "case_features": [
        "origin", "item category", "base price per item",
        "item count", "total price", "vendor", "product name",
    ],
}


@pytest.fixture()
def client(tmp_path):
    app = create_app(Config(data_dir=str(tmp_path / "data")))
    with TestClient(app) as c:
        yield c


def upload_p2p(client, cases=120, seed=7):
    xes = export_xes(generate_synthetic_p2p(seed, cases)).decode("utf-8")
    resp = client.post("/sessions", json={"format": "xes", "content": xes})
    assert resp.status_code == 201, resp.text
    return resp.json()["session_id"]


def train_customs(client, sid, kinds=("decision_tree", "svm")):
    discover = client.post(f"/sessions/{sid}/discover").json()
    place = next(
        dp["place"]
        for dp in discover["decision_points"]
        if any(a["label"] == "Hold at Customs" for a in dp["alternatives"])
    )
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/train",
        json={"feature_spec": FEATURE_SPEC, "kinds": list(kinds), "seed": 0},
    )
    assert resp.status_code == 202, resp.text
    job = resp.json()
    for _ in range(600):
        job = client.get(f"/sessions/{sid}/jobs/{job['job_id']}").json()
        if job["state"] in ("done", "failed"):
            break
        time.sleep(0.05)
    assert job["state"] == "done", job
    return place, discover


def hold_transition(discover, place):
    dp = next(d for d in discover["decision_points"] if d["place"] == place)
    return next(a["id"] for a in dp["alternatives"] if a["label"] == "Hold at Customs")


# ---------------------------------------------------------------------------


def test_upload_table1_counts(client):
    resp = client.post("/sessions", json={"format": "xes", "content": TABLE1_XES})
    assert resp.status_code == 201
    body = resp.json()
    assert body["trace_count"] == 2
    assert body["event_count"] == 3
    assert body["schema"]["total-price"] == "int"


def test_upload_empty_log_400(client):
    resp = client.post("/sessions", json={"format": "xes", "content": "<log/>"})
    assert resp.status_code == 400
    assert "message" in resp.json()


def test_upload_bad_csv_mapping_400(client):
    resp = client.post(
        "/sessions",
        json={
            "format": "csv",
            "content": "a,b\n1,2\n",
            "mapping": {"case_col": "missing-col", "act_col": "b",
                        "time_col": "a", "time_format": "%H"},
        },
    )
    assert resp.status_code == 400
    assert "missing-col" in resp.json()["message"]


def test_upload_too_large_413(tmp_path):
    app = create_app(Config(data_dir=str(tmp_path / "d"), max_upload_bytes=10))
    with TestClient(app) as client:
        resp = client.post("/sessions", json={"format": "xes", "content": "<log></log>" * 10})
        assert resp.status_code == 413


def test_discover_lists_decision_points(client):
    sid = upload_p2p(client, cases=60)
    body = client.post(f"/sessions/{sid}/discover").json()
    assert len(body["decision_points"]) >= 3
    assert "<pnml>" in body["pnml"]
    assert body["dot"].startswith("digraph")


def test_discover_single_trace_no_decision_points(client):
    resp = client.post("/sessions", json={"format": "xes", "content": TABLE1_XES})
    sid = resp.json()["session_id"]
    body = client.post(f"/sessions/{sid}/discover").json()
    # two variants: one with both activities, one with the first only
    assert isinstance(body["decision_points"], list)


def test_unknown_session_404(client):
    assert client.post("/sessions/nope/discover").status_code == 404


def test_train_unknown_place_404(client):
    sid = upload_p2p(client, cases=40)
    client.post(f"/sessions/{sid}/discover")
    resp = client.post(
        f"/sessions/{sid}/decision-points/p999/train",
        json={"feature_spec": FEATURE_SPEC},
    )
    assert resp.status_code == 404


def test_report_before_training_404(client):
    sid = upload_p2p(client, cases=40)
    discover = client.post(f"/sessions/{sid}/discover").json()
    place = discover["decision_points"][0]["place"]
    resp = client.get(f"/sessions/{sid}/decision-points/{place}/report")
    assert resp.status_code == 404


def test_full_training_flow_and_report(client):
    sid = upload_p2p(client)
    place, discover = train_customs(client, sid)
    report = client.get(f"/sessions/{sid}/decision-points/{place}/report").json()
    assert set(report["reports"]) == {"decision_tree", "svm"}
    assert report["suggested"] in ("decision_tree", "random_forest",
                                   "gradient_boosted_trees")
    assert report["reports"]["decision_tree"]["mean_f1"] >= 0.9
    assert report["degenerate"] is False


def test_predict_follows_customs_rule(client):
    sid = upload_p2p(client)
    place, discover = train_customs(client, sid)
    hold = hold_transition(discover, place)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/predict",
        json={"features": {"case:origin": "Non-EU",
                           "case:base price per item": 60.0,
                           "case:item count": 2,
                           "case:total price": 120.0}},
    )
    body = resp.json()
    assert resp.status_code == 200, body
    assert body["argmax"] == hold
    assert sum(body["decision_mapping"].values()) == pytest.approx(1.0, abs=1e-9)


def test_predict_missing_features_still_normalizes(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/predict", json={"features": {}}
    )
    assert resp.status_code == 200
    assert sum(resp.json()["decision_mapping"].values()) == pytest.approx(1.0, abs=1e-9)


def test_predict_from_partial_trace(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    events = [
        {"act": "Create Purchase Requisition", "time": "2024-01-01T08:00:00Z",
         "case:origin": "Non-EU", "case:base price per item": 72.5,
         "case:item count": 3, "case:total price": 217.5},
        {"act": "Ship Order", "time": "2024-01-02T09:30:00Z",
         "case:origin": "Non-EU", "case:base price per item": 72.5,
         "case:item count": 3, "case:total price": 217.5},
    ]
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/predict", json={"events": events}
    )
    assert resp.status_code == 200
    assert sum(resp.json()["decision_mapping"].values()) == pytest.approx(1.0, abs=1e-9)


def test_explain_exact_too_wide_422(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/explain",
        json={"features": {"case:origin": "Non-EU"}, "method": "exact"},
    )
    assert resp.status_code == 422
    assert "sampled" in resp.json()["message"]


def test_explain_sampled_efficiency_in_payload(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/explain",
        json={"features": {"case:origin": "Non-EU",
                           "case:base price per item": 60.0},
              "method": "sampled", "n_permutations": 30, "seed": 0},
    )
    assert resp.status_code == 200
    body = resp.json()
    exp = body["explanation"]
    total = sum(a["value"] for a in exp["attributions"])
    assert total == pytest.approx(exp["predicted_value"] - exp["base_value"], abs=1e-9)
    segments = body["plots"]["force"]["segments"]
    assert segments[-1]["end"] == pytest.approx(exp["predicted_value"], abs=1e-9)


def test_explain_by_source_exact(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/explain",
        json={"features": {"case:origin": "Non-EU",
                           "case:base price per item": 60.0},
              "method": "exact", "grouping": "by-source"},
    )
    assert resp.status_code == 200
    assert resp.json()["explanation"]["method"] == "exact"


def test_global_explanation_top_features(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.get(
        f"/sessions/{sid}/decision-points/{place}/global-explanation",
        params={"exclude": "vendor,product,category", "n_permutations": 20},
    )
    assert resp.status_code == 200
    body = resp.json()
    bars = body["plots"]["bar"]["series"][0]["bars"]
    assert bars, "no bars returned"
    assert all("vendor" not in b["name"] for b in bars)
    # cached second call returns the identical document
    again = client.get(
        f"/sessions/{sid}/decision-points/{place}/global-explanation",
        params={"exclude": "vendor,product,category", "n_permutations": 20},
    )
    assert again.json() == body


def test_whatif_price_flip(client):
    sid = upload_p2p(client)
    place, discover = train_customs(client, sid)
    hold = hold_transition(discover, place)
    base = {"case:origin": "Non-EU", "case:base price per item": 60.0,
            "case:item count": 2, "case:total price": 120.0}
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/whatif",
        json={"features": base,
              "overrides": {"case:base price per item": 40.0,
                            "case:total price": 80.0}},
    )
    assert resp.status_code == 200, resp.text
    body = resp.json()
    assert body["before"]["argmax"] == hold
    assert body["after"]["argmax"] != hold
    assert body["delta"][hold] < 0


def test_whatif_empty_overrides_identity(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    base = {"case:origin": "EU", "case:base price per item": 30.0}
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/whatif",
        json={"features": base, "overrides": {}},
    )
    body = resp.json()
    assert body["before"]["decision_mapping"] == body["after"]["decision_mapping"]
    assert all(d == 0.0 for d in body["delta"].values())


def test_whatif_unknown_override_400(client):
    sid = upload_p2p(client)
    place, _ = train_customs(client, sid)
    resp = client.post(
        f"/sessions/{sid}/decision-points/{place}/whatif",
        json={"features": {"case:origin": "EU"},
              "overrides": {"case:nonsense": 1.0}},
    )
    assert resp.status_code == 400


def test_openapi_served_at_spec(client):
    body = client.get("/spec").json()
    assert body["info"]["title"] == "decmine service"
    assert "/sessions" in body["paths"]


def test_restart_preserves_artifacts(tmp_path):
    data_dir = str(tmp_path / "persist")
    app = create_app(Config(data_dir=data_dir))
    with TestClient(app) as client:
        sid = upload_p2p(client, cases=60)
        place, _ = train_customs(client, sid, kinds=("decision_tree",))
    # new app instance over the same data dir
    app2 = create_app(Config(data_dir=data_dir))
    with TestClient(app2) as client2:
        report = client2.get(f"/sessions/{sid}/decision-points/{place}/report")
        assert report.status_code == 200
        resp = client2.post(
            f"/sessions/{sid}/decision-points/{place}/predict",
            json={"features": {"case:origin": "EU",
                               "case:base price per item": 20.0}},
        )
        assert resp.status_code == 200
