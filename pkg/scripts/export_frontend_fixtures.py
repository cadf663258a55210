"""Capture real service responses as fixtures for the dashboard test suite.

Runs a full session in-process (upload -> discover -> train -> predict ->
explain -> global -> what-if) and writes the OpenAPI description plus every
response body to frontend/fixtures/.
"""

import json
import sys
import tempfile
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fastapi.testclient import TestClient

from decmine._json import canonical_dumps
from decmine.config import Config
from decmine.log import export_xes
from decmine.service import create_app
from decmine.synth import generate_synthetic_p2p

FEATURE_SPEC = {
    "case_features": [
        "origin", "item category", "base price per item",
        "item count", "total price", "vendor", "product name",
    ],
}

BASE_INSTANCE = {
    "case:origin": "Non-EU",
    "case:base price per item": 60.0,
    "case:item count": 2,
    "case:total price": 120.0,
}


def main() -> int:
    out = ROOT / "frontend" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)

    def dump(name: str, doc) -> None:
        (out / name).write_text(canonical_dumps(doc))
        print(f"wrote fixtures/{name}")

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Config(data_dir=tmp))
        with TestClient(app) as client:
            dump("openapi.json", client.get("/spec").json())

            xes = export_xes(generate_synthetic_p2p(7, 150)).decode("utf-8")
            session = client.post("/sessions",
                                  json={"format": "xes", "content": xes}).json()
            dump("session.json", session)
            sid = session["session_id"]

            discover = client.post(f"/sessions/{sid}/discover").json()
            dump("discover.json", discover)
            place = next(
                dp["place"] for dp in discover["decision_points"]
                if any(a["label"] == "Hold at Customs" for a in dp["alternatives"])
            )

            job = client.post(
                f"/sessions/{sid}/decision-points/{place}/train",
                json={"feature_spec": FEATURE_SPEC,
                      "kinds": ["decision_tree", "svm"], "seed": 0},
            ).json()
            dump("job_queued.json", job)
            while job["state"] not in ("done", "failed"):
                time.sleep(0.05)
                job = client.get(f"/sessions/{sid}/jobs/{job['job_id']}").json()
            assert job["state"] == "done", job
            dump("job_done.json", job)

            dump("report.json",
                 client.get(f"/sessions/{sid}/decision-points/{place}/report").json())
            dump("predict.json",
                 client.post(f"/sessions/{sid}/decision-points/{place}/predict",
                             json={"features": BASE_INSTANCE}).json())
            dump("explain.json",
                 client.post(
                     f"/sessions/{sid}/decision-points/{place}/explain",
                     json={"features": BASE_INSTANCE, "method": "sampled",
                           "n_permutations": 40, "seed": 0}).json())
            dump("global.json",
                 client.get(
                     f"/sessions/{sid}/decision-points/{place}/global-explanation",
                     params={"exclude": "vendor,product,category",
                             "n_permutations": 20}).json())
            dump("whatif.json",
                 client.post(
                     f"/sessions/{sid}/decision-points/{place}/whatif",
                     json={"features": BASE_INSTANCE,
                           "overrides": {"case:base price per item": 40.0,
                                         "case:total price": 80.0}}).json())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
