"""HTTP facade over the offline/online pipeline.

Sessions persist on disk (see ``store``); training runs as a background job
serialized per (session, decision point); everything else is synchronous.
Errors use ``{"code", "message"}`` bodies; the OpenAPI description is served
at ``/spec``.
"""

from __future__ import annotations

import base64
import hashlib
import io
import threading
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ._json import canonical_dump_bytes, loads
from .config import Config
from .errors import InputError, NotFoundError
from .explain import (
    Background,
    TooManyUnitsError,
    exact_shap,
    global_explanation,
    sampled_shap,
)
from .learners import CVReport, load_model, dump_model
from .log import CsvMapping, dump_json, load_json, parse_csv, parse_xes
from .pipeline import find_decision_point, instance_fmap, mine_decision_point
from .petri import decision_points, export_dot, export_pnml, import_pnml
from .plots import bar_plot_data, beeswarm_plot_data, explanation_bundle
from .situation import FeatureSpec, encode_table, load_table_json, dump_table_json
from .store import SessionStore


class SessionCreate(BaseModel):
    format: Literal["xes", "csv"]
    content: Optional[str] = None
    content_base64: Optional[str] = None
    mapping: Optional[dict] = None


class TrainRequest(BaseModel):
    feature_spec: dict
    kinds: Optional[list[str]] = None
    grid: Optional[dict] = None
    seed: Optional[int] = None
    folds: int = 5


class InstanceBody(BaseModel):
    features: Optional[dict] = None
    events: Optional[list[dict]] = None


class ExplainRequest(InstanceBody):
    target: Optional[str] = None
    method: Literal["auto", "exact", "sampled"] = "auto"
    grouping: Literal["columns", "by-source"] = "columns"
    n_permutations: int = 200
    seed: int = 0


class WhatIfRequest(InstanceBody):
    overrides: dict = {}


def create_app(config: Config | None = None) -> FastAPI:
    config = config or Config()
    store = SessionStore(config.data_dir)
    app = FastAPI(title="decmine service", version="0.1.0")

    @app.exception_handler(InputError)
    async def input_error_handler(request: Request, exc: InputError):
        if isinstance(exc, TooManyUnitsError):
            status = 422
        elif isinstance(exc, NotFoundError):
            status = 404
        else:
            status = 400
        return JSONResponse(status_code=status,
                            content={"code": status, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": 422, "message": str(exc.errors())})

    # -- helpers -------------------------------------------------------------

    def _load_log(sid: str):
        return load_json(store.get_artifact(sid, "log.json"))

    def _load_net(sid: str):
        return import_pnml(store.get_artifact(sid, "net.pnml"))

    def _dp_artifact(sid: str, place: str, name: str) -> str:
        return f"dp/{place}/{name}"

    def _require_trained(sid: str, place: str):
        name = _dp_artifact(sid, place, "model.bin")
        if not store.has_artifact(sid, name):
            raise NotFoundError(f"decision point {place!r} has no trained model yet")
        model = load_model(store.get_artifact(sid, name))
        bg_bytes = store.get_artifact(sid, _dp_artifact(sid, place, "background.npy"))
        background = Background(np.load(io.BytesIO(bg_bytes)))
        spec_doc = loads(store.get_artifact(sid, _dp_artifact(sid, place, "feature_spec.json")))
        return model, background, FeatureSpec.from_dict(spec_doc)

    def _label_map(net):
        return {t: net.label(t) for t in sorted(net.transitions)}

    # -- sessions ------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate):
        if body.content is None and body.content_base64 is None:
            raise InputError("one of 'content' or 'content_base64' is required")
        data = (
            base64.b64decode(body.content_base64)
            if body.content_base64 is not None
            else body.content.encode("utf-8")
        )
        if len(data) > config.max_upload_bytes:
            return JSONResponse(
                status_code=413,
                content={"code": 413,
                         "message": f"payload exceeds {config.max_upload_bytes} bytes"},
            )
        if body.format == "xes":
            log = parse_xes(data)
        else:
            if body.mapping is None:
                raise InputError("CSV uploads require a column mapping")
            known = {"case_col", "act_col", "time_col", "time_format", "res_col"}
            unknown = set(body.mapping) - known
            if unknown:
                raise InputError(f"unknown mapping keys: {sorted(unknown)}")
            log = parse_csv(data, CsvMapping(**body.mapping))
        if not log.traces:
            raise InputError("the uploaded log contains no usable traces")
        sid = store.create_session({"format": body.format})
        store.put_artifact(sid, "log.json", dump_json(log))
        return {
            "session_id": sid,
            "schema": dict(sorted(log.schema.items())),
            "trace_count": len(log.traces),
            "event_count": log.event_count,
            "warnings": list(log.warnings),
        }

    @app.get("/sessions/{sid}")
    def session_info(sid: str):
        manifest = store.manifest(sid)
        return {
            "session_id": sid,
            "created": manifest["created"],
            "updated": manifest["updated"],
            "artifacts": sorted(manifest["artifacts"]),
            "jobs": manifest["jobs"],
        }

    # -- discovery -----------------------------------------------------------

    @app.post("/sessions/{sid}/discover")
    def discover(sid: str):
        from .discovery import discover_inductive

        log = _load_log(sid)
        net = discover_inductive(log)
        pnml = export_pnml(net)
        dot = export_dot(net)
        store.put_artifact(sid, "net.pnml", pnml)
        store.put_artifact(sid, "net.dot", dot.encode("utf-8"))
        dps = decision_points(net)
        return {
            "pnml": pnml.decode("utf-8"),
            "dot": dot,
            "net": {
                "places": sorted(net.places),
                "transitions": [
                    {"id": t, "label": net.label(t)} for t in sorted(net.transitions)
                ],
                "arcs": sorted([list(a) for a in net.arcs]),
                "initial_marking": dict(net.initial_marking.items()),
                "final_marking": dict(net.final_marking.items()),
            },
            "decision_points": [
                {
                    "place": dp.place,
                    "alternatives": [
                        {"id": t, "label": net.label(t)} for t in dp.alternatives
                    ],
                }
                for dp in dps
            ],
        }

    # -- training ------------------------------------------------------------

    def _run_training(sid: str, place: str, job_id: str, req: TrainRequest):
        try:
            with store.training_lock(sid, place):
                store.update_job(sid, job_id, state="running", progress=0.0)
                log = _load_log(sid)
                net = _load_net(sid)
                spec = FeatureSpec.from_dict(req.feature_spec)
                kinds = tuple(req.kinds) if req.kinds else config.kinds
                grids = {k: req.grid for k in kinds} if req.grid else config.grids
                seed = config.seed if req.seed is None else req.seed

                def progress(frac: float):
                    store.update_job(sid, job_id, progress=round(frac, 4))

                result = mine_decision_point(
                    log, net, place, spec, kinds, grids, seed, req.folds,
                    config.background_size, progress,
                )
                store.put_artifact(sid, _dp_artifact(sid, place, "table.json"),
                                   dump_table_json(result.table))
                store.put_artifact(sid, _dp_artifact(sid, place, "encoder.json"),
                                   result.encoder.dump_json())
                store.put_artifact(sid, _dp_artifact(sid, place, "feature_spec.json"),
                                   canonical_dump_bytes(spec.to_dict()))
                reports_doc = {
                    "reports": {k: r.to_dict() for k, r in result.reports.items()},
                    "suggested": result.suggested,
                    "degenerate": result.suggested is None,
                    "seed": seed,
                }
                store.put_artifact(sid, _dp_artifact(sid, place, "reports.json"),
                                   canonical_dump_bytes(reports_doc))
                store.put_artifact(sid, _dp_artifact(sid, place, "model.bin"),
                                   dump_model(result.model))
                bg_buf = io.BytesIO()
                np.save(bg_buf, result.background.data)
                store.put_artifact(sid, _dp_artifact(sid, place, "background.npy"),
                                   bg_buf.getvalue())
                store.update_job(sid, job_id, state="done", progress=1.0)
        except Exception as exc:  # job errors surface via polling
            store.update_job(sid, job_id, state="failed", error=str(exc))

    @app.post("/sessions/{sid}/decision-points/{place}/train", status_code=202)
    def start_training(sid: str, place: str, req: TrainRequest):
        net = _load_net(sid)
        find_decision_point(net, place)  # 404 on unknown place
        FeatureSpec.from_dict(req.feature_spec)  # validate early
        if req.kinds:
            from .learners import KINDS

            for kind in req.kinds:
                if kind not in KINDS:
                    raise InputError(f"unknown learner kind {kind!r}")
        job_id = store.create_job(sid, place)
        thread = threading.Thread(
            target=_run_training, args=(sid, place, job_id, req), daemon=True
        )
        thread.start()
        return store.job(sid, job_id)

    @app.get("/sessions/{sid}/jobs/{job_id}")
    def job_status(sid: str, job_id: str):
        return store.job(sid, job_id)

    @app.get("/sessions/{sid}/decision-points/{place}/report")
    def report(sid: str, place: str):
        net = _load_net(sid)
        find_decision_point(net, place)
        name = _dp_artifact(sid, place, "reports.json")
        if not store.has_artifact(sid, name):
            raise NotFoundError(f"decision point {place!r} has not been trained yet")
        return loads(store.get_artifact(sid, name))

    # -- online phase ----------------------------------------------------------

    @app.post("/sessions/{sid}/decision-points/{place}/predict")
    def predict_decision(sid: str, place: str, body: InstanceBody):
        net = _load_net(sid)
        find_decision_point(net, place)
        model, _, spec = _require_trained(sid, place)
        fmap = instance_fmap(spec, body.features, body.events)
        mapping = model.predict_mapping(fmap)
        return {
            "decision_mapping": mapping,
            "argmax": model.argmax(mapping),
            "labels": {t: net.label(t) for t in model.alternatives},
        }

    def _explain_instance(model, background, fmap, target, method, grouping,
                          n_permutations, seed):
        x = model.encoder.transform(fmap)
        if target is None:
            mapping = model.predict_mapping(fmap)
            target = model.argmax(mapping)
        units = len(model.encoder) if grouping == "columns" else len(model.encoder.sources)
        if method == "auto":
            method = "exact" if units <= 12 else "sampled"
        if method == "exact":
            # keep exact runs inside the synchronous budget: subset count times
            # background rows is the dominating cost
            projected = (2 ** min(units, 40)) * len(background.data)
            if projected > 2_000_000 * max(config.explain_budget_seconds, 1.0):
                raise TooManyUnitsError(
                    f"exact enumeration over {units} units exceeds the "
                    f"{config.explain_budget_seconds:.0f}s budget; use method=sampled"
                )
            exp = exact_shap(model, x, target, background, grouping)
        else:
            exp = sampled_shap(model, x, target, background,
                               n_permutations=n_permutations, seed=seed,
                               grouping=grouping)
        return exp

    @app.post("/sessions/{sid}/decision-points/{place}/explain")
    def explain_decision(sid: str, place: str, req: ExplainRequest):
        net = _load_net(sid)
        find_decision_point(net, place)
        model, background, spec = _require_trained(sid, place)
        fmap = instance_fmap(spec, req.features, req.events)
        exp = _explain_instance(model, background, fmap, req.target, req.method,
                                req.grouping, req.n_permutations, req.seed)
        return {"explanation": exp.to_dict(), "plots": explanation_bundle(exp)}

    @app.get("/sessions/{sid}/decision-points/{place}/global-explanation")
    def global_explanation_endpoint(sid: str, place: str, target: Optional[str] = None,
                                    exclude: Optional[str] = None,
                                    method: Literal["auto", "exact", "sampled"] = "auto",
                                    n_permutations: int = 50, seed: int = 0):
        net = _load_net(sid)
        find_decision_point(net, place)
        model, background, _ = _require_trained(sid, place)
        exclude_sources = tuple(s for s in (exclude or "").split(",") if s)
        cache_key = hashlib.sha256(
            repr((target, exclude_sources, method, n_permutations, seed)).encode()
        ).hexdigest()[:16]
        cache_name = _dp_artifact(sid, place, f"global-{cache_key}.json")
        if store.has_artifact(sid, cache_name):
            return loads(store.get_artifact(sid, cache_name))

        table = load_table_json(store.get_artifact(sid, _dp_artifact(sid, place, "table.json")))
        X, _ = encode_table(model.encoder, table)
        rng = np.random.default_rng(seed)
        if len(X) > config.global_instances:
            X = X[np.sort(rng.choice(len(X), config.global_instances, replace=False))]
        targets = [target] if target else None
        gexp = global_explanation(model, X, targets, background, method=method,
                                  n_permutations=n_permutations, seed=seed)
        doc = {
            "global": gexp.to_dict(),
            "plots": {
                "bar": bar_plot_data(gexp, exclude_sources=exclude_sources),
                "beeswarm": {
                    t: beeswarm_plot_data(gexp, t, exclude_sources=exclude_sources)
                    for t in gexp.targets
                },
            },
            "labels": {t: net.label(t) for t in sorted(net.transitions)},
        }
        store.put_artifact(sid, cache_name, canonical_dump_bytes(doc))
        return doc

    @app.post("/sessions/{sid}/decision-points/{place}/whatif")
    def whatif(sid: str, place: str, req: WhatIfRequest):
        net = _load_net(sid)
        find_decision_point(net, place)
        model, background, spec = _require_trained(sid, place)
        base_fmap = instance_fmap(spec, req.features, req.events)
        sources = set(model.encoder.sources)
        for key in req.overrides:
            if key not in sources:
                raise InputError(f"unknown feature {key!r} in overrides")
        from .pipeline import json_to_fmap

        after_fmap = dict(base_fmap)
        after_fmap.update(json_to_fmap(req.overrides))

        def describe(fmap):
            mapping = model.predict_mapping(fmap)
            exp = _explain_instance(model, background, fmap, None, "auto",
                                    "columns", 100, 0)
            return mapping, exp

        before_mapping, before_exp = describe(base_fmap)
        after_mapping, after_exp = describe(after_fmap)
        delta = {t: after_mapping[t] - before_mapping[t] for t in model.alternatives}
        return {
            "before": {
                "decision_mapping": before_mapping,
                "argmax": model.argmax(before_mapping),
                "explanation": before_exp.to_dict(),
            },
            "after": {
                "decision_mapping": after_mapping,
                "argmax": model.argmax(after_mapping),
                "explanation": after_exp.to_dict(),
            },
            "delta": delta,
            "labels": {t: net.label(t) for t in model.alternatives},
        }

    # -- misc -----------------------------------------------------------------

    @app.get("/spec", summary="The OpenAPI description of this service")
    def openapi_spec():
        return app.openapi()

    @app.get("/health", include_in_schema=False)
    def health():
        return {"status": "ok"}

    frontend = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    if frontend.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="frontend")

    return app
