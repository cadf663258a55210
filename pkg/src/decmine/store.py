"""File-system session store with content-addressed artifacts.

Each session keeps a manifest mapping logical artifact names to content
hashes; artifact files are immutable once written, so a restart never loses
completed work and repeated byte-identical artifacts are stored once.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from ._json import canonical_dumps
from .errors import NotFoundError


class SessionStore:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            if key not in self._locks:
                self._locks[key] = threading.Lock()
            return self._locks[key]

    def session_lock(self, sid: str) -> threading.Lock:
        return self._lock(f"session:{sid}")

    def training_lock(self, sid: str, place: str) -> threading.Lock:
        return self._lock(f"train:{sid}:{place}")

    # -- sessions ----------------------------------------------------------

    def create_session(self, meta: dict | None = None) -> str:
        sid = uuid.uuid4().hex[:12]
        sdir = self.root / "sessions" / sid
        (sdir / "artifacts").mkdir(parents=True)
        manifest = {
            "id": sid,
            "created": _now(),
            "updated": _now(),
            "meta": meta or {},
            "artifacts": {},
            "jobs": {},
        }
        self._write_manifest(sid, manifest)
        return sid

    def list_sessions(self) -> list[str]:
        return sorted(p.name for p in (self.root / "sessions").iterdir() if p.is_dir())

    def manifest(self, sid: str) -> dict:
        path = self.root / "sessions" / sid / "manifest.json"
        if not path.exists():
            raise NotFoundError(f"unknown session {sid!r}")
        return json.loads(path.read_text())

    def _write_manifest(self, sid: str, manifest: dict) -> None:
        path = self.root / "sessions" / sid / "manifest.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(canonical_dumps(manifest))
        tmp.replace(path)

    def update_manifest(self, sid: str, fn) -> dict:
        with self.session_lock(sid):
            manifest = self.manifest(sid)
            fn(manifest)
            manifest["updated"] = _now()
            self._write_manifest(sid, manifest)
            return manifest

    # -- artifacts ---------------------------------------------------------

    def put_artifact(self, sid: str, name: str, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        blob = self.root / "sessions" / sid / "artifacts" / digest
        if not blob.exists():
            blob.write_bytes(data)

        def set_ref(manifest):
            manifest["artifacts"][name] = digest

        self.update_manifest(sid, set_ref)
        return digest

    def has_artifact(self, sid: str, name: str) -> bool:
        return name in self.manifest(sid)["artifacts"]

    def get_artifact(self, sid: str, name: str) -> bytes:
        manifest = self.manifest(sid)
        digest = manifest["artifacts"].get(name)
        if digest is None:
            raise NotFoundError(f"session {sid!r} has no artifact {name!r}")
        return (self.root / "sessions" / sid / "artifacts" / digest).read_bytes()

    # -- jobs ----------------------------------------------------------------

    def create_job(self, sid: str, place: str) -> str:
        job_id = uuid.uuid4().hex[:12]

        def add(manifest):
            manifest["jobs"][job_id] = {
                "job_id": job_id,
                "place": place,
                "state": "queued",
                "progress": 0.0,
                "error": None,
            }

        self.update_manifest(sid, add)
        return job_id

    def update_job(self, sid: str, job_id: str, **changes) -> None:
        def patch(manifest):
            job = manifest["jobs"].get(job_id)
            if job is None:
                raise NotFoundError(f"unknown job {job_id!r}")
            if job["state"] in ("done", "failed"):
                return  # terminal states are final
            job.update(changes)

        self.update_manifest(sid, patch)

    def job(self, sid: str, job_id: str) -> dict:
        job = self.manifest(sid)["jobs"].get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job {job_id!r}")
        return job


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"
