"""HTTP facade for the pipeline: upload, segment, override, fetch rasters.

Sessions are held in memory (optionally mirrored to a directory for crash
recovery) and evicted after a TTL. Results are immutable revisions: every
segment/override bumps the revision and the raster bytes for a given
(session, kind, revision) never change afterwards. Candidate records are
computed once per session
and reused by the manual-override path, which only reruns
trimap -> matting -> refinement.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import MatteforgeError
from .imaging import BoundingBox, decode_image, encode_mask_png, save_image_png
from .matting import encode_matte_png
from .multires import CandidateSet, override_selection
from .pipeline import PipelineConfig, run_matting_stage
from .trimap import encode_trimap_png

MAX_UPLOAD_BYTES = 20 * 1024 * 1024
RASTER_KINDS = ("mask", "matte", "trimap", "pre-refine")


@dataclass
class ServiceConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    session_ttl_s: float = 3600.0
    compute_timeout_s: float = 120.0
    max_upload_bytes: int = MAX_UPLOAD_BYTES
    cors_origin: str = "*"
    persist_dir: str | None = None


class _Session:
    def __init__(self, session_id: str, image: np.ndarray):
        self.id = session_id
        self.image = image
        self.created = time.monotonic()
        self.touched = time.monotonic()
        self.lock = threading.Lock()
        self.box: BoundingBox | None = None
        self.candidates: CandidateSet | None = None
        self.candidate_records: list[dict] | None = None
        self.candidate_png: dict[int, bytes] = {}
        self.revision = 0
        self.rasters: dict[tuple[str, int], bytes] = {}

    def touch(self):
        self.touched = time.monotonic()


class SessionStore:
    def __init__(self, cfg: ServiceConfig):
        self.cfg = cfg
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        if cfg.persist_dir:
            os.makedirs(cfg.persist_dir, exist_ok=True)
            self._restore()

    def _restore(self):
        root = self.cfg.persist_dir
        for sid in sorted(os.listdir(root)):
            meta_path = os.path.join(root, sid, "meta.json")
            image_path = os.path.join(root, sid, "image.png")
            if not (os.path.isfile(meta_path) and os.path.isfile(image_path)):
                continue
            try:
                from .imaging import load_image

                session = _Session(sid, load_image(image_path))
                with open(meta_path) as fh:
                    meta = json.load(fh)
                session.revision = meta.get("revision", 0)
                session.candidate_records = meta.get("candidate_records")
                for name in os.listdir(os.path.join(root, sid)):
                    if name.startswith("raster_"):
                        kind, rev = name[len("raster_") : -len(".png")].rsplit("_", 1)
                        with open(os.path.join(root, sid, name), "rb") as fh:
                            session.rasters[(kind, int(rev))] = fh.read()
                self._sessions[sid] = session
            except Exception:
                continue  # a corrupt session directory must not block startup

    def _persist_image(self, session: _Session):
        if not self.cfg.persist_dir:
            return
        d = os.path.join(self.cfg.persist_dir, session.id)
        os.makedirs(d, exist_ok=True)
        save_image_png(session.image, os.path.join(d, "image.png"))
        self._persist_meta(session)

    def _persist_meta(self, session: _Session):
        if not self.cfg.persist_dir:
            return
        d = os.path.join(self.cfg.persist_dir, session.id)
        os.makedirs(d, exist_ok=True)
        with open(os.path.join(d, "meta.json"), "w") as fh:
            json.dump(
                {
                    "revision": session.revision,
                    "candidate_records": session.candidate_records,
                },
                fh,
            )

    def _persist_raster(self, session: _Session, kind: str, rev: int, data: bytes):
        if not self.cfg.persist_dir:
            return
        d = os.path.join(self.cfg.persist_dir, session.id)
        os.makedirs(d, exist_ok=True)
        with open(os.path.join(d, f"raster_{kind}_{rev}.png"), "wb") as fh:
            fh.write(data)

    def sweep(self):
        deadline = time.monotonic() - self.cfg.session_ttl_s
        with self._lock:
            stale = [sid for sid, s in self._sessions.items() if s.touched < deadline]
            for sid in stale:
                del self._sessions[sid]

    def create(self, image: np.ndarray) -> _Session:
        session = _Session(uuid.uuid4().hex, image)
        with self._lock:
            self._sessions[session.id] = session
        self._persist_image(session)
        return session

    def get(self, sid: str) -> _Session | None:
        self.sweep()
        with self._lock:
            session = self._sessions.get(sid)
        if session:
            session.touch()
        return session


class SegmentBody(BaseModel):
    x: int
    y: int
    w: int
    h: int


class OverrideBody(BaseModel):
    factor: int


def _candidate_records(cs: CandidateSet) -> list[dict]:
    return [
        {
            "factor": c.factor,
            "patch_count": c.patch_count,
            "score": None if c.skipped else c.score,
            "skipped": c.skipped,
        }
        for c in cs.candidates
    ]


def _raster_urls(session: _Session, rev: int) -> dict:
    base = f"/v1/sessions/{session.id}/raster"
    urls = {
        kind: f"{base}?kind={kind}&rev={rev}"
        for kind in RASTER_KINDS
    }
    urls["candidates"] = {
        str(rec["factor"]): f"{base}?kind=candidate-{rec['factor']}&rev={rev}"
        for rec in (session.candidate_records or [])
        if not rec["skipped"]
    }
    return urls


def create_app(cfg: ServiceConfig | None = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    app = FastAPI(title="matteforge")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cfg.cors_origin] if cfg.cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(cfg)
    app.state.store = store
    executor = ThreadPoolExecutor(max_workers=4)

    def compute(fn, *args):
        future = executor.submit(fn, *args)
        try:
            return future.result(timeout=cfg.compute_timeout_s)
        except FutureTimeout:
            future.cancel()
            raise TimeoutError(f"computation exceeded {cfg.compute_timeout_s}s")

    def store_revision(session: _Session, tri, matte, pre_refine, final):
        """Freeze the stage outputs as the next immutable revision.

        Candidate masks come from session.candidate_png, which is rebuilt
        whenever candidates are recomputed (segment) and reused untouched
        on overrides, so candidate-K rasters always match the records.
        """
        session.revision += 1
        rev = session.revision
        rasters = {
            "mask": encode_mask_png(final),
            "matte": encode_matte_png(matte),
            "trimap": encode_trimap_png(tri),
            "pre-refine": encode_mask_png(pre_refine),
        }
        for factor, data in session.candidate_png.items():
            rasters[f"candidate-{factor}"] = data
        for kind, data in rasters.items():
            session.rasters[(kind, rev)] = data
            store._persist_raster(session, kind, rev, data)
        store._persist_meta(session)
        return rev

    @app.post("/v1/sessions", status_code=201)
    async def upload(request: Request):
        body = await request.body()
        if len(body) > cfg.max_upload_bytes:
            return JSONResponse({"error": "image too large"}, status_code=413)
        try:
            image = decode_image(body)
        except ValueError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session = store.create(image)
        return {
            "session_id": session.id,
            "width": image.shape[1],
            "height": image.shape[0],
        }

    @app.post("/v1/sessions/{sid}/segment")
    def segment_endpoint(sid: str, body: SegmentBody):
        session = store.get(sid)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        box = BoundingBox(body.x, body.y, body.w, body.h)
        try:
            box.validate(session.image.shape[1], session.image.shape[0])
        except MatteforgeError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        with session.lock:
            try:
                def run():
                    from .pipeline import build_candidates

                    cs = build_candidates(session.image, box, cfg.pipeline)
                    stage = run_matting_stage(session.image, box, cs, cfg.pipeline)
                    return cs, stage

                cs, (tri, matte, pre_refine, final, _) = compute(run)
            except MatteforgeError as exc:
                return JSONResponse(
                    {"error": str(exc), "stage": exc.stage or "pipeline"},
                    status_code=500,
                )
            except TimeoutError as exc:
                return JSONResponse({"error": str(exc), "stage": "timeout"}, status_code=500)
            session.box = box
            session.candidates = cs
            session.candidate_records = _candidate_records(cs)
            session.candidate_png = {
                c.factor: encode_mask_png(c.labeling.mask)
                for c in cs.candidates
                if not c.skipped
            }
            rev = store_revision(session, tri, matte, pre_refine, final)
        return {
            "session_id": sid,
            "revision": rev,
            "selected_factor": cs.selected.factor,
            "candidates": session.candidate_records,
            "urls": _raster_urls(session, rev),
        }

    @app.post("/v1/sessions/{sid}/override")
    def override_endpoint(sid: str, body: OverrideBody):
        session = store.get(sid)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            if session.candidates is None:
                return JSONResponse(
                    {"error": "no prior segmentation to override"}, status_code=409
                )
            try:
                idx = session.candidates.index_of_factor(body.factor)
                cs = override_selection(session.candidates, idx)
            except MatteforgeError as exc:
                return JSONResponse({"error": str(exc)}, status_code=422)
            try:
                tri, matte, pre_refine, final, _ = compute(
                    run_matting_stage, session.image, session.box, cs, cfg.pipeline
                )
            except MatteforgeError as exc:
                return JSONResponse(
                    {"error": str(exc), "stage": exc.stage or "pipeline"},
                    status_code=500,
                )
            except TimeoutError as exc:
                return JSONResponse({"error": str(exc), "stage": "timeout"}, status_code=500)
            session.candidates = cs
            rev = store_revision(session, tri, matte, pre_refine, final)
        return {
            "session_id": sid,
            "revision": rev,
            "selected_factor": cs.selected.factor,
            "candidates": session.candidate_records,
            "urls": _raster_urls(session, rev),
        }

    @app.get("/v1/sessions/{sid}/raster")
    def raster_endpoint(sid: str, kind: str, rev: int):
        session = store.get(sid)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        data = session.rasters.get((kind, rev))
        if data is None:
            return JSONResponse({"error": f"no raster {kind} at rev {rev}"}, status_code=404)
        return Response(content=data, media_type="image/png")

    return app


def main():
    """Run the service under uvicorn; bind address and port come from flags."""
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="matteforge HTTP service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8401)
    parser.add_argument("--persist-dir", default=None)
    parser.add_argument("--cors-origin", default="*")
    parser.add_argument("--timeout", type=float, default=120.0)
    args = parser.parse_args()
    cfg = ServiceConfig(
        persist_dir=args.persist_dir,
        cors_origin=args.cors_origin,
        compute_timeout_s=args.timeout,
    )
    uvicorn.run(create_app(cfg), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
