"""HTTP service exposing the toolkit's operations.

Each endpoint validates a request model, runs the corresponding experiment
in-process, and returns the report model.  Runs are synchronous: training a
desk-scale model takes minutes, so clients should use generous timeouts.

Run with: ``uvicorn qlifnet.service.app:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..data import DownloadError
from ..experiments import run_eval, run_fetch, run_trace, run_train, run_verify
from ..schemas import (
    EvalReport,
    EvalRequest,
    FetchReport,
    FetchRequest,
    TraceReport,
    TraceRequest,
    TrainReport,
    TrainRequest,
    VerifyReport,
    VerifyRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="qlifnet",
        version=__version__,
        description="Quantum spiking network training, tracing, and verification",
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/train", response_model=TrainReport)
    def train(req: TrainRequest):
        return _run(run_train, req)

    @app.post("/eval", response_model=EvalReport)
    def eval_(req: EvalRequest):
        return _run(run_eval, req)

    @app.post("/trace", response_model=TraceReport)
    def trace(req: TraceRequest):
        return _run(run_trace, req)

    @app.post("/verify", response_model=VerifyReport)
    def verify(req: VerifyRequest):
        return _run(run_verify, req)

    @app.post("/fetch", response_model=FetchReport)
    def fetch(req: FetchRequest):
        return _run(run_fetch, req)

    return app


def _run(fn, req):
    try:
        return fn(req)
    except (ValueError, FileNotFoundError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except DownloadError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc


app = create_app()
