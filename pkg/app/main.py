import os
from datetime import datetime

import uvicorn
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .controller import TraceGenController
from .database import Database
from .errors import FrontendError, SpawnError
from .models import (
    BenchRun,
    CheckReport,
    CheckRequest,
    EmissionConfig,
    EmitRequest,
    EmitResponse,
    ErrorResponse,
    ProverVerdict,
    VerifyRequest,
)
from .parser import parse_program
from .semantics import build_task
from .smtlib import emit_smtlib

VERSION = "1.0.0"

app = FastAPI(
    title="Trace Logic VC Generator",
    description="Translates W programs into trace-logic verification tasks",
    version=VERSION,
)

# Initialize components
db = Database(os.getenv("TRACEGEN_DB", "tracegen.db"))


@app.get("/status")
async def status():
    """Server status endpoint."""
    return {
        "message": "Trace Logic VC Generator",
        "status": "running",
        "version": VERSION,
        "timestamp": datetime.utcnow().isoformat(),
    }


@app.post("/api/emit", response_model=EmitResponse)
async def emit_endpoint(request: EmitRequest):
    """SMT-LIB task for a W program."""
    cfg = EmissionConfig(
        nat_mode=request.nat_mode,
        conjecture_mode=request.conjecture_mode,
        include_lemmas=request.include_lemmas,
    )
    task = build_task(parse_program(request.source), include_lemmas=cfg.include_lemmas)
    return EmitResponse(
        smtlib=emit_smtlib(task, cfg),
        semantics_axioms=len(task.semantics_axioms),
        reach_axioms=len(task.reach_axioms),
        lemma_instances=len(task.lemma_instances),
    )


@app.post("/api/check", response_model=CheckReport)
def check_endpoint(request: CheckRequest):
    """Soundness sweep of the generated axioms over sampled executions."""
    controller = TraceGenController()
    return controller.check_program(
        parse_program(request.source),
        name=request.name,
        count=request.count,
        seed=request.seed,
        bounds=request.bounds,
    )


@app.post("/api/verify", response_model=ProverVerdict)
def verify_endpoint(request: VerifyRequest):
    """Emit the task and run the external prover on it."""
    cfg = EmissionConfig(
        nat_mode=request.nat_mode,
        conjecture_mode=request.conjecture_mode,
        timeout_seconds=request.timeout,
    )
    return TraceGenController(cfg).verify_source(request.source)


@app.get("/api/runs/latest", response_model=BenchRun)
async def latest_run():
    """Most recent benchmark run recorded with `tracegen bench --db`."""
    run = db.latest_run()
    if run is None:
        raise HTTPException(status_code=404, detail="No benchmark runs recorded")
    return run


@app.exception_handler(FrontendError)
async def frontend_exception_handler(request: Request, exc: FrontendError):
    """Invalid W source."""
    return JSONResponse(
        status_code=400,
        content=ErrorResponse(
            status=1,
            error=type(exc).__name__,
            message=str(exc),
            line=exc.line,
            column=exc.column,
        ).model_dump(),
    )


@app.exception_handler(SpawnError)
async def spawn_exception_handler(request: Request, exc: SpawnError):
    """Prover not installed on the server."""
    return JSONResponse(
        status_code=503,
        content=ErrorResponse(
            status=2, error="Prover Unavailable", message=str(exc)
        ).model_dump(),
    )


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    """Handle general exceptions."""
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            status=2, error="Internal Server Error", message=str(exc)
        ).model_dump(),
    )


if __name__ == "__main__":
    uvicorn.run(app, host="0.0.0.0", port=8000)
