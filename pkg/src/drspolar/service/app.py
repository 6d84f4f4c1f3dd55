"""FastAPI application wrapping the verification core."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..clifford import SpecParseError
from ..exactla import LinAlgError
from ..polarity import InvarianceError, PolarityInputError
from . import core
from .schemas import (
    CheckRequest,
    CheckResponse,
    ClassifyRequest,
    ClassifyResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="drspolar",
    description="Damek-Ricci spaces from Clifford modules with exact polarity checks",
    version="0.1.0",
)


def _guarded(fn, req):
    try:
        return fn(req)
    except SpecParseError as e:
        raise HTTPException(status_code=422, detail={"error": "parse", "message": str(e)})
    except (PolarityInputError, InvarianceError, LinAlgError, ValueError) as e:
        raise HTTPException(status_code=422, detail={"error": "input", "message": str(e)})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    return _guarded(core.run_verify, req)


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest):
    return _guarded(core.run_check, req)


@app.post("/classify", response_model=ClassifyResponse)
def classify_endpoint(req: ClassifyRequest):
    return _guarded(core.run_classify, req)
