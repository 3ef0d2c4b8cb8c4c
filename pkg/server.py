"""
FastAPI server for pnstruct.
Serves analysis reports for the bundled corpus and for uploaded .lpn text.
"""
import logging
from functools import lru_cache
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

import config
from corpus import PUBLISHED_TABLE, TABLE_NETS, WORKFLOW_NETS, corpus_net
from errors import FormatError, LimitExceeded, PetriNetError
from formats import parse_lpn
from report import PROPERTIES, analyze, check_property
from state_space import ExplorationLimits

logger = logging.getLogger(__name__)

app = FastAPI(
    title="pnstruct API",
    description="Structure-theory analysis of place/transition Petri nets",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class AnalyzeRequest(BaseModel):
    lpn: str
    max_states: Optional[int] = None


def _limits(max_states: Optional[int] = None) -> ExplorationLimits:
    cap = config.API_MAX_STATES
    if max_states is not None:
        if max_states < 1:
            raise HTTPException(status_code=400, detail="max_states must be at least 1")
        cap = min(cap, max_states)
    return ExplorationLimits(max_states=cap)


@lru_cache(maxsize=None)
def _corpus_report(name: str) -> dict:
    net, m0 = corpus_net(name)
    return analyze(net, m0, _limits()).to_dict()


def _load_corpus(name: str):
    try:
        return corpus_net(name)
    except KeyError:
        raise HTTPException(status_code=404, detail=f"Unknown corpus net '{name}'")


@app.get("/")
async def root():
    return {
        "message": "pnstruct API",
        "endpoints": ["/api/corpus", "/api/corpus/{name}", "/api/corpus/{name}/check/{prop}", "/api/analyze"],
    }


@app.get("/api/corpus")
async def list_corpus():
    """Corpus nets with their computed and published overview rows."""
    nets = []
    for name in TABLE_NETS + WORKFLOW_NETS:
        report = _corpus_report(name)
        nets.append({
            "name": name,
            "places": report["place_count"],
            "transitions": report["transition_count"],
            "reachable_markings": report["reachable_marking_count"],
            "lucent": report["lucent"],
            "published": PUBLISHED_TABLE.get(name),
        })
    return {"nets": nets}


@app.get("/api/corpus/{name}")
async def get_corpus_net(name: str):
    _load_corpus(name)
    return _corpus_report(name)


@app.get("/api/corpus/{name}/check/{prop}")
async def check_corpus_net(name: str, prop: str):
    if prop not in PROPERTIES:
        raise HTTPException(status_code=400, detail=f"Unknown property '{prop}'")
    net, m0 = _load_corpus(name)
    try:
        return check_property(prop, net, m0, _limits()).to_dict()
    except LimitExceeded as e:
        raise HTTPException(status_code=422, detail=str(e))
    except PetriNetError as e:
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")


@app.post("/api/analyze")
async def analyze_lpn(request: AnalyzeRequest):
    """Analyze a net given as .lpn text."""
    try:
        net, m0 = parse_lpn(request.lpn, name="uploaded")
    except FormatError as e:
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")
    try:
        report = analyze(net, m0, _limits(request.max_states))
    except PetriNetError as e:
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")
    if report.reachable_marking_count is None and report.bounded is None:
        raise HTTPException(status_code=422, detail=report.warnings)
    return report.to_dict()
