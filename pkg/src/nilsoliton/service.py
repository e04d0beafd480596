"""HTTP service exposing the toolkit: bracket analysis, gradient flow,
graph positivity, and batch runs.  The CLI is a thin client of this app."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Literal, Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import reports
from .documents import DocumentError, parse_document_dict
from .graphs import GraphError, grst

app = FastAPI(
    title="nilsoliton service",
    description=(
        "Decides whether nilpotent Lie algebras given by structure constants "
        "or graphs admit nilsoliton metrics; runs moment-map gradient flows "
        "and stratum certification."
    ),
    version="0.1.0",
)


class BracketEntryModel(BaseModel):
    i: int
    j: int
    k: int
    c: Union[float, int, str]


class BracketModel(BaseModel):
    kind: Literal["bracket"] = "bracket"
    dim: int
    entries: list[BracketEntryModel] = Field(default_factory=list)
    name: Optional[str] = None
    source: Optional[str] = None


class GraphModel(BaseModel):
    kind: Literal["graph"] = "graph"
    vertices: int
    edges: list[tuple[int, int]] = Field(default_factory=list)
    name: Optional[str] = None


class AnalyzeRequest(BaseModel):
    document: BracketModel
    analyses: list[str] = Field(default_factory=lambda: list(reports.DEFAULT_ANALYSES))
    tol: float = 1e-8
    seed: int = 0


class AnalyzeResponse(BaseModel):
    name: str
    valid: bool
    report: dict[str, Any]


class FlowOptionsModel(BaseModel):
    model_config = {"extra": "forbid"}

    grad_tol: float = 1e-9
    max_time: float = 1e6
    initial_step: float = 1e-2
    rtol: float = 1e-10
    atol: float = 1e-13
    max_steps: int = 200_000
    sample_every: int = 1
    structural_zero_tol: float = 1e-7
    perturb_seed: Optional[int] = None


class FlowRequest(BaseModel):
    document: BracketModel
    options: FlowOptionsModel = Field(default_factory=FlowOptionsModel)


class FlowResponse(BaseModel):
    name: str
    converged: bool
    report: dict[str, Any]


class GrstParams(BaseModel):
    r: int
    s: int
    t: int


class GraphRequest(BaseModel):
    document: Optional[GraphModel] = None
    grst: Optional[GrstParams] = None
    tol: float = 1e-8


class GraphResponse(BaseModel):
    name: str
    report: dict[str, Any]


class BatchItemModel(BaseModel):
    command: Literal["analyze", "flow", "graph"] = "analyze"
    document: Union[BracketModel, GraphModel]
    analyses: Optional[list[str]] = None
    subcommand: str = "positivity"
    options: dict[str, Any] = Field(default_factory=dict)


class BatchRequest(BaseModel):
    items: list[BatchItemModel] = Field(default_factory=list)
    tol: float = 1e-8
    seed: int = 0


class BatchItemResult(BaseModel):
    ok: bool
    error: Optional[str] = None
    report: Optional[dict[str, Any]] = None


class BatchResponse(BaseModel):
    ok: bool
    items: list[BatchItemResult]


def _bracket_document(model: BracketModel):
    try:
        return parse_document_dict(model.model_dump())
    except DocumentError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _graph(request: GraphRequest):
    if request.grst is not None:
        try:
            return grst(request.grst.r, request.grst.s, request.grst.t)
        except GraphError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
    if request.document is None:
        raise HTTPException(status_code=400, detail="need a graph document or grst parameters")
    try:
        return parse_document_dict(request.document.model_dump()).to_graph()
    except (DocumentError, GraphError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "service": "nilsoliton"}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
    doc = _bracket_document(request.document)
    try:
        report = reports.analyze_document(
            doc, analyses=tuple(request.analyses), tol=request.tol, seed=request.seed
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return AnalyzeResponse(name=report["name"], valid=report["valid"], report=report)


@app.post("/flow", response_model=FlowResponse)
def run_flow(request: FlowRequest) -> FlowResponse:
    doc = _bracket_document(request.document)
    try:
        report = reports.flow_document(doc, request.options.model_dump())
    except Exception as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return FlowResponse(name=report["name"], converged=report["converged"], report=report)


_GRAPH_SUBCOMMANDS = ("positivity", "weighting", "soliton", "witness", "grst", "matrix")


@app.post("/graph/{subcommand}", response_model=GraphResponse)
def run_graph(subcommand: str, request: GraphRequest) -> GraphResponse:
    if subcommand not in _GRAPH_SUBCOMMANDS:
        raise HTTPException(status_code=404, detail=f"unknown graph subcommand {subcommand!r}")
    g = _graph(request)
    try:
        report = reports.graph_report(g, subcommand, tol=request.tol)
    except GraphError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return GraphResponse(name=report["name"], report=report)


def _run_batch_item(item: BatchItemModel, tol: float, seed: int) -> BatchItemResult:
    try:
        if item.command == "analyze":
            doc = parse_document_dict(item.document.model_dump())
            analyses = tuple(item.analyses) if item.analyses else reports.DEFAULT_ANALYSES
            report = reports.analyze_document(doc, analyses=analyses, tol=tol, seed=seed)
            return BatchItemResult(ok=bool(report["valid"]), report=report)
        if item.command == "flow":
            doc = parse_document_dict(item.document.model_dump())
            report = reports.flow_document(doc, item.options)
            return BatchItemResult(ok=True, report=report)
        doc = parse_document_dict(item.document.model_dump())
        report = reports.graph_report(doc.to_graph(), item.subcommand, tol=tol)
        return BatchItemResult(ok=True, report=report)
    except Exception as exc:
        return BatchItemResult(ok=False, error=str(exc))


@app.post("/batch", response_model=BatchResponse)
def run_batch(request: BatchRequest) -> BatchResponse:
    """Run all items concurrently; results are aggregated in request order."""
    if not request.items:
        return BatchResponse(ok=True, items=[])
    env_cap = os.environ.get("NILSOLITON_THREADS")
    workers = int(env_cap) if env_cap else min(8, len(request.items))
    workers = max(1, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(lambda item: _run_batch_item(item, request.tol, request.seed), request.items)
        )
    return BatchResponse(ok=all(r.ok for r in results), items=results)
